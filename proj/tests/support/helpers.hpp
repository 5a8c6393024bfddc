// Shared plumbing for the test binaries. Everything here is deliberately
// independent of the explorer's internals: the enumerator below re-implements
// state-space traversal from the public semantics primitives only, so the two
// can disagree when one of them is wrong.
#pragma once

#include "cscoop/driver.hpp"
#include "cscoop/explorer.hpp"

#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cscoop::test {

inline std::string source_dir() { return CSCOOP_SOURCE_DIR; }

inline std::string bench_path(const std::string &name) {
    return source_dir() + "/benchmarks/" + name;
}

inline std::string micro_path(const std::string &name) {
    return source_dir() + "/tests/micro/" + name;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::shared_ptr<const Program> compile_or_die(const std::string &text,
                                                     const LowerOptions &opts = {}) {
    CompileResult res = compile_text(text, "<test>", opts);
    if (!res.ok()) throw std::runtime_error("compile failed:\n" + res.diags.format_all());
    return res.program;
}

inline Configuration initial_of(const std::string &text,
                                QueueDiscipline d = QueueDiscipline::Fifo,
                                bool gc = false, const LowerOptions &opts = {}) {
    return initial_configuration(compile_or_die(text, opts), d, gc);
}

// ---------------------------------------------------------------------------
// Exact (id-preserving) dump of a configuration. Two configurations are
// structurally identical iff their dumps are equal. Unlike canonical_key this
// keeps the real ids, so it distinguishes permuted twins.

inline std::string plain_text(const Configuration &c) {
    std::ostringstream o;
    o << "root p" << c.root_pid << " disc "
      << (c.discipline == QueueDiscipline::Fifo ? "fifo" : "bag");
    if (c.error)
        o << " error " << error_kind_name(c.error.kind) << " p" << c.error.pid;
    o << "\n";
    for (const auto &[pid, pr] : c.procs) {
        o << "p" << pid;
        if (pr.locked_by) o << " locked_by p" << *pr.locked_by;
        if (pr.waiting) o << " waiting";
        o << "\n";
        for (const auto &[oid, obj] : pr.objects) {
            o << "  o" << oid << " " << obj.cls;
            for (const Value &v : obj.attrs) o << " " << value_text(v);
            o << "\n";
        }
        for (const Request &r : pr.queue) {
            o << "  q " << r.method << " o" << r.target_oid
              << (r.is_query ? " query" : "") << " caller p" << r.caller;
            for (const Value &v : r.args) o << " " << value_text(v);
            o << "\n";
        }
        for (const Frame &f : pr.stack) {
            o << "  f " << f.graph->class_name << "::" << f.graph->method_name
              << " o" << f.target_oid << " n" << f.node;
            for (const Value &v : f.formals) o << " " << value_text(v);
            o << " |";
            for (const Value &v : f.locals) o << " " << value_text(v);
            o << " | " << value_text(f.result) << " locks";
            for (Pid l : f.locks) o << " p" << l;
            if (f.query_caller) o << " qc p" << *f.query_caller;
            o << "\n";
        }
    }
    return o.str();
}

// ---------------------------------------------------------------------------
// Id permutation. pmap must be a bijection over the configuration's pids;
// omaps[pid] (optional per processor) a bijection over that processor's oids.

using PidMap = std::map<Pid, Pid>;
using OidMaps = std::map<Pid, std::map<Oid, Oid>>;

inline Oid map_oid(const OidMaps &om, Pid owner, Oid o) {
    auto pi = om.find(owner);
    if (pi == om.end()) return o;
    auto oi = pi->second.find(o);
    return oi == pi->second.end() ? o : oi->second;
}

inline Value permute_value(const Value &v, const PidMap &pm, const OidMaps &om) {
    if (!v.is_ref()) return v;
    return Value::of_ref(pm.at(v.pid), map_oid(om, v.pid, v.oid));
}

inline Configuration permute_config(const Configuration &c, const PidMap &pm,
                                    const OidMaps &om = {}) {
    Configuration out;
    out.program = c.program;
    out.root_pid = pm.at(c.root_pid);
    out.discipline = c.discipline;
    out.gc = c.gc;
    out.error = c.error;
    if (out.error) out.error.pid = pm.at(c.error.pid);
    for (const auto &[pid, pr] : c.procs) {
        Processor np;
        np.id = pm.at(pid);
        if (pr.locked_by) np.locked_by = pm.at(*pr.locked_by);
        np.waiting = pr.waiting;
        for (const auto &[oid, obj] : pr.objects) {
            ObjectRec no = obj;
            for (Value &v : no.attrs) v = permute_value(v, pm, om);
            np.objects.emplace(map_oid(om, pid, oid), std::move(no));
        }
        for (const Request &r : pr.queue) {
            Request nr = r;
            nr.target_oid = map_oid(om, pid, r.target_oid);
            nr.caller = r.caller == 0 ? 0 : pm.at(r.caller);
            for (Value &v : nr.args) v = permute_value(v, pm, om);
            np.queue.push_back(std::move(nr));
        }
        for (const Frame &f : pr.stack) {
            Frame nf = f;
            nf.target_oid = map_oid(om, pid, f.target_oid);
            for (Value &v : nf.formals) v = permute_value(v, pm, om);
            for (Value &v : nf.locals) v = permute_value(v, pm, om);
            nf.result = permute_value(f.result, pm, om);
            nf.locks.clear();
            for (Pid l : f.locks) nf.locks.insert(pm.at(l));
            if (f.query_caller) nf.query_caller = pm.at(*f.query_caller);
            np.stack.push_back(std::move(nf));
        }
        out.procs.emplace(np.id, std::move(np));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force state-space enumerator. Plain worklist over full canonical-key
// strings; none of the explorer's digesting, predecessor bookkeeping, or
// verdict logic is reused. Detector outcomes are recomputed per state from
// the public detectors with the same priority order the verdicts use.

struct Enumerated {
    std::set<std::string> keys;
    std::size_t transitions = 0;
    std::size_t terminal = 0;
    std::map<std::string, std::size_t> violations; // check -> state count
    std::vector<Configuration> configs;            // kept when asked
};

inline Enumerated enumerate_space(const Configuration &initial, const CheckSet &checks = {},
                                  bool keep_configs = false) {
    Enumerated e;
    Configuration init = initial;
    stabilize(init);
    if (init.gc && !init.error) collect_garbage(init);

    std::deque<Configuration> work;
    e.keys.insert(canonical_key(init));
    work.push_back(std::move(init));

    while (!work.empty()) {
        Configuration cfg = std::move(work.front());
        work.pop_front();
        if (keep_configs) e.configs.push_back(cfg);

        std::vector<Firing> enabled = enabled_actions(cfg);

        if (checks.deadlock && detect_lock_cycle(cfg)) {
            ++e.violations["deadlock"];
        } else if (checks.stuck && detect_stuck(cfg)) {
            ++e.violations["stuck"];
        } else if (cfg.error) {
            if (cfg.error.kind == ErrorKind::VoidCall && checks.void_call)
                ++e.violations["void_call"];
            else if (cfg.error.kind == ErrorKind::Postcondition && checks.postcondition)
                ++e.violations["postcondition"];
            else if (cfg.error.kind == ErrorKind::RuntimeError)
                ++e.violations["runtime_error"];
        }

        if (enabled.empty() || cfg.error) {
            ++e.terminal;
            continue;
        }
        for (const Firing &f : enabled) {
            Configuration succ = fire(cfg, f);
            ++e.transitions;
            std::string key = canonical_key(succ);
            if (e.keys.insert(std::move(key)).second) work.push_back(std::move(succ));
        }
    }
    return e;
}

} // namespace cscoop::test
