#include "cscoop/explorer.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

#include <sys/resource.h>

namespace cscoop {

// ---------------------------------------------------------------------------
// Detectors

std::optional<std::vector<Pid>> detect_lock_cycle(const Configuration &c) {
    // wait-for edges
    std::map<Pid, std::vector<Pid>> waits;
    for (const auto &[pid, proc] : c.procs) {
        if (proc.idle()) continue;
        if (proc.waiting) {
            // find the processor that owes this one a query result
            for (const auto &[qpid, qproc] : c.procs) {
                bool owes = false;
                for (const Request &r : qproc.queue)
                    if (r.is_query && r.caller == pid) owes = true;
                for (const Frame &f : qproc.stack)
                    if (f.query_caller && *f.query_caller == pid) owes = true;
                if (owes) waits[pid].push_back(qpid);
            }
            continue;
        }
        const Frame &f = proc.active();
        for (std::size_t idx : f.graph->out(f.node)) {
            const Action &a = f.graph->edges[idx].action;
            if (a.kind != ActionKind::Lock) continue;
            for (const auto &t : a.lock_targets) {
                EvalResult r = evaluate(c, pid, f, *t);
                if (!r.ok() || !r.value.is_ref()) continue;
                Pid h = r.value.pid;
                if (h == pid) continue;
                const Processor *target = c.find_proc(h);
                if (target && target->locked_by && *target->locked_by != pid)
                    waits[pid].push_back(*target->locked_by);
            }
        }
    }

    // cycle search (iterative DFS with colors)
    std::map<Pid, int> color; // 0 white, 1 on stack, 2 done
    for (const auto &[start, _] : waits) {
        if (color[start]) continue;
        std::vector<std::pair<Pid, std::size_t>> stack{{start, 0}};
        std::vector<Pid> path{start};
        color[start] = 1;
        while (!stack.empty()) {
            auto &[pid, next] = stack.back();
            const auto &out = waits[pid];
            if (next >= out.size()) {
                color[pid] = 2;
                stack.pop_back();
                path.pop_back();
                continue;
            }
            Pid to = out[next++];
            if (color[to] == 1) {
                // found: slice the cycle out of the current path
                std::vector<Pid> cycle;
                auto it = std::find(path.begin(), path.end(), to);
                for (; it != path.end(); ++it) cycle.push_back(*it);
                cycle.push_back(to);
                return cycle;
            }
            if (color[to] == 0) {
                color[to] = 1;
                stack.push_back({to, 0});
                path.push_back(to);
            }
        }
    }
    return std::nullopt;
}

bool detect_void_call(const Configuration &c) { return c.error.kind == ErrorKind::VoidCall; }

bool detect_stuck(const Configuration &c) {
    if (c.error || c.terminated()) return false;
    return enabled_actions(c).empty();
}

// ---------------------------------------------------------------------------
// Replay and traces

Configuration replay(const Configuration &initial, const std::vector<Firing> &firings) {
    Configuration c = initial;
    stabilize(c);
    for (const Firing &f : firings) c = fire(c, f);
    return c;
}

Trace reconstruct_trace(const Configuration &initial, const PredecessorTable &preds,
                        std::uint32_t target) {
    std::vector<Firing> firings;
    for (std::uint32_t id = target; id != 0;) {
        const auto &[prev, firing] = preds.entries[id];
        firings.push_back(firing);
        id = prev;
    }
    std::reverse(firings.begin(), firings.end());

    Trace t;
    Configuration c = initial;
    stabilize(c);
    for (const Firing &f : firings) {
        t.steps.push_back(make_trace_step(c, f));
        c = fire(c, f);
    }
    return t;
}

TraceStep make_trace_step(const Configuration &c, const Firing &f) {
    TraceStep step;
    step.firing = f;
    step.text = firing_text(c, f);
    step.pid = f.pid;
    const Processor *proc = c.find_proc(f.pid);
    if (f.kind == Firing::Kind::Dequeue) {
        step.action = "dequeue #" + std::to_string(f.queue_index);
        if (proc && f.queue_index < proc->queue.size())
            step.method = proc->queue[f.queue_index].method;
    } else if (proc && !proc->idle()) {
        const MethodGraph *g = proc->active().graph;
        step.method = g->class_name + "::" + g->method_name;
        if (f.edge_index < g->edges.size()) {
            step.action = g->edges[f.edge_index].action.label();
            step.pos = g->edges[f.edge_index].action.pos;
        }
    }
    return step;
}

std::string format_trace(const Trace &trace, const std::string &check,
                         const std::string &detail, const std::string &path,
                         std::uint64_t fingerprint) {
    std::ostringstream out;
    out << "# counterexample: " << check << '\n';
    out << "# program: " << std::hex << fingerprint << std::dec << '\n';
    out << "# steps: " << trace.steps.size() << '\n';
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep &s = trace.steps[i];
        out << i << '\t' << 'p' << s.pid << '\t' << s.action << '\t' << s.method << '\t';
        if (s.pos.known())
            out << path << ':' << s.pos.line;
        else
            out << '-';
        out << '\n';
    }
    if (!detail.empty()) out << "# final: " << detail << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Exploration

namespace {

// 128-bit key digest; full keys are too large to keep for big spaces, and two
// independent 64-bit FNV streams make accidental collisions irrelevant.
std::pair<std::uint64_t, std::uint64_t> digest(const std::string &key) {
    std::uint64_t h1 = 0xcbf29ce484222325ull;
    std::uint64_t h2 = 0x84222325cbf29ce4ull;
    for (unsigned char ch : key) {
        h1 = (h1 ^ ch) * 0x100000001b3ull;
        h2 = (h2 ^ ch) * 0x100000001b3ull;
        h2 ^= h2 >> 29;
    }
    return {h1, h2};
}

// Entity/relation counts of one configuration, reported in the statistics
// as start/final graph sizes.
std::pair<std::size_t, std::size_t> graph_size(const Configuration &c) {
    std::size_t nodes = 0, edges = 0;
    for (const auto &[pid, proc] : c.procs) {
        nodes += 1 + proc.objects.size() + proc.stack.size() + proc.queue.size();
        edges += proc.objects.size() + proc.queue.size(); // handler, queued
        for (const Frame &f : proc.stack) edges += 1 + f.locks.size(); // state, locks
    }
    return {nodes, edges};
}

struct Detection {
    std::string check;
    std::string detail;
};

// Highest-priority property violated by this configuration, honoring the
// enabled check set. Deadlock outranks everything, then stuck, then the
// error flags; runtime faults are always reported.
std::optional<Detection> detect(const Configuration &c, const CheckSet &checks,
                                const std::vector<Firing> &enabled) {
    std::optional<std::vector<Pid>> cycle;
    if (checks.deadlock) {
        cycle = detect_lock_cycle(c);
        if (cycle) {
            std::string d = "lock cycle ";
            for (std::size_t i = 0; i < cycle->size(); ++i) {
                if (i) d += " -> ";
                d += "p" + std::to_string((*cycle)[i]);
            }
            return Detection{"deadlock", d};
        }
    }
    if (checks.stuck && !c.error && enabled.empty() && !c.terminated())
        return Detection{"stuck", "no action enabled and the system has not terminated"};
    if (c.error) {
        std::string d = c.error.detail + " (p" + std::to_string(c.error.pid);
        if (c.error.pos.known())
            d += ", line " + std::to_string(c.error.pos.line);
        d += ")";
        switch (c.error.kind) {
        case ErrorKind::VoidCall:
            if (checks.void_call) return Detection{"void_call", d};
            break;
        case ErrorKind::Postcondition:
            if (checks.postcondition) return Detection{"postcondition", d};
            break;
        case ErrorKind::RuntimeError:
            return Detection{"runtime_error", d};
        case ErrorKind::None:
            break;
        }
    }
    return std::nullopt;
}

} // namespace

ExploreResult explore(const Configuration &initial, const ExploreOptions &options) {
    auto t0 = std::chrono::steady_clock::now();
    ExploreResult res;
    StateSpace &space = res.space;

    Configuration init = initial;
    stabilize(init);
    if (init.gc && !init.error) collect_garbage(init);
    std::tie(space.start_graph_nodes, space.start_graph_edges) = graph_size(init);

    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t> seen;
    PredecessorTable preds;
    std::deque<std::tuple<std::uint32_t, std::size_t, Configuration>> frontier;

    std::optional<std::uint32_t> violating_id;
    std::optional<Detection> violation;
    std::optional<Configuration> violating_config;

    {
        std::string ck = canonical_key(init);
        if (options.collect_keys) options.collect_keys->push_back(ck);
        seen.emplace(digest(ck), 0);
        preds.entries.push_back({0, Firing{}});
        if (options.record_graph) {
            StateNode n;
            n.initial = true;
            space.nodes.push_back(n);
        }
        frontier.emplace_back(0, 0, std::move(init));
    }
    space.num_states = 1;

    std::size_t cut_off = 0; // states at the depth bound with unexplored successors
    bool early_stop = false;
    while (!frontier.empty()) {
        space.peak_frontier = std::max(space.peak_frontier, frontier.size());
        auto [id, depth, cfg] = std::move(frontier.front());
        frontier.pop_front();

        std::vector<Firing> enabled = enabled_actions(cfg);
        std::optional<Detection> det = detect(cfg, options.checks, enabled);
        if (det && !violation) {
            violation = det;
            violating_id = id;
            violating_config = cfg;
            if (options.record_graph) {
                space.nodes[id].violating = true;
                space.nodes[id].note = det->check;
            }
            if (options.stop_at_first) {
                early_stop = true;
                break;
            }
        } else if (det && options.record_graph) {
            space.nodes[id].violating = true;
            space.nodes[id].note = det->check;
        }

        if (enabled.empty() || cfg.error) {
            // execution is undefined past an error; treat as terminal
            ++space.terminal_states;
            if (options.record_graph) space.nodes[id].terminal = true;
            if (space.terminal_states == 1)
                std::tie(space.final_graph_nodes, space.final_graph_edges) =
                    graph_size(cfg);
            continue;
        }

        if (options.bound && depth >= options.bound) {
            // within the depth budget but its successors are not
            ++cut_off;
            continue;
        }

        for (const Firing &f : enabled) {
            Configuration succ = fire(cfg, f);
            ++space.num_transitions;
            std::string label;
            if (options.record_graph) label = firing_text(cfg, f);
            std::string succ_ck = canonical_key(succ);
            auto succ_key = digest(succ_ck);
            auto it = seen.find(succ_key);
            std::uint32_t succ_id;
            if (it != seen.end()) {
                succ_id = it->second;
            } else {
                succ_id = static_cast<std::uint32_t>(preds.entries.size());
                if (options.collect_keys) options.collect_keys->push_back(succ_ck);
                seen.emplace(succ_key, succ_id);
                preds.entries.push_back({id, f});
                if (options.record_graph) {
                    StateNode n;
                    n.id = succ_id;
                    space.nodes.push_back(n);
                }
                ++space.num_states;
                frontier.emplace_back(succ_id, depth + 1, std::move(succ));
            }
            if (options.record_graph) space.edges.push_back({id, succ_id, label});
        }
    }

    space.complete = frontier.empty() && cut_off == 0 && !early_stop;
    space.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        struct rusage ru {};
        if (getrusage(RUSAGE_SELF, &ru) == 0)
            space.peak_rss_kb = static_cast<std::size_t>(ru.ru_maxrss);
    }

    if (violation) {
        res.verdict.kind = VerdictKind::Violation;
        ViolationInfo info;
        info.check = violation->check;
        info.detail = violation->detail;
        info.trace = reconstruct_trace(initial, preds, *violating_id);
        info.final_config = std::move(*violating_config);
        res.verdict.violation = std::move(info);
    } else if (cut_off > 0) {
        res.verdict.kind = VerdictKind::BoundReached;
        res.verdict.frontier = cut_off;
    } else {
        res.verdict.kind = VerdictKind::Safe;
    }
    return res;
}

} // namespace cscoop
