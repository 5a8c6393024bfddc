#include "cscoop/runtime.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>

// The key must be identical for configurations that differ only in the raw
// numeric values of processor and object ids. Strategy: serialize along a
// breadth-first traversal that starts at the root processor and names ids in
// first-encounter order, so raw ids never reach the output. A processor's
// component includes the objects it handles: they are appended in the order
// of their trial serializations (serialize the candidate with a throwaway
// naming, smallest string first), because oid order is an allocation artifact.
// Processors unreachable from the root component (their creator dropped the
// reference) are drained the same way. Ties between trial serializations mean
// the candidates' whole components are indistinguishable, so either choice
// yields the same bytes.

namespace cscoop {

namespace {

struct Name {
    char prefix = 'P';
    int num = 0;

    bool operator<(const Name &o) const {
        if (prefix != o.prefix) return prefix < o.prefix;
        return num < o.num;
    }
    std::string text() const { return std::string(1, prefix) + std::to_string(num); }
};

struct Naming {
    std::map<Pid, Name> pids;
    std::map<std::pair<Pid, Oid>, Name> objs;
    std::map<Pid, int> obj_next; // per-processor object counter
    int pid_next = 1;
    char fresh_prefix = 'P';
};

struct Item {
    bool is_obj = false;
    Pid pid = 0;
    Oid oid = 0;
};

std::string trial_signature(const Configuration &c, const Naming &base, Item start);

class Writer {
public:
    Writer(const Configuration &c, Naming &naming, std::string &out)
        : c_(c), n_(naming), out_(out) {}

    void component(Item start) {
        if (start.is_obj)
            ref_obj(start.pid, start.oid);
        else
            ref_pid(start.pid);
        while (!work_.empty()) {
            Item it = work_.front();
            work_.pop_front();
            if (it.is_obj)
                emit_obj(it.pid, it.oid);
            else
                emit_proc(it.pid);
        }
    }

private:
    const Configuration &c_;
    Naming &n_;
    std::string &out_;
    std::deque<Item> work_;

    Name ref_pid(Pid p) {
        auto it = n_.pids.find(p);
        if (it != n_.pids.end()) return it->second;
        Name name{n_.fresh_prefix, n_.pid_next++};
        n_.pids[p] = name;
        work_.push_back(Item{false, p, 0});
        return name;
    }

    Name ref_obj(Pid p, Oid o) {
        ref_pid(p);
        auto key = std::make_pair(p, o);
        auto it = n_.objs.find(key);
        if (it != n_.objs.end()) return it->second;
        Name name{'o', ++n_.obj_next[p]};
        n_.objs[key] = name;
        work_.push_back(Item{true, p, o});
        return name;
    }

    void value(const Value &v) {
        switch (v.kind) {
        case Value::Kind::Void: out_ += 'V'; break;
        case Value::Kind::Int:
            out_ += 'I';
            out_ += std::to_string(v.i);
            break;
        case Value::Kind::Bool: out_ += v.b ? "B1" : "B0"; break;
        case Value::Kind::Ref:
            out_ += 'R';
            out_ += ref_pid(v.pid).text();
            out_ += '.';
            out_ += ref_obj(v.pid, v.oid).text();
            break;
        }
        out_ += ' ';
    }

    void place(const Place &p) {
        if (p.is_attr) {
            out_ += 'a' + std::to_string(p.attr_index);
        } else {
            out_ += 'v';
            out_ += std::to_string(static_cast<int>(p.var.space));
            out_ += ':' + std::to_string(p.var.index);
        }
    }

    void emit_proc(Pid pid) {
        const Processor *proc = c_.find_proc(pid);
        assert(proc);
        out_ += "proc ";
        out_ += n_.pids[pid].text();
        out_ += '{';
        for (const Frame &f : proc->stack) {
            out_ += "f{";
            out_ += f.graph->class_name;
            out_ += "::";
            out_ += f.graph->method_name;
            out_ += " n" + std::to_string(f.node) + " t";
            out_ += ref_obj(pid, f.target_oid).text();
            out_ += " F[";
            for (const Value &v : f.formals) value(v);
            out_ += "]L[";
            for (const Value &v : f.locals) value(v);
            out_ += "]r";
            value(f.result);
            out_ += "K[";
            std::vector<Name> locks;
            for (Pid l : f.locks) locks.push_back(ref_pid(l));
            std::sort(locks.begin(), locks.end());
            for (const Name &l : locks) {
                out_ += l.text();
                out_ += ' ';
            }
            out_ += "]c";
            out_ += f.query_caller ? ref_pid(*f.query_caller).text() : "-";
            out_ += '}';
        }
        out_ += '|';
        for (const Request &r : proc->queue) {
            out_ += "q{";
            out_ += r.method;
            out_ += " t";
            out_ += ref_obj(pid, r.target_oid).text();
            out_ += " A[";
            for (const Value &v : r.args) value(v);
            out_ += r.is_query ? "]Q c" : "]C c";
            out_ += r.caller ? ref_pid(r.caller).text() : "-";
            out_ += '}';
        }
        out_ += "|k";
        out_ += proc->locked_by ? ref_pid(*proc->locked_by).text() : "-";
        out_ += "|w";
        if (proc->waiting)
            place(*proc->waiting);
        else
            out_ += '-';
        out_ += "}\n";

        // the memory region: handled objects the record above did not already
        // name, in trial-signature order (oid order is an allocation artifact)
        for (;;) {
            std::vector<Oid> todo;
            for (const auto &[oid, obj] : proc->objects)
                if (!n_.objs.count({pid, oid})) todo.push_back(oid);
            if (todo.empty()) break;
            Oid pick = todo.front();
            if (todo.size() > 1) {
                std::string best_sig;
                for (Oid cand : todo) {
                    std::string sig = trial_signature(c_, n_, Item{true, pid, cand});
                    if (best_sig.empty() || sig < best_sig) {
                        best_sig = std::move(sig);
                        pick = cand;
                    }
                }
            }
            ref_obj(pid, pick);
        }
    }

    void emit_obj(Pid pid, Oid oid) {
        const ObjectRec *obj = c_.find_object(pid, oid);
        assert(obj);
        out_ += "obj ";
        out_ += n_.pids[pid].text();
        out_ += '.';
        out_ += n_.objs[{pid, oid}].text();
        out_ += ' ';
        out_ += obj->cls;
        out_ += '[';
        for (const Value &v : obj->attrs) value(v);
        out_ += "]\n";
    }
};

std::string trial_signature(const Configuration &c, const Naming &base, Item start) {
    Naming scratch = base;
    scratch.fresh_prefix = 'T';
    std::string sig;
    Writer w(c, scratch, sig);
    w.component(start);
    return sig;
}

// Picks unnamed items in trial-signature order and serializes them for real.
template <typename Candidates>
void drain(const Configuration &c, Naming &naming, std::string &out, Candidates candidates) {
    for (;;) {
        std::vector<Item> todo = candidates();
        if (todo.empty()) return;
        Item best = todo.front();
        if (todo.size() > 1) {
            std::string best_sig;
            for (const Item &cand : todo) {
                std::string sig = trial_signature(c, naming, cand);
                if (best_sig.empty() || sig < best_sig) {
                    best_sig = std::move(sig);
                    best = cand;
                }
            }
        }
        Writer w(c, naming, out);
        w.component(best);
    }
}

} // namespace

std::string canonical_key(const Configuration &c) {
    std::string out = "v1 ";
    {
        std::ostringstream fp;
        fp << std::hex << c.program->fingerprint;
        out += fp.str();
    }
    out += '\n';

    Naming naming;
    Writer root(c, naming, out);
    root.component(Item{false, c.root_pid, 0});

    // processors unreachable from the root component; their objects ride
    // along, so after this everything is named
    drain(c, naming, out, [&] {
        std::vector<Item> v;
        for (const auto &[pid, proc] : c.procs)
            if (!naming.pids.count(pid)) v.push_back(Item{false, pid, 0});
        return v;
    });

    out += "err ";
    out += std::to_string(static_cast<int>(c.error.kind));
    if (c.error) {
        out += ' ';
        auto it = naming.pids.find(c.error.pid);
        out += it != naming.pids.end() ? it->second.text() : "?";
        out += ' ' + std::to_string(c.error.pos.line) + ':' +
               std::to_string(c.error.pos.column);
        out += ' ' + c.error.detail;
    }
    return out;
}

// ---------------------------------------------------------------------------
// validate

namespace {

struct Validator {
    const Configuration &c;
    std::vector<std::string> problems;

    void note(std::string msg) { problems.push_back(std::move(msg)); }

    bool ref_ok(const Value &v) {
        if (!v.is_ref()) return true;
        const ObjectRec *obj = c.find_object(v.pid, v.oid);
        if (!obj) {
            note("dangling reference " + value_text(v));
            return false;
        }
        return true;
    }

    void run() {
        if (!c.program) {
            note("configuration has no program");
            return;
        }
        if (!c.find_proc(c.root_pid))
            note("root processor p" + std::to_string(c.root_pid) + " missing");

        std::map<Pid, Pid> lock_holders; // target -> holder (from frame lock sets)
        for (const auto &[pid, proc] : c.procs) {
            if (proc.id != pid) note("processor map key/id mismatch");
            check_proc(pid, proc, lock_holders);
        }

        // lock bookkeeping must match in both directions
        for (const auto &[target, holder] : lock_holders) {
            const Processor *t = c.find_proc(target);
            if (!t) {
                note("lock on missing processor p" + std::to_string(target));
                continue;
            }
            if (!t->locked_by)
                note("p" + std::to_string(holder) + " holds a lock on p" +
                     std::to_string(target) + " which believes it is free");
            else if (*t->locked_by != holder)
                note("p" + std::to_string(target) + " records locker p" +
                     std::to_string(*t->locked_by) + " but p" + std::to_string(holder) +
                     " holds it too: multiple lockers");
        }
        for (const auto &[pid, proc] : c.procs) {
            if (proc.locked_by && !lock_holders.count(pid))
                note("p" + std::to_string(pid) + " marked locked by p" +
                     std::to_string(*proc.locked_by) + " but no frame holds that lock");
        }
    }

    void check_proc(Pid pid, const Processor &proc, std::map<Pid, Pid> &lock_holders) {
        const std::string pname = "p" + std::to_string(pid);
        for (const auto &[oid, obj] : proc.objects) {
            const ClassLayout *layout = c.program->find_class(obj.cls);
            if (!layout) {
                note(pname + ": object of unknown class " + obj.cls);
                continue;
            }
            if (obj.attrs.size() != layout->attributes.size())
                note(pname + ": object o" + std::to_string(oid) + " has " +
                     std::to_string(obj.attrs.size()) + " attributes, class " + obj.cls +
                     " declares " + std::to_string(layout->attributes.size()));
            for (const Value &v : obj.attrs) ref_ok(v);
        }

        for (const Frame &f : proc.stack) {
            if (!f.graph) {
                note(pname + ": frame without a method graph");
                continue;
            }
            const MethodGraph *g =
                c.program->find_method(f.graph->class_name, f.graph->method_name);
            if (g != f.graph)
                note(pname + ": frame method " + f.graph->class_name +
                     "::" + f.graph->method_name + " is not part of the program");
            if (!c.find_object(pid, f.target_oid))
                note(pname + ": frame target o" + std::to_string(f.target_oid) +
                     " not handled here");
            if (f.node < 0 || f.node >= f.graph->node_count)
                note(pname + ": frame at node " + std::to_string(f.node) + " outside " +
                     f.graph->method_name);
            if (f.formals.size() != f.graph->formals.size())
                note(pname + ": frame formal count mismatch in " + f.graph->method_name);
            if (f.locals.size() != f.graph->locals.size())
                note(pname + ": frame local count mismatch in " + f.graph->method_name);
            for (const Value &v : f.formals) ref_ok(v);
            for (const Value &v : f.locals) ref_ok(v);
            ref_ok(f.result);
            for (Pid l : f.locks) {
                auto [it, fresh] = lock_holders.emplace(l, pid);
                if (!fresh)
                    note("lock on p" + std::to_string(l) + " held by both p" +
                         std::to_string(it->second) + " and " + pname +
                         ": multiple lockers");
            }
            if (f.query_caller) {
                const Processor *caller = c.find_proc(*f.query_caller);
                if (!caller)
                    note(pname + ": query frame for missing caller p" +
                         std::to_string(*f.query_caller));
                else if (!caller->waiting)
                    note(pname + ": query frame for p" + std::to_string(*f.query_caller) +
                         " which is not waiting");
            }
        }

        for (const Request &r : proc.queue) {
            if (!c.find_object(pid, r.target_oid))
                note(pname + ": queued request '" + r.method + "' targets missing object o" +
                     std::to_string(r.target_oid));
            for (const Value &v : r.args) ref_ok(v);
            if (r.is_query) {
                if (!r.caller) {
                    note(pname + ": queued query '" + r.method + "' has no caller");
                } else {
                    const Processor *caller = c.find_proc(r.caller);
                    if (!caller)
                        note(pname + ": queued query for missing caller p" +
                             std::to_string(r.caller));
                    else if (!caller->waiting)
                        note(pname + ": queued query for p" + std::to_string(r.caller) +
                             " which is not waiting");
                }
            }
        }

        if (proc.waiting && proc.idle())
            note(pname + " waits for a query result without an active frame");
        if (proc.waiting && !proc.idle()) {
            const Frame &f = proc.active();
            if (!proc.waiting->is_attr && proc.waiting->var.space == VarSpace::Local &&
                proc.waiting->var.index >= f.locals.size())
                note(pname + " waiting destination is out of range");
        }
    }
};

} // namespace

std::vector<std::string> validate(const Configuration &c) {
    Validator v{c, {}};
    v.run();
    return std::move(v.problems);
}

} // namespace cscoop
