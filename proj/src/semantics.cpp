#include "cscoop/semantics.hpp"

#include <cassert>

namespace cscoop {

namespace {

// ---------------------------------------------------------------------------
// Enabledness

// A lock action can go when every separate target is either self-handled,
// already ours, or free — and the guard, evaluated as if the locks were
// already held, says yes. Guard evaluation errors leave the action disabled:
// the processor blocks there and the stuck detector reports it.
bool lock_enabled(const Configuration &c, Pid pid, const Frame &f, const Action &a,
                  bool &void_target) {
    for (const auto &t : a.lock_targets) {
        EvalResult r = evaluate(c, pid, f, *t);
        if (!r.ok()) return false;
        if (r.value.is_void()) {
            void_target = true;
            return true; // fires straight into a void-call error
        }
        Pid h = r.value.pid;
        if (h == pid) continue;
        const Processor *target = c.find_proc(h);
        assert(target);
        if (target->locked_by && *target->locked_by != pid) return false;
        // A wait condition reads the targets' state the way a queued query
        // would: after everything already sent to them has run. Requiring
        // quiescence makes the direct read equivalent to that, so a guard can
        // never observe a half-applied command.
        if (a.guard && (!target->queue.empty() || !target->stack.empty())) return false;
    }
    if (a.guard) {
        EvalResult g = evaluate(c, pid, f, *a.guard);
        if (!g.ok() || !g.value.b) return false;
    }
    return true;
}

bool action_enabled(const Configuration &c, Pid pid, const Frame &f, const Action &a) {
    switch (a.kind) {
    case ActionKind::Lock: {
        bool void_target = false;
        return lock_enabled(c, pid, f, a, void_target);
    }
    case ActionKind::Branch: {
        EvalResult r = evaluate(c, pid, f, *a.cond);
        return r.ok() && r.value.b == a.expect;
    }
    case ActionKind::Command:
    case ActionKind::LocalCall:
    case ActionKind::Query: {
        EvalResult r = evaluate(c, pid, f, *a.target);
        return r.ok(); // Void targets fire into the void-call error
    }
    case ActionKind::Unlock:
    case ActionKind::Assign:
    case ActionKind::Create:
    case ActionKind::PostCheck:
    case ActionKind::Noop:
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Firing effects

void set_error(Configuration &c, ErrorKind kind, Pid pid, SourcePos pos, std::string detail) {
    c.error.kind = kind;
    c.error.pid = pid;
    c.error.pos = pos;
    c.error.detail = std::move(detail);
}

ErrorKind error_kind_for(EvalErrorKind k) {
    switch (k) {
    case EvalErrorKind::VoidAccess: return ErrorKind::VoidCall;
    case EvalErrorKind::PostconditionFailed: return ErrorKind::Postcondition;
    default: return ErrorKind::RuntimeError;
    }
}

// evaluates into `out`; on failure flags the configuration and returns false
bool eval_into(Configuration &c, Pid pid, const Frame &f, const IrExpr &e, Value &out) {
    EvalResult r = evaluate(c, pid, f, e);
    if (!r.ok()) {
        set_error(c, error_kind_for(r.err), pid, r.err_pos, r.detail);
        return false;
    }
    out = r.value;
    return true;
}

bool eval_args(Configuration &c, Pid pid, const Frame &f, const std::vector<IrExprPtr> &args,
               std::vector<Value> &out) {
    out.reserve(args.size());
    for (const auto &a : args) {
        Value v;
        if (!eval_into(c, pid, f, *a, v)) return false;
        out.push_back(v);
    }
    return true;
}

void write_place(Configuration &c, Pid pid, Frame &f, const Place &p, const Value &v) {
    if (p.is_attr) {
        ObjectRec *obj = c.find_object(pid, f.target_oid);
        assert(obj && p.attr_index < obj->attrs.size());
        obj->attrs[p.attr_index] = v;
        return;
    }
    switch (p.var.space) {
    case VarSpace::Local: f.locals[p.var.index] = v; break;
    case VarSpace::Formal: assert(false && "formals are read-only"); break;
    case VarSpace::ResultVar: f.result = v; break;
    }
}

ObjectRec blank_object(const Program &prog, const std::string &cls) {
    const ClassLayout *layout = prog.find_class(cls);
    assert(layout);
    ObjectRec obj;
    obj.cls = cls;
    for (const auto &a : layout->attributes) obj.attrs.push_back(default_value(a.type));
    return obj;
}

void apply_action(Configuration &c, Pid pid, const ActionEdge &edge) {
    Processor &proc = c.procs.at(pid);
    std::size_t frame_idx = proc.stack.size() - 1;
    auto frame = [&]() -> Frame & { return proc.stack[frame_idx]; };
    const Action &a = edge.action;

    switch (a.kind) {
    case ActionKind::Lock: {
        for (const auto &t : a.lock_targets) {
            Value v;
            if (!eval_into(c, pid, frame(), *t, v)) return;
            if (v.is_void()) {
                set_error(c, ErrorKind::VoidCall, pid, a.pos,
                          "lock target '" + ir_expr_text(*t) + "' is Void");
                return;
            }
            Pid h = v.pid;
            if (h == pid) continue;
            Processor &target = c.procs.at(h);
            if (target.locked_by) {
                assert(*target.locked_by == pid && "fired a disabled lock");
                continue; // already ours (reentrant); not this frame's to release
            }
            target.locked_by = pid;
            frame().locks.insert(h);
        }
        frame().node = edge.to;
        return;
    }
    case ActionKind::Unlock: {
        for (Pid h : frame().locks) {
            Processor &target = c.procs.at(h);
            assert(target.locked_by && *target.locked_by == pid);
            target.locked_by.reset();
        }
        frame().locks.clear();
        frame().node = edge.to;
        return;
    }
    case ActionKind::Branch:
    case ActionKind::Noop:
        frame().node = edge.to;
        return;
    case ActionKind::Assign: {
        Value v;
        if (!eval_into(c, pid, frame(), *a.src, v)) return;
        write_place(c, pid, frame(), a.dst, v);
        frame().node = edge.to;
        return;
    }
    case ActionKind::Create: {
        std::vector<Value> args;
        if (!eval_args(c, pid, frame(), a.args, args)) return;
        if (a.separate_create) {
            Pid npid = c.fresh_pid();
            Processor fresh;
            fresh.id = npid;
            fresh.objects[1] = blank_object(*c.program, a.cls);
            if (!a.method.empty()) {
                Request r;
                r.method = a.method;
                r.target_oid = 1;
                r.args = std::move(args);
                fresh.queue.push_back(std::move(r));
            }
            c.procs[npid] = std::move(fresh);
            write_place(c, pid, frame(), a.dst, Value::of_ref(npid, 1));
            frame().node = edge.to;
        } else {
            Processor &self = c.procs.at(pid);
            Oid oid = self.fresh_oid();
            self.objects[oid] = blank_object(*c.program, a.cls);
            write_place(c, pid, frame(), a.dst, Value::of_ref(pid, oid));
            frame().node = edge.to;
            if (!a.method.empty()) {
                const MethodGraph *g = c.program->find_method(a.cls, a.method);
                assert(g);
                self.stack.push_back(make_frame(g, oid, std::move(args)));
            }
        }
        return;
    }
    case ActionKind::Command:
    case ActionKind::LocalCall: {
        Value target;
        if (!eval_into(c, pid, frame(), *a.target, target)) return;
        if (target.is_void()) {
            set_error(c, ErrorKind::VoidCall, pid, a.pos,
                      "call '" + a.method + "' on Void target '" + ir_expr_text(*a.target) +
                          "'");
            return;
        }
        std::vector<Value> args;
        if (!eval_args(c, pid, frame(), a.args, args)) return;
        const ObjectRec *obj = c.find_object(target.pid, target.oid);
        assert(obj);
        const MethodGraph *g = c.program->find_method(obj->cls, a.method);
        assert(g);
        if (target.pid == pid) {
            // same handler: synchronous, runs on our own stack
            frame().node = edge.to;
            proc.stack.push_back(make_frame(g, target.oid, std::move(args)));
            return;
        }
        assert(a.kind == ActionKind::Command && "local call crossed processors");
        Processor &callee = c.procs.at(target.pid);
        assert(callee.locked_by && *callee.locked_by == pid && "command without the lock");
        Request r;
        r.method = a.method;
        r.target_oid = target.oid;
        r.args = std::move(args);
        callee.queue.push_back(std::move(r));
        frame().node = edge.to;
        return;
    }
    case ActionKind::Query: {
        Value target;
        if (!eval_into(c, pid, frame(), *a.target, target)) return;
        if (target.is_void()) {
            set_error(c, ErrorKind::VoidCall, pid, a.pos,
                      "query '" + a.method + "' on Void target '" + ir_expr_text(*a.target) +
                          "'");
            return;
        }
        if (target.pid == pid) {
            // dynamically our own object: evaluate in place
            IrExpr probe;
            probe.kind = IrExprKind::QueryInline;
            probe.pos = a.pos;
            probe.target = clone_ir_expr(*a.target);
            probe.cls = a.cls;
            probe.method = a.method;
            for (const auto &arg : a.args) probe.args.push_back(clone_ir_expr(*arg));
            Value v;
            if (!eval_into(c, pid, frame(), probe, v)) return;
            write_place(c, pid, frame(), a.dst, v);
            frame().node = edge.to;
            return;
        }
        std::vector<Value> args;
        if (!eval_args(c, pid, frame(), a.args, args)) return;
        Processor &callee = c.procs.at(target.pid);
        assert(callee.locked_by && *callee.locked_by == pid && "query without the lock");
        Request r;
        r.method = a.method;
        r.target_oid = target.oid;
        r.args = std::move(args);
        r.is_query = true;
        r.caller = pid;
        callee.queue.push_back(std::move(r));
        proc.waiting = a.dst;
        frame().node = edge.to;
        return;
    }
    case ActionKind::PostCheck: {
        Value v;
        if (!eval_into(c, pid, frame(), *a.cond, v)) return;
        if (!v.b) {
            set_error(c, ErrorKind::Postcondition, pid, a.pos,
                      "postcondition of " + frame().graph->class_name +
                          "::" + frame().graph->method_name + " violated");
            return;
        }
        frame().node = edge.to;
        return;
    }
    }
}

} // namespace

// ---------------------------------------------------------------------------

std::vector<Firing> enabled_actions(const Configuration &c) {
    std::vector<Firing> out;
    if (c.error) return out;
    for (const auto &[pid, proc] : c.procs) {
        if (proc.idle() || proc.waiting) continue;
        const Frame &f = proc.active();
        for (std::size_t idx : f.graph->out(f.node)) {
            if (action_enabled(c, pid, f, f.graph->edges[idx].action)) {
                Firing fr;
                fr.kind = Firing::Kind::Action;
                fr.pid = pid;
                fr.edge_index = idx;
                out.push_back(fr);
            }
        }
    }
    if (c.discipline == QueueDiscipline::Bag) {
        for (const auto &[pid, proc] : c.procs) {
            if (!proc.idle() || proc.queue.size() < 2) continue;
            for (std::size_t qi = 0; qi < proc.queue.size(); ++qi) {
                Firing fr;
                fr.kind = Firing::Kind::Dequeue;
                fr.pid = pid;
                fr.queue_index = qi;
                out.push_back(fr);
            }
        }
    }
    return out;
}

namespace {

void start_request(Configuration &c, Processor &proc, std::size_t queue_index) {
    Request r = std::move(proc.queue[queue_index]);
    proc.queue.erase(proc.queue.begin() + static_cast<std::ptrdiff_t>(queue_index));
    const ObjectRec *obj = c.find_object(proc.id, r.target_oid);
    assert(obj);
    const MethodGraph *g = c.program->find_method(obj->cls, r.method);
    assert(g);
    Frame f = make_frame(g, r.target_oid, std::move(r.args));
    if (r.is_query) f.query_caller = r.caller;
    proc.stack.push_back(std::move(f));
}

} // namespace

void stabilize(Configuration &c, const std::vector<Pid> *scan_order) {
    std::vector<Pid> order;
    if (scan_order) {
        order = *scan_order;
    } else {
        for (const auto &[pid, proc] : c.procs) order.push_back(pid);
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (Pid pid : order) {
            Processor *proc = c.find_proc(pid);
            if (!proc) continue;

            // finished frame: write back a query result, then drop the frame
            if (!proc->idle() && !proc->waiting && proc->active().at_final()) {
                Frame done = std::move(proc->active());
                proc->stack.pop_back();
                assert(done.locks.empty() && "frame finished while holding locks");
                if (done.query_caller) {
                    Processor &caller = c.procs.at(*done.query_caller);
                    assert(caller.waiting && !caller.idle());
                    write_place(c, caller.id, caller.active(), *caller.waiting, done.result);
                    caller.waiting.reset();
                }
                changed = true;
            }

            // idle processor takes the next request when that is unambiguous
            proc = c.find_proc(pid);
            if (proc && proc->idle() && !proc->queue.empty()) {
                bool forced = c.discipline == QueueDiscipline::Fifo || proc->queue.size() == 1;
                if (forced) {
                    start_request(c, *proc, 0);
                    changed = true;
                }
            }
        }
        // new processors never appear during stabilization, so `order` stays
        // complete across rounds
    }
}

Configuration fire(const Configuration &c, const Firing &f) {
    Configuration next = c;
    if (f.kind == Firing::Kind::Dequeue) {
        Processor &proc = next.procs.at(f.pid);
        assert(proc.idle() && f.queue_index < proc.queue.size());
        start_request(next, proc, f.queue_index);
    } else {
        const Processor &proc = next.procs.at(f.pid);
        assert(!proc.idle());
        const MethodGraph *g = proc.active().graph;
        assert(f.edge_index < g->edges.size());
        apply_action(next, f.pid, g->edges[f.edge_index]);
    }
    stabilize(next);
    if (next.gc && !next.error) collect_garbage(next);
    return next;
}

std::vector<std::pair<Firing, Configuration>> macro_step(const Configuration &c) {
    std::vector<std::pair<Firing, Configuration>> out;
    for (const Firing &f : enabled_actions(c)) out.emplace_back(f, fire(c, f));
    return out;
}

std::string firing_text(const Configuration &c, const Firing &f) {
    std::string s = "p" + std::to_string(f.pid) + ": ";
    if (f.kind == Firing::Kind::Dequeue) {
        const Processor *proc = c.find_proc(f.pid);
        s += "dequeue #" + std::to_string(f.queue_index);
        if (proc && f.queue_index < proc->queue.size())
            s += " (" + proc->queue[f.queue_index].method + ")";
        return s;
    }
    const Processor *proc = c.find_proc(f.pid);
    if (proc && !proc->idle()) {
        const MethodGraph *g = proc->active().graph;
        s += g->class_name + "::" + g->method_name + " ";
        if (f.edge_index < g->edges.size()) s += g->edges[f.edge_index].action.label();
    }
    return s;
}

} // namespace cscoop
