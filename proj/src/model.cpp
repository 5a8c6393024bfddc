#include "cscoop/runtime.hpp"

#include <cassert>

namespace cscoop {

std::string value_text(const Value &v) {
    switch (v.kind) {
    case Value::Kind::Void: return "Void";
    case Value::Kind::Int: return std::to_string(v.i);
    case Value::Kind::Bool: return v.b ? "true" : "false";
    case Value::Kind::Ref:
        return "p" + std::to_string(v.pid) + ".o" + std::to_string(v.oid);
    }
    return "?";
}

Value default_value(const DeclaredType &t) {
    switch (t.base) {
    case BaseType::Integer: return Value::of_int(0);
    case BaseType::Boolean: return Value::of_bool(false);
    case BaseType::Reference: return Value::void_value();
    }
    return Value::void_value();
}

const char *error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::None: return "none";
    case ErrorKind::VoidCall: return "void_call";
    case ErrorKind::Postcondition: return "postcondition";
    case ErrorKind::RuntimeError: return "runtime_error";
    }
    return "?";
}

bool Configuration::terminated() const {
    for (const auto &[pid, proc] : procs) {
        if (!proc.idle() || !proc.queue.empty() || proc.waiting) return false;
    }
    return true;
}

Frame make_frame(const MethodGraph *graph, Oid target, std::vector<Value> args) {
    assert(graph);
    assert(args.size() == graph->formals.size());
    Frame f;
    f.graph = graph;
    f.target_oid = target;
    f.node = graph->entry;
    f.formals = std::move(args);
    f.locals.reserve(graph->locals.size());
    for (const auto &l : graph->locals) f.locals.push_back(default_value(l.type));
    if (graph->result_type) f.result = default_value(*graph->result_type);
    return f;
}

Configuration initial_configuration(std::shared_ptr<const Program> program,
                                    QueueDiscipline discipline, bool gc) {
    assert(program);
    Configuration c;
    c.program = std::move(program);
    c.discipline = discipline;
    c.gc = gc;
    c.root_pid = 1;

    const ClassLayout *layout = c.program->find_class(c.program->root_class);
    const MethodGraph *make = c.program->find_method(c.program->root_class, "make");
    assert(layout && make && "program must have a checked root class");

    Processor proc;
    proc.id = 1;
    ObjectRec root;
    root.cls = c.program->root_class;
    for (const auto &a : layout->attributes) root.attrs.push_back(default_value(a.type));
    proc.objects[1] = std::move(root);
    proc.stack.push_back(make_frame(make, 1, {}));
    c.procs[1] = std::move(proc);
    return c;
}

// ---------------------------------------------------------------------------
// Garbage collection. Objects are live when reachable from any frame slot,
// queued request, or live object attribute. Processors are live when they
// have work (stack, queue), participate in locking, hold a live object, or
// are the root.

void collect_garbage(Configuration &c) {
    // (pid, oid) reachability
    std::set<std::pair<Pid, Oid>> live;
    std::vector<std::pair<Pid, Oid>> work;
    auto mark = [&](const Value &v) {
        if (v.is_ref() && live.insert({v.pid, v.oid}).second) work.push_back({v.pid, v.oid});
    };

    for (const auto &[pid, proc] : c.procs) {
        for (const Frame &f : proc.stack) {
            mark(Value::of_ref(pid, f.target_oid));
            for (const Value &v : f.formals) mark(v);
            for (const Value &v : f.locals) mark(v);
            mark(f.result);
        }
        for (const Request &r : proc.queue) {
            mark(Value::of_ref(pid, r.target_oid));
            for (const Value &v : r.args) mark(v);
        }
    }

    while (!work.empty()) {
        auto [pid, oid] = work.back();
        work.pop_back();
        const ObjectRec *obj = c.find_object(pid, oid);
        if (!obj) continue;
        for (const Value &v : obj->attrs) mark(v);
    }

    std::set<Pid> lock_involved;
    for (const auto &[pid, proc] : c.procs) {
        if (proc.locked_by) {
            lock_involved.insert(pid);
            lock_involved.insert(*proc.locked_by);
        }
        for (const Frame &f : proc.stack)
            for (Pid l : f.locks) lock_involved.insert(l);
    }

    for (auto it = c.procs.begin(); it != c.procs.end();) {
        Processor &proc = it->second;
        for (auto oit = proc.objects.begin(); oit != proc.objects.end();) {
            bool keep = live.count({it->first, oit->first}) != 0;
            oit = keep ? std::next(oit) : proc.objects.erase(oit);
        }
        bool keep_proc = it->first == c.root_pid || !proc.idle() || !proc.queue.empty() ||
                         !proc.objects.empty() || lock_involved.count(it->first);
        it = keep_proc ? std::next(it) : c.procs.erase(it);
    }
}

} // namespace cscoop
