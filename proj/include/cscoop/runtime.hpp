#pragma once

#include "cscoop/ir.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cscoop {

using Pid = std::uint32_t;
using Oid = std::uint32_t;

// ---------------------------------------------------------------------------
// Values

struct Value {
    enum class Kind : std::uint8_t { Void, Int, Bool, Ref };
    Kind kind = Kind::Void;
    std::int64_t i = 0;
    bool b = false;
    Pid pid = 0; // Ref: handler
    Oid oid = 0;

    static Value void_value() { return {}; }
    static Value of_int(std::int64_t v) {
        Value x;
        x.kind = Kind::Int;
        x.i = v;
        return x;
    }
    static Value of_bool(bool v) {
        Value x;
        x.kind = Kind::Bool;
        x.b = v;
        return x;
    }
    static Value of_ref(Pid p, Oid o) {
        Value x;
        x.kind = Kind::Ref;
        x.pid = p;
        x.oid = o;
        return x;
    }

    bool is_void() const { return kind == Kind::Void; }
    bool is_ref() const { return kind == Kind::Ref; }
    bool operator==(const Value &) const = default;
};

std::string value_text(const Value &v);

// Default value for a declared type: 0, false, or Void.
Value default_value(const DeclaredType &t);

// ---------------------------------------------------------------------------
// Run-time entities

struct ObjectRec {
    std::string cls;
    std::vector<Value> attrs; // class layout order
    bool operator==(const ObjectRec &) const = default;
};

struct Request {
    std::string method;
    Oid target_oid = 0;
    std::vector<Value> args;
    bool is_query = false;
    Pid caller = 0; // queries: processor awaiting the result
    bool operator==(const Request &) const = default;
};

struct Frame {
    const MethodGraph *graph = nullptr;
    Oid target_oid = 0; // Current, handled by the owning processor
    int node = 0;
    std::vector<Value> formals;
    std::vector<Value> locals;
    Value result;
    std::set<Pid> locks;                // acquired by this activation's Lock
    std::optional<Pid> query_caller;    // set on frames started by a query request

    bool at_final() const { return graph->is_final(node); }
};

struct Processor {
    Pid id = 0;
    std::map<Oid, ObjectRec> objects;
    std::vector<Request> queue; // front() is the oldest request
    std::vector<Frame> stack;   // back() is the active frame
    std::optional<Pid> locked_by;
    std::optional<Place> waiting; // where to put an in-flight query result

    bool idle() const { return stack.empty(); }
    Frame &active() { return stack.back(); }
    const Frame &active() const { return stack.back(); }
    Oid fresh_oid() const { return objects.empty() ? 1 : objects.rbegin()->first + 1; }
};

enum class QueueDiscipline : std::uint8_t { Fifo, Bag };

enum class ErrorKind : std::uint8_t { None, VoidCall, Postcondition, RuntimeError };

struct ErrorInfo {
    ErrorKind kind = ErrorKind::None;
    Pid pid = 0;
    SourcePos pos;
    std::string detail;

    explicit operator bool() const { return kind != ErrorKind::None; }
};

const char *error_kind_name(ErrorKind k);

// ---------------------------------------------------------------------------
// Configuration: one complete system state. Value semantics; successors are
// built by copying and mutating. The program is shared, never copied.

struct Configuration {
    std::shared_ptr<const Program> program;
    std::map<Pid, Processor> procs;
    Pid root_pid = 0;
    QueueDiscipline discipline = QueueDiscipline::Fifo;
    bool gc = false;
    ErrorInfo error;

    Processor *find_proc(Pid p) {
        auto it = procs.find(p);
        return it == procs.end() ? nullptr : &it->second;
    }
    const Processor *find_proc(Pid p) const {
        auto it = procs.find(p);
        return it == procs.end() ? nullptr : &it->second;
    }
    ObjectRec *find_object(Pid p, Oid o) {
        Processor *pr = find_proc(p);
        if (!pr) return nullptr;
        auto it = pr->objects.find(o);
        return it == pr->objects.end() ? nullptr : &it->second;
    }
    const ObjectRec *find_object(Pid p, Oid o) const {
        return const_cast<Configuration *>(this)->find_object(p, o);
    }
    Pid fresh_pid() const { return procs.empty() ? 1 : procs.rbegin()->first + 1; }

    // every processor idle with an empty queue and nothing in flight
    bool terminated() const;
};

// Builds a frame for an activation of `graph` on `target` with `args`.
Frame make_frame(const MethodGraph *graph, Oid target, std::vector<Value> args);

// The starting state: one processor running `make` on the root object.
Configuration initial_configuration(std::shared_ptr<const Program> program,
                                    QueueDiscipline discipline = QueueDiscipline::Fifo,
                                    bool gc = false);

// ---------------------------------------------------------------------------
// Canonical form and well-formedness

// A byte string identifying the configuration up to renaming of processor and
// object ids. Two configurations get the same key exactly when one can be
// turned into the other by such a renaming.
std::string canonical_key(const Configuration &c);

// Structural invariants (references resolve, lock bookkeeping is consistent,
// frames match their graphs, ...). Returns human-readable violations.
std::vector<std::string> validate(const Configuration &c);

// Removes objects and processors that can no longer influence the run.
// Only called when c.gc is set.
void collect_garbage(Configuration &c);

} // namespace cscoop
