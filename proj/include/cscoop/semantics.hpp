#pragma once

#include "cscoop/runtime.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cscoop {

// ---------------------------------------------------------------------------
// Expression evaluation. Pure: a configuration is never modified. Inline
// queries run on a scratch frame inside the evaluator; guards and ensure
// clauses may look across processors (they are evaluated with the relevant
// locks held or being acquired atomically).

enum class EvalErrorKind : std::uint8_t {
    None,
    DivZero,
    Overflow,
    VoidAccess,   // read or call through a Void reference
    QueryDepth,   // inline query nesting exceeded the limit
    QuerySteps,   // inline query ran too long (assumed non-terminating)
    PostconditionFailed,
};

struct EvalResult {
    Value value;
    EvalErrorKind err = EvalErrorKind::None;
    SourcePos err_pos;
    std::string detail;

    bool ok() const { return err == EvalErrorKind::None; }
};

EvalResult evaluate(const Configuration &c, Pid pid, const Frame &frame, const IrExpr &e);

// ---------------------------------------------------------------------------
// Firings: the possible next atomic steps of a configuration. An action
// firing names an out-edge of some processor's active frame; a dequeue firing
// (bag discipline only) names a queue position.

struct Firing {
    enum class Kind : std::uint8_t { Action, Dequeue };
    Kind kind = Kind::Action;
    Pid pid = 0;
    std::size_t edge_index = 0;  // Action: index into the frame's graph edges
    std::size_t queue_index = 0; // Dequeue

    bool operator==(const Firing &) const = default;
};

std::string firing_text(const Configuration &c, const Firing &f);

// All firings enabled in c. Deterministic order: processors ascending, edges
// in graph order, then dequeue positions. Empty for error configurations.
std::vector<Firing> enabled_actions(const Configuration &c);

// Applies one firing: the action's effects, then stabilization (and garbage
// collection when the configuration asks for it). `f` must be enabled in `c`.
Configuration fire(const Configuration &c, const Firing &f);

// Runs the deterministic scheduling rules to their fixpoint, lowest processor
// id first: finished frames are popped (query results written back to their
// waiting callers), and idle processors pick up queued requests — always
// under fifo, only unambiguously (a single queued request) under bag.
// `scan_order`, when given, overrides the processor scan order; stabilization
// is confluent, so any order reaches the same fixpoint (tests rely on this).
void stabilize(Configuration &c, const std::vector<Pid> *scan_order = nullptr);

// One macro step: every enabled firing paired with its successor.
std::vector<std::pair<Firing, Configuration>> macro_step(const Configuration &c);

} // namespace cscoop
