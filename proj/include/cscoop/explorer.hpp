#pragma once

#include "cscoop/semantics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cscoop {

// Which properties to look for. Runtime faults (division by zero, overflow,
// non-terminating inline queries) are always reported; they make every other
// answer meaningless.
struct CheckSet {
    bool deadlock = true;
    bool void_call = true;
    bool postcondition = false;
    bool stuck = true;
};

struct ExploreOptions {
    CheckSet checks;
    bool stop_at_first = false; // return on the first violation found
    std::size_t bound = 0;      // max BFS depth in macro-steps; 0 = unbounded
    bool record_graph = false;  // keep nodes/edges for export
    // When set, the canonical key of every distinct state is appended in
    // discovery order. Tests compare these against an independent enumerator.
    std::vector<std::string> *collect_keys = nullptr;
};

// ---------------------------------------------------------------------------
// Results

struct TraceStep {
    Firing firing;
    std::string text;   // rendered against the configuration it fired from
    Pid pid = 0;        // processor that moved
    std::string action; // action label, or "dequeue #k" for bag dequeues
    std::string method; // CLASS::method of the frame (or queued request)
    SourcePos pos;      // source position of the action; unknown for dequeues
};

struct Trace {
    std::vector<TraceStep> steps;
};

struct StateNode {
    std::uint32_t id = 0;
    bool initial = false;
    bool violating = false;
    bool terminal = false; // no enabled firings
    std::string note;      // verdict/error tag for violating states
};

struct StateEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::string label;
};

struct StateSpace {
    std::size_t num_states = 0;
    std::size_t num_transitions = 0;
    std::size_t terminal_states = 0;
    std::size_t peak_frontier = 0;
    // entity/relation counts of the initial configuration and of the first
    // terminal configuration reached (zero when none was)
    std::size_t start_graph_nodes = 0, start_graph_edges = 0;
    std::size_t final_graph_nodes = 0, final_graph_edges = 0;
    std::size_t peak_rss_kb = 0;
    bool complete = false; // every reachable state visited (no bound, no early stop)
    double seconds = 0.0;
    std::vector<StateNode> nodes; // filled when record_graph
    std::vector<StateEdge> edges;
};

enum class VerdictKind : std::uint8_t { Safe, Violation, BoundReached };

struct ViolationInfo {
    std::string check; // deadlock | void_call | postcondition | stuck | runtime_error
    Trace trace;
    Configuration final_config;
    std::string detail;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Safe;
    std::optional<ViolationInfo> violation;
    std::size_t frontier = 0; // states whose successors the depth bound cut off
};

struct ExploreResult {
    Verdict verdict;
    StateSpace space;
};

// ---------------------------------------------------------------------------
// Operations

// Exhaustive breadth-first exploration from `initial` (stabilized first),
// deduplicating configurations by canonical key. The reported violation is
// the first one in BFS order, so its trace has minimal macro-step length.
ExploreResult explore(const Configuration &initial, const ExploreOptions &options);

// Wait-for cycle among processors: blocked lock actions wait for the lock
// holder, query callers wait for the callee. Returns a cycle p0 -> p1 -> ...
// -> p0 (first element repeated at the back) when one exists.
std::optional<std::vector<Pid>> detect_lock_cycle(const Configuration &c);

// Error-flag and quiescence detectors.
bool detect_void_call(const Configuration &c);
bool detect_stuck(const Configuration &c); // nothing enabled, not terminated, no error

// Replays a firing sequence from `initial` (stabilized first). Used for
// counterexample reconstruction and determinism tests.
Configuration replay(const Configuration &initial, const std::vector<Firing> &firings);

// BFS predecessor records: entries[id] = (id of the state it was first seen
// from, firing taken). The initial state points at itself.
struct PredecessorTable {
    std::vector<std::pair<std::uint32_t, Firing>> entries;
};

// One rendered trace step for firing `f` against the configuration it fires
// from.
TraceStep make_trace_step(const Configuration &c, const Firing &f);

// Walks the table backwards from `target`, then replays forward to render
// each step against the configuration it fires from.
Trace reconstruct_trace(const Configuration &initial, const PredecessorTable &preds,
                        std::uint32_t target);

// Renders a trace into the stable text format written to .trace files:
// one event per line, `step \t processor \t action \t method \t file:line`,
// framed by '#' comment lines naming the check and the program fingerprint.
std::string format_trace(const Trace &trace, const std::string &check,
                         const std::string &detail, const std::string &path,
                         std::uint64_t fingerprint);

} // namespace cscoop
