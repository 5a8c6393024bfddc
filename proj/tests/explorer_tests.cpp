#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cscoop/driver.hpp"
#include "cscoop/explorer.hpp"
#include "support/helpers.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace cscoop;
using namespace cscoop::test;

namespace {

ExploreResult explore_file(const std::string &path, ExploreOptions opts = {},
                           QueueDiscipline d = QueueDiscipline::Fifo) {
    return explore(initial_of(read_file(path), d), opts);
}

std::vector<Firing> firings_of(const Trace &t) {
    std::vector<Firing> out;
    for (const TraceStep &s : t.steps) out.push_back(s.firing);
    return out;
}

// distinct members of a detect_lock_cycle result (first pid repeats at the back)
std::set<Pid> cycle_members(const std::vector<Pid> &cycle) {
    std::set<Pid> out(cycle.begin(), cycle.end());
    return out;
}

// Wait-for edges, rebuilt from scratch: a processor whose frame sits before a
// Lock action waits for whichever processor holds one of the targets.
std::multimap<Pid, Pid> lock_wait_graph(const Configuration &c) {
    std::multimap<Pid, Pid> edges;
    for (const auto &[pid, pr] : c.procs) {
        if (pr.idle()) continue;
        const Frame &f = pr.active();
        for (std::size_t ei : f.graph->out(f.node)) {
            const Action &a = f.graph->edges[ei].action;
            if (a.kind != ActionKind::Lock) continue;
            for (const auto &t : a.lock_targets) {
                EvalResult r = evaluate(c, pid, f, *t);
                if (!r.ok() || !r.value.is_ref()) continue;
                const Processor *target = c.find_proc(r.value.pid);
                if (target && target->locked_by && *target->locked_by != pid)
                    edges.emplace(pid, *target->locked_by);
            }
        }
    }
    return edges;
}

} // namespace

TEST_CASE("a one-assignment program has two states") {
    std::vector<std::string> keys;
    ExploreOptions opts;
    opts.collect_keys = &keys;
    ExploreResult res = explore(initial_of(R"(
class APP root
    x: INTEGER

    make
        do
            x := 1
        end
end
)"),
                                opts);
    CHECK(res.verdict.kind == VerdictKind::Safe);
    CHECK(res.space.num_states == 2);
    CHECK(res.space.num_transitions == 1);
    CHECK(res.space.terminal_states == 1);
    CHECK(res.space.complete);
    CHECK(keys.size() == 2);
}

TEST_CASE("the careless philosophers deadlock on a fork cycle") {
    ExploreResult res = explore_file(bench_path("dpb_2.cscoop"));
    REQUIRE(res.verdict.kind == VerdictKind::Violation);
    REQUIRE(res.verdict.violation.has_value());
    const ViolationInfo &v = *res.verdict.violation;
    CHECK(v.check == "deadlock");
    CHECK(v.trace.steps.size() == 37);
    CHECK(res.space.num_states == 966);
    CHECK(res.space.num_transitions == 2196);
    CHECK(res.space.complete);

    auto cycle = detect_lock_cycle(v.final_config);
    REQUIRE(cycle.has_value());
    CHECK(cycle_members(*cycle).size() == 2);

    // replaying the reported firings lands on the reported state
    Configuration again = replay(initial_of(read_file(bench_path("dpb_2.cscoop"))),
                                 firings_of(v.trace));
    CHECK(canonical_key(again) == canonical_key(v.final_config));
    CHECK(detect_lock_cycle(again).has_value());
}

TEST_CASE("the careful philosophers are safe") {
    ExploreResult res = explore_file(bench_path("dpe_2.cscoop"));
    CHECK(res.verdict.kind == VerdictKind::Safe);
    CHECK(!res.verdict.violation.has_value());
    CHECK(res.space.num_states == 1428);
    CHECK(res.space.num_transitions == 3387);
    CHECK(res.space.complete);

    Configuration c = initial_of(read_file(bench_path("dpe_2.cscoop")));
    stabilize(c);
    CHECK(!detect_lock_cycle(c).has_value()); // nobody holds anything yet
}

TEST_CASE("three philosophers make a three-cycle, confirmed by a rebuilt wait-for graph") {
    ExploreResult res = explore_file(bench_path("dpb_3.cscoop"));
    REQUIRE(res.verdict.kind == VerdictKind::Violation);
    const ViolationInfo &v = *res.verdict.violation;
    CHECK(v.check == "deadlock");
    CHECK(v.trace.steps.size() == 56);

    auto cycle = detect_lock_cycle(v.final_config);
    REQUIRE(cycle.has_value());
    std::set<Pid> members = cycle_members(*cycle);
    CHECK(members.size() == 3);

    // every reported hop must be a real wait-for edge
    auto graph = lock_wait_graph(v.final_config);
    for (std::size_t i = 0; i + 1 < cycle->size(); ++i) {
        auto [lo, hi] = graph.equal_range((*cycle)[i]);
        bool found = false;
        for (auto it = lo; it != hi; ++it)
            if (it->second == (*cycle)[i + 1]) found = true;
        CHECK(found);
    }
    // and following the rebuilt edges from any member must stay inside the
    // cycle and close it
    for (Pid start : members) {
        std::set<Pid> seen;
        Pid at = start;
        for (std::size_t hops = 0; hops <= members.size(); ++hops) {
            auto it = graph.find(at);
            REQUIRE(it != graph.end());
            at = it->second;
            CHECK(members.count(at) == 1);
            if (!seen.insert(at).second) break;
        }
        CHECK(seen.count(start) == 1);
    }
}

TEST_CASE("void calls are caught at the action that needs the reference") {
    ExploreResult never_created = explore_file(micro_path("void_call.cscoop"));
    REQUIRE(never_created.verdict.kind == VerdictKind::Violation);
    CHECK(never_created.verdict.violation->check == "void_call");
    CHECK(never_created.verdict.violation->detail.find("line 17") != std::string::npos);
    CHECK(never_created.verdict.violation->final_config.error.kind == ErrorKind::VoidCall);
    CHECK(detect_void_call(never_created.verdict.violation->final_config));

    // assigned Void, then used as a lock target: the lock is the culprit
    ExploreResult wiped = explore_file(micro_path("void_assign.cscoop"));
    REQUIRE(wiped.verdict.kind == VerdictKind::Violation);
    CHECK(wiped.verdict.violation->check == "void_call");
    CHECK(wiped.verdict.violation->detail.find("line 18") != std::string::npos);

    ExploreResult healthy = explore_file(micro_path("query_sync.cscoop"));
    CHECK(healthy.verdict.kind == VerdictKind::Safe);
}

TEST_CASE("a query starved behind a jammed guard is stuck, not part of the cycle") {
    Configuration init = initial_of(read_file(micro_path("starved_query.cscoop")));
    ExploreResult res = explore(init, {});
    REQUIRE(res.verdict.kind == VerdictKind::Violation);
    CHECK(res.verdict.violation->check == "deadlock"); // the detector priority

    // Dead states come in two flavors: the racers formed their 2-cycle with
    // the root starving outside it, or the racers resolved cleanly and the
    // root starves alone on the jammed guard. Both are macro-dead; only the
    // first is a deadlock.
    Enumerated e = enumerate_space(init, {}, true);
    bool beside_cycle = false, starved_alone = false;
    for (const Configuration &cfg : e.configs) {
        if (!enabled_actions(cfg).empty() || cfg.terminated() || cfg.error) continue;
        const Processor &root = cfg.procs.at(cfg.root_pid);
        if (!root.waiting) continue;
        CHECK(detect_stuck(cfg));
        if (auto cycle = detect_lock_cycle(cfg)) {
            std::set<Pid> members = cycle_members(*cycle);
            CHECK(members.size() == 2);
            CHECK(members.count(cfg.root_pid) == 0); // the root starves outside it
            beside_cycle = true;
        } else {
            starved_alone = true;
        }
    }
    CHECK(beside_cycle);
    CHECK(starved_alone);
}

TEST_CASE("a finished run is neither stuck nor cyclic") {
    Configuration c = initial_of(read_file(bench_path("dpe_2.cscoop")));
    stabilize(c);
    std::size_t fuel = 200000;
    while (!enabled_actions(c).empty() && fuel-- > 0) c = fire(c, enabled_actions(c).front());
    REQUIRE(c.terminated());
    CHECK(!detect_stuck(c));
    CHECK(!detect_lock_cycle(c).has_value());
}

TEST_CASE("a violation in the initial state leaves an empty trace") {
    ExploreResult res = explore_file(micro_path("stuck_make.cscoop"));
    REQUIRE(res.verdict.kind == VerdictKind::Violation);
    CHECK(res.verdict.violation->check == "stuck");
    CHECK(res.verdict.violation->trace.steps.empty());
    CHECK(res.space.num_states == 1);
}

TEST_CASE("checks not asked for are not reported") {
    ExploreOptions only_void;
    only_void.checks.deadlock = false;
    only_void.checks.stuck = false;
    only_void.checks.void_call = true;
    ExploreResult res = explore_file(bench_path("dpb_2.cscoop"), only_void);
    CHECK(res.verdict.kind == VerdictKind::Safe); // deadlocks exist, but nobody asked
    CHECK(res.space.complete);
}

TEST_CASE("the explorer agrees with the brute-force enumerator") {
    const char *corpus[] = {"assign_seq.cscoop", "query_sync.cscoop", "guard_flag.cscoop",
                            "query_cross.cscoop", "worker_single.cscoop"};
    for (const char *name : corpus) {
        INFO(name);
        Configuration init = initial_of(read_file(micro_path(name)));

        std::vector<std::string> keys;
        ExploreOptions opts;
        opts.collect_keys = &keys;
        ExploreResult res = explore(init, opts);

        Enumerated oracle = enumerate_space(init, CheckSet{});
        CHECK(res.space.num_states == oracle.keys.size());
        CHECK(res.space.num_transitions == oracle.transitions);
        CHECK(std::set<std::string>(keys.begin(), keys.end()) == oracle.keys);

        Enumerated checked = enumerate_space(init, ExploreOptions{}.checks);
        bool any_violation = !checked.violations.empty();
        CHECK((res.verdict.kind == VerdictKind::Violation) == any_violation);
    }
}

TEST_CASE("identical runs produce identical numbers") {
    for (const char *name : {"query_pair.cscoop", "lock_race.cscoop"}) {
        INFO(name);
        ExploreResult a = explore_file(micro_path(name));
        ExploreResult b = explore_file(micro_path(name));
        ExploreResult c = explore_file(micro_path(name));
        for (const ExploreResult *r : {&b, &c}) {
            CHECK(r->space.num_states == a.space.num_states);
            CHECK(r->space.num_transitions == a.space.num_transitions);
            CHECK(r->verdict.kind == a.verdict.kind);
            if (a.verdict.violation)
                CHECK(r->verdict.violation->check == a.verdict.violation->check);
        }
    }
}

TEST_CASE("stopping at the first hit never explores more") {
    for (const char *name : {"query_pair.cscoop", "query_cross.cscoop"}) {
        INFO(name);
        ExploreOptions first;
        first.stop_at_first = true;
        ExploreResult stopped = explore_file(micro_path(name), first);
        ExploreResult full = explore_file(micro_path(name));
        CHECK(stopped.space.num_states <= full.space.num_states);
        CHECK(stopped.verdict.kind == full.verdict.kind);
        CHECK(!stopped.space.complete);
    }

    ExploreOptions first;
    first.stop_at_first = true;
    ExploreResult stopped = explore_file(bench_path("dpb_2.cscoop"), first);
    CHECK(stopped.space.num_states == 872);
    CHECK(stopped.verdict.violation->trace.steps.size() == 37); // same first hit
}

TEST_CASE("the depth bound cuts successors, not the states on the rim") {
    ExploreOptions b10;
    b10.bound = 10;
    ExploreResult rim = explore_file(bench_path("dpb_2.cscoop"), b10);
    CHECK(rim.verdict.kind == VerdictKind::BoundReached);
    CHECK(rim.space.num_states == 59);
    CHECK(rim.verdict.frontier == 13);
    CHECK(!rim.space.complete);

    // the first deadlock sits at depth 37: a bound of 36 misses it...
    ExploreOptions b36;
    b36.bound = 36;
    ExploreResult miss = explore_file(bench_path("dpb_2.cscoop"), b36);
    CHECK(miss.verdict.kind == VerdictKind::BoundReached);
    CHECK(miss.space.num_states == 840);

    // ...a bound of exactly 37 still checks the rim states and finds it
    ExploreOptions b37;
    b37.bound = 37;
    ExploreResult hit = explore_file(bench_path("dpb_2.cscoop"), b37);
    REQUIRE(hit.verdict.kind == VerdictKind::Violation);
    CHECK(hit.verdict.violation->check == "deadlock");
    CHECK(hit.verdict.violation->trace.steps.size() == 37);
}

TEST_CASE("a loop that revisits its own state is simply safe") {
    ExploreResult res = explore_file(micro_path("diverge_empty.cscoop"));
    CHECK(res.verdict.kind == VerdictKind::Safe);
    CHECK(res.space.num_states == 1);
    CHECK(res.space.num_transitions == 1); // the self-loop
    CHECK(res.space.complete);

    ExploreOptions bounded;
    bounded.bound = 3;
    ExploreResult still = explore_file(micro_path("diverge_empty.cscoop"), bounded);
    CHECK(still.verdict.kind == VerdictKind::Safe);
    CHECK(still.space.complete); // the bound never bit
}

TEST_CASE("a state-growing loop runs into the bound") {
    ExploreOptions bounded;
    bounded.bound = 100;
    ExploreResult res = explore_file(micro_path("diverge_grow.cscoop"), bounded);
    CHECK(res.verdict.kind == VerdictKind::BoundReached);
    CHECK(res.space.num_states == 101);
    CHECK(res.verdict.frontier == 1);
    CHECK(!res.space.complete);
}

TEST_CASE("more philosophers, more states") {
    ExploreResult e2 = explore_file(bench_path("dpe_2.cscoop"));
    ExploreResult e3 = explore_file(bench_path("dpe_3.cscoop"));
    CHECK(e3.space.num_states > e2.space.num_states);
    CHECK(e3.space.num_states == 25971);
    CHECK(e3.space.num_transitions == 81255);

    ExploreResult b2 = explore_file(bench_path("dpb_2.cscoop"));
    ExploreResult b3 = explore_file(bench_path("dpb_3.cscoop"));
    CHECK(b3.space.num_states > b2.space.num_states);
    CHECK(b3.space.num_states == 14775);
}

TEST_CASE("the recorded graph mirrors the statistics") {
    Configuration init = initial_of(read_file(micro_path("query_cross.cscoop")));
    ExploreOptions opts;
    opts.record_graph = true;
    ExploreResult res = explore(init, opts);

    REQUIRE(res.space.nodes.size() == res.space.num_states);
    REQUIRE(res.space.edges.size() == res.space.num_transitions);
    std::size_t initials = 0, violating = 0, terminal = 0;
    for (const StateNode &n : res.space.nodes) {
        if (n.initial) ++initials;
        if (n.violating) ++violating;
        if (n.terminal) ++terminal;
    }
    CHECK(initials == 1);
    CHECK(terminal == res.space.terminal_states);
    for (const StateEdge &e : res.space.edges) {
        CHECK(e.from < res.space.num_states);
        CHECK(e.to < res.space.num_states);
        CHECK(!e.label.empty());
    }

    // violating markers equal the enumerator's independent count
    Enumerated oracle = enumerate_space(init, ExploreOptions{}.checks);
    std::size_t oracle_hits = 0;
    for (const auto &[check, count] : oracle.violations) oracle_hits += count;
    CHECK(violating == oracle_hits);
}
