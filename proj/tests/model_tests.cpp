#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cscoop/driver.hpp"
#include "cscoop/semantics.hpp"
#include "support/helpers.hpp"

#include <algorithm>
#include <deque>

using namespace cscoop;
using namespace cscoop::test;

namespace {

// All concrete (id-preserving) states reachable from `initial`. Unlike the
// canonical enumerator this keeps permuted twins apart, which is exactly what
// the isomorphism tests need.
std::vector<Configuration> concrete_space(const Configuration &initial, std::size_t cap) {
    Configuration init = initial;
    stabilize(init);
    if (init.gc && !init.error) collect_garbage(init);

    std::vector<Configuration> out;
    std::set<std::string> seen{plain_text(init)};
    std::deque<Configuration> work;
    work.push_back(std::move(init));
    while (!work.empty()) {
        Configuration cfg = std::move(work.front());
        work.pop_front();
        out.push_back(cfg);
        REQUIRE(out.size() <= cap);
        if (cfg.error) continue;
        for (const Firing &f : enabled_actions(cfg)) {
            Configuration succ = fire(cfg, f);
            if (seen.insert(plain_text(succ)).second) work.push_back(std::move(succ));
        }
    }
    return out;
}

// Brute force: does some pid bijection turn x into y? Object ids are kept
// fixed, which is enough for the micro corpus (allocation inside one
// processor is deterministic there).
bool isomorphic(const Configuration &x, const Configuration &y) {
    if (x.procs.size() != y.procs.size()) return false;
    std::vector<Pid> xs, ys;
    for (const auto &[pid, pr] : x.procs) xs.push_back(pid);
    for (const auto &[pid, pr] : y.procs) ys.push_back(pid);
    const std::string want = plain_text(y);
    do {
        PidMap pm;
        bool shapes_ok = true;
        for (std::size_t i = 0; i < xs.size() && shapes_ok; ++i) {
            pm[xs[i]] = ys[i];
            const auto &ox = x.procs.at(xs[i]).objects;
            const auto &oy = y.procs.at(ys[i]).objects;
            shapes_ok = ox.size() == oy.size() &&
                        std::equal(ox.begin(), ox.end(), oy.begin(),
                                   [](const auto &a, const auto &b) { return a.first == b.first; });
        }
        if (shapes_ok && plain_text(permute_config(x, pm)) == want) return true;
    } while (std::next_permutation(ys.begin(), ys.end()));
    return false;
}

std::multiset<std::string> successor_keys(const Configuration &c) {
    std::multiset<std::string> out;
    if (c.error) return out;
    for (const Firing &f : enabled_actions(c)) out.insert(canonical_key(fire(c, f)));
    return out;
}

// rotate the sorted pid list by one
PidMap rotation(const Configuration &c) {
    std::vector<Pid> pids;
    for (const auto &[pid, pr] : c.procs) pids.push_back(pid);
    PidMap pm;
    for (std::size_t i = 0; i < pids.size(); ++i) pm[pids[i]] = pids[(i + 1) % pids.size()];
    return pm;
}

} // namespace

TEST_CASE("initial configuration is one processor poised on make") {
    auto program = compile_or_die(read_file(bench_path("dpe_2.cscoop")));
    Configuration c = initial_configuration(program);

    REQUIRE(c.procs.size() == 1);
    const Processor *root = c.find_proc(c.root_pid);
    REQUIRE(root != nullptr);
    CHECK(!root->locked_by);
    CHECK(!root->waiting);
    CHECK(root->queue.empty());

    REQUIRE(root->objects.size() == 1);
    const ObjectRec &obj = root->objects.begin()->second;
    CHECK(obj.cls == program->root_class);
    const ClassLayout *layout = program->find_class(obj.cls);
    REQUIRE(layout != nullptr);
    REQUIRE(obj.attrs.size() == layout->attributes.size());
    for (std::size_t i = 0; i < obj.attrs.size(); ++i)
        CHECK(obj.attrs[i] == default_value(layout->attributes[i].type));

    REQUIRE(root->stack.size() == 1);
    const Frame &f = root->stack.front();
    CHECK(f.graph == program->find_method(program->root_class, "make"));
    CHECK(f.node == f.graph->entry);
    CHECK(f.formals.empty());
    CHECK(f.locks.empty());
    for (std::size_t i = 0; i < f.locals.size(); ++i)
        CHECK(f.locals[i] == default_value(f.graph->locals[i].type));

    CHECK(!c.terminated());
    CHECK(validate(c).empty());
}

TEST_CASE("default values are zero, false, and Void") {
    DeclaredType i;
    i.base = BaseType::Integer;
    CHECK(default_value(i) == Value::of_int(0));
    DeclaredType b;
    b.base = BaseType::Boolean;
    CHECK(default_value(b) == Value::of_bool(false));
    DeclaredType r;
    r.base = BaseType::Reference;
    r.class_name = "CELL";
    r.separate = true;
    CHECK(default_value(r).is_void());
}

TEST_CASE("empty make is one noop away from termination") {
    Configuration c = initial_of("class APP root\n    make\n        do\n        end\nend\n");
    stabilize(c);
    auto enabled = enabled_actions(c);
    REQUIRE(enabled.size() == 1);
    Configuration done = fire(c, enabled.front());
    CHECK(done.terminated());
    CHECK(enabled_actions(done).empty());
    CHECK(validate(done).empty());
}

TEST_CASE("the broken variant starts in the same shape as the good one") {
    Configuration good = initial_configuration(compile_or_die(read_file(bench_path("dpe_2.cscoop"))));
    Configuration bad = initial_configuration(compile_or_die(read_file(bench_path("dpb_2.cscoop"))));

    REQUIRE(good.procs.size() == bad.procs.size());
    const Processor &gp = good.procs.begin()->second;
    const Processor &bp = bad.procs.begin()->second;
    REQUIRE(gp.objects.size() == bp.objects.size());
    const ObjectRec &go = gp.objects.begin()->second;
    const ObjectRec &bo = bp.objects.begin()->second;
    CHECK(go.cls == bo.cls);
    CHECK(go.attrs == bo.attrs);
    REQUIRE(gp.stack.size() == bp.stack.size());
    const Frame &gf = gp.stack.front();
    const Frame &bf = bp.stack.front();
    CHECK(gf.graph->method_name == bf.graph->method_name);
    CHECK(gf.node == bf.node);
    CHECK(gf.formals == bf.formals);
    CHECK(gf.locals == bf.locals);

    // everything outside the method graphs matches, yet the keys must not:
    // the key starts with the program fingerprint, and the graphs differ
    CHECK(canonical_key(good) != canonical_key(bad));
}

TEST_CASE("canonical key survives processor renaming") {
    Configuration init = initial_of(read_file(micro_path("query_pair.cscoop")));
    Enumerated e = enumerate_space(init, {}, true);
    std::size_t multi = 0;
    for (const Configuration &cfg : e.configs) {
        PidMap pm = rotation(cfg);
        Configuration twin = permute_config(cfg, pm);
        CHECK(canonical_key(twin) == canonical_key(cfg));
        if (cfg.procs.size() > 1) {
            ++multi;
            CHECK(plain_text(twin) != plain_text(cfg));
        }
    }
    CHECK(multi > 0); // the rotation was a real renaming, not the identity
}

TEST_CASE("canonical key survives object renaming") {
    Configuration c = initial_of(R"(
class CELL
    v: INTEGER

    make (n: INTEGER)
        do
            v := n
        end
end

class APP root
    c: CELL

    make
        do
            create c.make (7)
        end
end
)");
    stabilize(c);
    for (;;) {
        auto enabled = enabled_actions(c);
        if (enabled.empty()) break;
        c = fire(c, enabled.front());
    }
    REQUIRE(c.terminated());
    const Processor &root = c.procs.begin()->second;
    REQUIRE(root.objects.size() == 2); // the APP object and its plain CELL

    PidMap pm{{c.root_pid, c.root_pid}};
    OidMaps om;
    om[c.root_pid] = {{1, 2}, {2, 1}};
    Configuration twin = permute_config(c, pm, om);
    CHECK(plain_text(twin) != plain_text(c));
    CHECK(canonical_key(twin) == canonical_key(c));
}

TEST_CASE("keys are equal exactly when an id bijection exists") {
    Configuration init = initial_of(read_file(micro_path("spawn_pair.cscoop")));
    std::vector<Configuration> space = concrete_space(init, 500);
    REQUIRE(space.size() > 1);

    std::vector<std::string> keys;
    keys.reserve(space.size());
    for (const Configuration &cfg : space) keys.push_back(canonical_key(cfg));

    std::size_t twins = 0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        for (std::size_t j = i + 1; j < space.size(); ++j) {
            bool same_key = keys[i] == keys[j];
            CHECK(same_key == isomorphic(space[i], space[j]));
            if (same_key) ++twins;
        }
    }
    // the whole point of this micro: distinct interleavings produce
    // genuinely isomorphic states under different raw ids
    CHECK(twins > 0);
}

TEST_CASE("configurations with equal keys have matching futures") {
    Configuration init = initial_of(read_file(micro_path("spawn_pair.cscoop")));
    std::vector<Configuration> space = concrete_space(init, 500);

    std::map<std::string, std::size_t> rep; // key -> index of first carrier
    std::size_t compared = 0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        std::string key = canonical_key(space[i]);
        auto [it, fresh] = rep.emplace(std::move(key), i);
        if (fresh) continue;
        ++compared;
        CHECK(successor_keys(space[it->second]) == successor_keys(space[i]));
    }
    CHECK(compared > 0);
}

TEST_CASE("every reachable state of the lock micros validates") {
    for (const char *name : {"lock_race.cscoop", "query_pair.cscoop", "guard_flag.cscoop"}) {
        INFO(name);
        Enumerated e = enumerate_space(initial_of(read_file(micro_path(name))), {}, true);
        for (const Configuration &cfg : e.configs) {
            auto problems = validate(cfg);
            INFO(plain_text(cfg));
            CHECK(problems.empty());
        }
    }
}

TEST_CASE("validate flags two holders of one lock") {
    Enumerated e = enumerate_space(initial_of(read_file(micro_path("lock_race.cscoop"))), {}, true);
    bool exercised = false;
    for (const Configuration &cfg : e.configs) {
        const Frame *holder = nullptr;
        Pid holder_pid = 0;
        for (const auto &[pid, pr] : cfg.procs)
            for (const Frame &f : pr.stack)
                if (!f.locks.empty()) {
                    holder = &f;
                    holder_pid = pid;
                }
        if (!holder) continue;
        for (auto &[pid, pr] : const_cast<Configuration &>(cfg).procs) {
            if (pid == holder_pid || pr.stack.empty()) continue;
            Configuration broken = cfg;
            broken.procs.at(pid).stack.back().locks.insert(*holder->locks.begin());
            auto problems = validate(broken);
            bool mentioned = false;
            for (const std::string &p : problems)
                if (p.find("multiple lockers") != std::string::npos) mentioned = true;
            CHECK(mentioned);
            exercised = true;
            break;
        }
        if (exercised) break;
    }
    CHECK(exercised);
}

TEST_CASE("validate flags dangling references") {
    Configuration c = initial_configuration(compile_or_die(read_file(bench_path("dpe_2.cscoop"))));
    Processor &root = c.procs.begin()->second;
    REQUIRE(!root.objects.begin()->second.attrs.empty());
    root.objects.begin()->second.attrs[0] = Value::of_ref(77, 1);
    auto problems = validate(c);
    REQUIRE(!problems.empty());
    bool mentioned = false;
    for (const std::string &p : problems)
        if (p.find("dangling reference") != std::string::npos) mentioned = true;
    CHECK(mentioned);
}

TEST_CASE("garbage collection reaps finished unreachable processors") {
    const char *text = R"(
class WORKER
    n: INTEGER

    bump
        do
            n := n + 1
        end
end

class APP root
    make
        local
            w: separate WORKER
        do
            create w
            poke (w)
        end

    poke (x: separate WORKER)
        do
            x.bump
        end
end
)";
    // default: the worker survives as garbage once the root frame popped
    Enumerated plain = enumerate_space(initial_of(text), {}, true);
    bool garbage_seen = false;
    for (const Configuration &cfg : plain.configs)
        if (enabled_actions(cfg).empty() && !cfg.error) {
            CHECK(cfg.procs.size() == 2);
            garbage_seen = true;
        }
    CHECK(garbage_seen);

    // with collection on, terminal states hold only the root processor
    Enumerated gc = enumerate_space(initial_of(text, QueueDiscipline::Fifo, true), {}, true);
    bool collected_seen = false;
    for (const Configuration &cfg : gc.configs)
        if (enabled_actions(cfg).empty() && !cfg.error) {
            CHECK(cfg.procs.size() == 1);
            collected_seen = true;
        }
    CHECK(collected_seen);
    CHECK(gc.keys != plain.keys); // the collected terminal state is a different state
}
