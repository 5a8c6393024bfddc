#include "cscoop/cli.hpp"

#include "cscoop/driver.hpp"
#include "cscoop/export.hpp"
#include "cscoop/explorer.hpp"
#include "cscoop/parser.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace cscoop {

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBound = 3;

struct Options {
    std::string input;
    std::vector<std::string> checks;
    bool first = false;
    std::size_t bound = 0;
    std::string queue = "fifo";
    bool gc = false;
    std::string dot_path;
    std::string gxl_path;
    std::string trace_path;
    std::uint64_t seed = 0;
    std::size_t steps = 10000;
    bool stats = false;
    bool ast = false;
};

bool parse_checks(const std::vector<std::string> &names, CheckSet &out, std::string &bad) {
    if (names.empty()) return true; // keep defaults
    out = CheckSet{false, false, false, false};
    for (const std::string &n : names) {
        if (n == "deadlock")
            out.deadlock = true;
        else if (n == "void-call" || n == "void_call")
            out.void_call = true;
        else if (n == "postcondition")
            out.postcondition = true;
        else if (n == "stuck")
            out.stuck = true;
        else {
            bad = n;
            return false;
        }
    }
    return true;
}

bool write_file(const std::string &path, const std::string &text, std::ostream &err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "error: cannot write '" << path << "'\n";
        return false;
    }
    out << text;
    return true;
}

std::string default_trace_path(const std::string &input) {
    std::filesystem::path p(input);
    p.replace_extension(".trace");
    return p.string();
}

void print_stats(std::ostream &out, const StateSpace &s) {
    out << "states:          " << s.num_states << "\n";
    out << "transitions:     " << s.num_transitions << "\n";
    out << "terminal states: " << s.terminal_states << "\n";
    out << "peak frontier:   " << s.peak_frontier << "\n";
    out << "start graph:     " << s.start_graph_nodes << " nodes, " << s.start_graph_edges
        << " edges\n";
    out << "final graph:     " << s.final_graph_nodes << " nodes, " << s.final_graph_edges
        << " edges\n";
    out << "peak rss:        " << s.peak_rss_kb << " KB\n";
    out << "time:            " << std::fixed << std::setprecision(3) << s.seconds
        << " s\n";
    out << "complete:        " << (s.complete ? "yes" : "no") << "\n";
}

CompileResult compile_input(const Options &opt, const CheckSet &checks, std::ostream &err) {
    LowerOptions lopts;
    lopts.postcondition_checks = checks.postcondition;
    CompileResult res = compile_file(opt.input, lopts);
    if (!res.ok()) err << res.diags.format_all();
    return res;
}

int do_check(const Options &opt, const CheckSet &checks, std::ostream &out,
             std::ostream &err) {
    CompileResult compiled = compile_input(opt, checks, err);
    if (!compiled.ok()) return kExitUsage;

    QueueDiscipline disc =
        opt.queue == "bag" ? QueueDiscipline::Bag : QueueDiscipline::Fifo;
    Configuration init = initial_configuration(compiled.program, disc, opt.gc);

    ExploreOptions eopts;
    eopts.checks = checks;
    eopts.stop_at_first = opt.first;
    eopts.bound = opt.bound;
    eopts.record_graph = !opt.dot_path.empty();
    ExploreResult res = explore(init, eopts);

    if (!opt.dot_path.empty() &&
        !write_file(opt.dot_path, export_dot(res.space), err))
        return kExitUsage;

    std::ostringstream brief;
    brief << res.space.num_states << " states, " << res.space.num_transitions
          << " transitions, " << std::fixed << std::setprecision(3) << res.space.seconds
          << "s" << (res.space.complete ? ", complete" : "");

    if (res.verdict.kind == VerdictKind::Violation) {
        const ViolationInfo &v = *res.verdict.violation;
        out << "violation: " << v.check;
        if (!v.detail.empty()) out << " (" << v.detail << ")";
        out << "\n";
        std::string tpath =
            opt.trace_path.empty() ? default_trace_path(opt.input) : opt.trace_path;
        std::string text = format_trace(v.trace, v.check, v.detail, opt.input,
                                        compiled.program->fingerprint);
        if (!write_file(tpath, text, err)) return kExitUsage;
        out << "trace written to " << tpath << " (" << v.trace.steps.size()
            << " steps)\n";
        if (!opt.gxl_path.empty() &&
            !write_file(opt.gxl_path, export_gxl(v.final_config), err))
            return kExitUsage;
        out << "explored " << brief.str() << "\n";
        if (opt.stats) print_stats(out, res.space);
        return kExitViolation;
    }

    if (!opt.gxl_path.empty()) {
        Configuration snap = init;
        stabilize(snap);
        if (!write_file(opt.gxl_path, export_gxl(snap), err)) return kExitUsage;
    }

    if (res.verdict.kind == VerdictKind::BoundReached) {
        out << "bound reached: no violation within " << opt.bound
            << " steps (" << res.space.num_states << " states, "
            << res.verdict.frontier << " cut off)\n";
        if (opt.stats) print_stats(out, res.space);
        return kExitBound;
    }

    out << "safe: " << brief.str() << "\n";
    if (opt.stats) print_stats(out, res.space);
    return kExitSafe;
}

int do_run(const Options &opt, const CheckSet &checks, std::ostream &out,
           std::ostream &err) {
    CompileResult compiled = compile_input(opt, checks, err);
    if (!compiled.ok()) return kExitUsage;

    QueueDiscipline disc =
        opt.queue == "bag" ? QueueDiscipline::Bag : QueueDiscipline::Fifo;
    Configuration c = initial_configuration(compiled.program, disc, opt.gc);
    stabilize(c);
    if (c.gc && !c.error) collect_garbage(c);

    std::mt19937_64 rng(opt.seed);
    Trace trace;
    std::string footer;
    int code = kExitSafe;

    for (std::size_t step = 0;; ++step) {
        if (c.error) {
            footer = std::string("error: ") + error_kind_name(c.error.kind) +
                     (c.error.detail.empty() ? "" : " (" + c.error.detail + ")");
            code = kExitViolation;
            break;
        }
        std::vector<Firing> enabled = enabled_actions(c);
        if (enabled.empty()) {
            if (c.terminated()) {
                footer = "terminated";
            } else {
                footer = "stuck";
                code = kExitViolation;
            }
            break;
        }
        if (step >= opt.steps) {
            footer = "step cap reached";
            code = kExitBound;
            break;
        }
        const Firing &f = enabled[rng() % enabled.size()];
        trace.steps.push_back(make_trace_step(c, f));
        c = fire(c, f);
    }

    std::ostringstream text;
    text << "# run: seed " << opt.seed << "\n";
    text << "# program: " << std::hex << compiled.program->fingerprint << std::dec
         << "\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep &s = trace.steps[i];
        text << i << '\t' << 'p' << s.pid << '\t' << s.action << '\t' << s.method << '\t';
        if (s.pos.known())
            text << opt.input << ':' << s.pos.line;
        else
            text << '-';
        text << '\n';
    }
    text << "# end: " << footer << " after " << trace.steps.size() << " steps\n";

    if (!opt.trace_path.empty()) {
        if (!write_file(opt.trace_path, text.str(), err)) return kExitUsage;
        out << footer << " after " << trace.steps.size() << " steps; trace written to "
            << opt.trace_path << "\n";
    } else {
        out << text.str();
    }
    return code;
}

int do_dump(const Options &opt, std::ostream &out, std::ostream &err) {
    CheckSet all;
    all.postcondition = true; // show ensure edges in the dump
    CompileResult compiled = compile_input(opt, all, err);
    if (!compiled.ok()) return kExitUsage;

    if (opt.ast) {
        out << pretty_print(compiled.tree);
        return kExitSafe;
    }
    std::string dot = export_dot(*compiled.program);
    if (!opt.dot_path.empty()) {
        if (!write_file(opt.dot_path, dot, err)) return kExitUsage;
    } else if (opt.gxl_path.empty()) {
        out << dot;
    }
    if (!opt.gxl_path.empty()) {
        Configuration c = initial_configuration(compiled.program);
        stabilize(c);
        if (!write_file(opt.gxl_path, export_gxl(c), err)) return kExitUsage;
    }
    return kExitSafe;
}

} // namespace

int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"cscoop: compile, simulate and verify CoreSCOOP programs"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App *cmd, bool with_checks) {
        cmd->add_option("file", opt.input, "source file")->required();
        if (with_checks)
            cmd->add_option("--checks", opt.checks,
                            "comma-separated: deadlock,void-call,postcondition,stuck")
                ->delimiter(',');
        cmd->add_option("--queue", opt.queue, "request queue discipline")
            ->check(CLI::IsMember({"fifo", "bag"}));
        cmd->add_flag("--gc", opt.gc, "garbage-collect unreachable objects");
        cmd->add_option("--trace", opt.trace_path, "trace output path");
    };

    CLI::App *check = app.add_subcommand("check", "explore the state space");
    add_common(check, true);
    check->add_flag("--first", opt.first, "stop at the first violation");
    check->add_option("--bound", opt.bound,
                      "exploration depth bound in macro-steps (0 = unbounded)");
    check->add_option("--dot", opt.dot_path, "write the state space as DOT");
    check->add_option("--gxl", opt.gxl_path,
                      "write a configuration snapshot as GXL (violating state if any, "
                      "else the initial state)");
    check->add_flag("--stats", opt.stats, "print exploration statistics");

    CLI::App *run = app.add_subcommand("run", "simulate one pseudo-random execution");
    add_common(run, true);
    run->add_option("--seed", opt.seed, "random seed");
    run->add_option("--steps", opt.steps, "step cap");

    CLI::App *dump = app.add_subcommand("dump", "print the compiled program");
    dump->add_option("file", opt.input, "source file")->required();
    dump->add_option("--dot", opt.dot_path, "write control-flow graphs as DOT");
    dump->add_option("--gxl", opt.gxl_path, "write the initial configuration as GXL");
    dump->add_flag("--ast", opt.ast, "pretty-print the parsed source instead");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitSafe;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    CheckSet checks;
    std::string bad;
    if (!parse_checks(opt.checks, checks, bad)) {
        err << "error: unknown check '" << bad << "'\n";
        return kExitUsage;
    }

    if (check->parsed()) return do_check(opt, checks, out, err);
    if (run->parsed()) return do_run(opt, checks, out, err);
    return do_dump(opt, out, err);
}

} // namespace cscoop
