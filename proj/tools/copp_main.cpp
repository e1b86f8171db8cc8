// Command-line front end: encode/solve/search/generate/bench/trace.
// Exit codes: 0 success, 1 no solution, 2 usage or bad input, 3 internal
// verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "copp/bench.hpp"
#include "copp/core.hpp"
#include "copp/generators.hpp"
#include "copp/ip_encoder.hpp"
#include "copp/ip_solver.hpp"
#include "copp/problem.hpp"
#include "copp/search.hpp"
#include "copp/sensor.hpp"

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerification = 3;

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw copp::Error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out)
        throw copp::Error("cannot write " + path);
    out << text;
}

copp::ProblemFile load_problem(const std::string &path) {
    return copp::parse(read_file(path));
}

std::string plan_names(const copp::ProblemFile &p, const copp::Plan &plan) {
    std::string out;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        if (i)
            out += ' ';
        out += p.domain.action(plan.steps[i]).name;
    }
    return out;
}

void print_plan_block(const copp::ProblemFile &p, const copp::Plan &plan,
                      std::size_t goals_x, std::size_t goals_c) {
    std::printf("plan (%zu steps): %s\n", plan.steps.size(),
                plan_names(p, plan).c_str());
    std::printf("goals X: %zu\n", goals_x);
    std::printf("goals C: %zu\n", goals_c);
}

struct SolveIpArgs {
    std::string file;
    int horizon = 0;
    std::optional<int> k, j;
    std::optional<double> beta;
    bool exploit_error = false;
    bool prefix_padding = false;
    bool dump_constraints = false;
    double time_limit = 900.0;
    std::uint64_t node_limit = 0;
    std::string stats_path;
    std::string plan_out;
};

int run_solve_ip(const SolveIpArgs &a) {
    copp::ProblemFile p = load_problem(a.file);
    copp::EncodeOptions eo;
    eo.k_obfuscation = a.k;
    eo.j_legibility = a.j;
    eo.beta = a.beta;
    eo.exploit_error = a.exploit_error;
    eo.prefix_padding = a.prefix_padding;
    copp::IPModel model = copp::encode(p, a.horizon, eo);
    std::printf("model: %zu variables, %zu rows\n", model.num_vars(),
                model.num_constraints());
    if (a.dump_constraints)
        std::fputs(copp::dump_constraints(model).c_str(), stdout);

    std::ofstream stats;
    copp::SolverConfig cfg;
    cfg.time_limit_s = a.time_limit;
    cfg.node_limit = a.node_limit;
    if (!a.stats_path.empty()) {
        stats.open(a.stats_path);
        cfg.incumbent_callback = [&stats](const copp::IncumbentInfo &info) {
            char line[160];
            std::snprintf(line, sizeof line,
                          "{\"time\": %.3f, \"nodes\": %llu, "
                          "\"objective\": %g}\n",
                          info.time_s,
                          static_cast<unsigned long long>(info.nodes),
                          info.objective);
            stats << line;
            stats.flush();
        };
    }
    copp::SolveResult r = copp::solve(model, cfg);
    std::printf("status: %s\n", copp::solve_status_name(r.status));
    std::printf("time: %.3f s  nodes: %llu  propagations: %llu\n", r.time_s,
                static_cast<unsigned long long>(r.nodes),
                static_cast<unsigned long long>(r.propagations));
    if (!r.has_assignment())
        return kExitNoSolution;
    copp::DecodeResult d = copp::decode(model, r.assignment);
    std::printf("objective: %g\n", d.objective);
    print_plan_block(p, d.plan, d.goals_x, d.goals_c);
    if (!a.plan_out.empty())
        write_file(a.plan_out, copp::plan_to_text(p.domain, d.plan));
    return kExitSolved;
}

struct SolveSearchArgs {
    std::string file;
    int at_least = 1;
    int at_most = 0;
    int delta_max = 4;
    double time_limit = 900.0;
    std::uint64_t node_limit = 0;
    std::string plan_out;
};

int run_solve_search(const SolveSearchArgs &a) {
    copp::ProblemFile p = load_problem(a.file);
    copp::GoalSpec phi;
    phi.at_least_x = a.at_least;
    phi.at_most_c = a.at_most ? a.at_most
                              : static_cast<int>(p.goals.size());
    copp::SearchConfig cfg;
    cfg.delta_max = a.delta_max;
    cfg.time_limit_s = a.time_limit;
    if (a.node_limit)
        cfg.node_limit = a.node_limit;
    copp::SearchResult r = copp::plan_search(p, phi, cfg);
    const char *status = r.status == copp::SearchStatus::Solved ? "solved"
                         : r.status == copp::SearchStatus::Exhausted
                             ? "no-solution"
                             : "limit-reached";
    std::printf("status: %s\n", status);
    std::printf("time: %.3f s  expansions: %llu  delta: %d\n", r.time_s,
                static_cast<unsigned long long>(r.expansions),
                static_cast<int>(r.delta_used));
    if (r.status != copp::SearchStatus::Solved)
        return kExitNoSolution;
    print_plan_block(p, r.plan, r.goals_x, r.goals_c);
    if (!a.plan_out.empty())
        write_file(a.plan_out, copp::plan_to_text(p.domain, r.plan));
    return kExitSolved;
}

int run_baseline(const std::string &file, const std::string &plan_out) {
    copp::ProblemFile p = load_problem(file);
    copp::SearchConfig cfg;
    copp::SearchResult r = copp::baseline_gbfs(p, cfg);
    std::printf("status: %s\n",
                r.status == copp::SearchStatus::Solved ? "solved"
                                                       : "no-solution");
    if (r.status != copp::SearchStatus::Solved)
        return kExitNoSolution;
    print_plan_block(p, r.plan, r.goals_x, r.goals_c);
    if (!plan_out.empty())
        write_file(plan_out, copp::plan_to_text(p.domain, r.plan));
    return kExitSolved;
}

int run_export_lp(const std::string &file, int horizon,
                  const std::string &out) {
    copp::ProblemFile p = load_problem(file);
    copp::IPModel model = copp::encode(p, horizon);
    write_file(out, copp::export_lp(model));
    std::printf("wrote %s: %zu variables, %zu rows\n", out.c_str(),
                model.num_vars(), model.num_constraints());
    return kExitSolved;
}

int run_trace(const std::string &file, const std::string &plan_path) {
    copp::ProblemFile p = load_problem(file);
    copp::Plan plan = copp::parse_plan_text(p.domain, read_file(plan_path));
    copp::BeliefTrace tr = copp::run_trace(p.domain, p.sensors, plan);
    std::fputs(copp::format_trace(tr, p.goals).c_str(), stdout);
    for (std::size_t i = 0; i < p.sensors.size(); ++i) {
        std::vector<std::size_t> goals = copp::possible_goals(
            tr.observers[i].beliefs.back(), p.goals);
        std::printf("goals %s: %zu (", p.sensors[i].observer_id.c_str(),
                    goals.size());
        for (std::size_t g = 0; g < goals.size(); ++g)
            std::printf("%s%zu", g ? " " : "", goals[g] + 1);
        std::printf(")\n");
    }
    return kExitSolved;
}

struct GenCommon {
    int width = 7, height = 7;
    int true_index = 1;  // 1-based
    int horizon = 0;     // 0 = family default
    std::string out;
};

std::vector<copp::Cell> to_cells(const std::vector<int> &flat,
                                 const char *what) {
    if (flat.size() % 2)
        throw copp::BoundsError(std::string(what) +
                                " expects row/column pairs");
    std::vector<copp::Cell> cells;
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2)
        cells.push_back({flat[i], flat[i + 1]});
    return cells;
}

int emit_problem(const copp::ProblemFile &p, const std::string &out) {
    std::string text = copp::serialize(p);
    if (out.empty() || out == "-")
        std::fputs(text.c_str(), stdout);
    else {
        write_file(out, text);
        std::printf("wrote %s\n", out.c_str());
    }
    return kExitSolved;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"goal obfuscation / legibility planner"};
    app.require_subcommand(1);

    // solve-ip
    SolveIpArgs ip;
    CLI::App *c_ip = app.add_subcommand(
        "solve-ip", "optimal plan via the 0/1 integer program");
    c_ip->add_option("file", ip.file, "problem file")->required();
    c_ip->add_option("--horizon", ip.horizon, "timeline length")->required();
    int ip_k = -1, ip_j = -1;
    double ip_beta = -1.0;
    c_ip->add_option("--k", ip_k, "require at least k goals possible for X");
    c_ip->add_option("--j", ip_j, "allow at most j goals possible for C");
    c_ip->add_option("--beta", ip_beta, "objective weight in [0,1]");
    c_ip->add_flag("--exploit-error", ip.exploit_error,
                   "forbid the true goal from X's final belief");
    c_ip->add_flag("--prefix-padding", ip.prefix_padding,
                   "idle steps only after the last action");
    c_ip->add_flag("--dump-constraints", ip.dump_constraints,
                   "print every row before solving");
    c_ip->add_option("--time-limit", ip.time_limit, "seconds");
    c_ip->add_option("--node-limit", ip.node_limit, "branch nodes");
    c_ip->add_option("--solver-stats", ip.stats_path,
                     "append incumbent JSONL records here");
    c_ip->add_option("--plan-out", ip.plan_out, "write the plan here");

    // solve-search
    SolveSearchArgs se;
    CLI::App *c_se = app.add_subcommand(
        "solve-search", "satisficing plan via belief-space search");
    c_se->add_option("file", se.file, "problem file")->required();
    c_se->add_option("--at-least", se.at_least,
                     "goals that must stay possible for X")
        ->required();
    c_se->add_option("--at-most", se.at_most,
                     "goal cap for C (0 = no cap)")
        ->required();
    c_se->add_option("--delta-max", se.delta_max, "belief subset cap");
    c_se->add_option("--time-limit", se.time_limit, "seconds");
    c_se->add_option("--node-limit", se.node_limit, "expansions per delta");
    c_se->add_option("--plan-out", se.plan_out, "write the plan here");

    // baseline
    std::string base_file, base_plan_out;
    CLI::App *c_base = app.add_subcommand(
        "baseline", "observer-blind greedy plan to the true goal");
    c_base->add_option("file", base_file, "problem file")->required();
    c_base->add_option("--plan-out", base_plan_out, "write the plan here");

    // export-lp
    std::string lp_file, lp_out;
    int lp_horizon = 0;
    CLI::App *c_lp = app.add_subcommand("export-lp",
                                        "write the model in LP format");
    c_lp->add_option("file", lp_file, "problem file")->required();
    c_lp->add_option("--horizon", lp_horizon, "timeline length")->required();
    c_lp->add_option("-o,--out", lp_out, "output path")->required();

    // trace
    std::string tr_file, tr_plan;
    CLI::App *c_tr = app.add_subcommand(
        "trace", "replay a plan and print belief evolution");
    c_tr->add_option("file", tr_file, "problem file")->required();
    c_tr->add_option("plan", tr_plan, "plan file, one action per line")
        ->required();

    // gen
    CLI::App *c_gen = app.add_subcommand("gen", "emit generated problems");
    c_gen->require_subcommand(1);

    GenCommon gw;
    std::vector<int> gw_start{3, 3}, gw_goals;
    int gw_count = 0, gw_gpi = 3;
    unsigned gw_seed = 1;
    std::string gw_outdir = ".";
    CLI::App *c_gw = c_gen->add_subcommand("gridworld", "corridor-free grid");
    c_gw->add_option("--width", gw.width, "grid columns");
    c_gw->add_option("--height", gw.height, "grid rows");
    c_gw->add_option("--start", gw_start, "row col")->expected(2);
    c_gw->add_option("--goal", gw_goals, "row col (repeat)");
    c_gw->add_option("--true", gw.true_index, "1-based true goal");
    c_gw->add_option("--horizon", gw.horizon, "horizon hint");
    c_gw->add_option("-o,--out", gw.out, "output path (- = stdout)");
    c_gw->add_option("--count", gw_count, "suite mode: number of instances");
    c_gw->add_option("--goals-per-instance", gw_gpi, "suite mode: goals per file");
    c_gw->add_option("--seed", gw_seed, "suite mode: RNG seed");
    c_gw->add_option("--out-dir", gw_outdir, "suite mode: directory");

    GenCommon bp;
    std::vector<int> bp_agent{0, 0}, bp_box{1, 1}, bp_goals;
    CLI::App *c_bp = c_gen->add_subcommand("boxpush", "push the box home");
    c_bp->add_option("--width", bp.width, "grid columns");
    c_bp->add_option("--height", bp.height, "grid rows");
    c_bp->add_option("--agent", bp_agent, "row col")->expected(2);
    c_bp->add_option("--box", bp_box, "row col")->expected(2);
    c_bp->add_option("--goal", bp_goals, "row col (repeat)");
    c_bp->add_option("--true", bp.true_index, "1-based true goal");
    c_bp->add_option("--horizon", bp.horizon, "horizon hint");
    c_bp->add_option("-o,--out", bp.out, "output path (- = stdout)");

    GenCommon rc;
    std::vector<int> rc_start{0, 0}, rc_cans, rc_goals;
    int rc_battery = 4;
    CLI::App *c_rc = c_gen->add_subcommand("recycling",
                                           "carry cans to bins");
    c_rc->add_option("--width", rc.width, "grid columns");
    c_rc->add_option("--height", rc.height, "grid rows");
    c_rc->add_option("--start", rc_start, "row col")->expected(2);
    c_rc->add_option("--can", rc_cans, "row col (repeat)");
    c_rc->add_option("--goal", rc_goals, "row col (repeat)");
    c_rc->add_option("--true", rc.true_index, "1-based true goal");
    c_rc->add_option("--battery", rc_battery, "battery levels");
    c_rc->add_option("--horizon", rc.horizon, "horizon hint");
    c_rc->add_option("-o,--out", rc.out, "output path (- = stdout)");

    // bench
    std::string bench_dir, bench_csv_path, bench_plot_dir;
    copp::BenchSettings bs;
    int bench_k = -1, bench_j = -1;
    double bench_beta = -1.0;
    CLI::App *c_bench = app.add_subcommand(
        "bench", "run every problem in a directory through each method");
    c_bench->add_option("dir", bench_dir, "directory of problem files")
        ->required();
    c_bench->add_option("--methods", bs.methods,
                        "subset of baseline ip search")
        ->delimiter(',');
    c_bench->add_option("--csv", bench_csv_path, "write records here");
    c_bench->add_option("--plot-data", bench_plot_dir,
                        "write per-panel TSVs here");
    c_bench->add_option("--k", bench_k, "goals to keep possible for X");
    c_bench->add_option("--j", bench_j, "goal cap for C");
    c_bench->add_option("--beta", bench_beta, "objective weight (ip)");
    c_bench->add_option("--delta-max", bs.delta_max, "search: belief subset cap");
    c_bench->add_option("--time-limit", bs.time_limit_s, "seconds per run");
    c_bench->add_option("--node-limit", bs.node_limit, "nodes per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*c_ip) {
            if (ip_k >= 0)
                ip.k = ip_k;
            if (ip_j >= 0)
                ip.j = ip_j;
            if (ip_beta >= 0.0)
                ip.beta = ip_beta;
            return run_solve_ip(ip);
        }
        if (*c_se)
            return run_solve_search(se);
        if (*c_base)
            return run_baseline(base_file, base_plan_out);
        if (*c_lp)
            return run_export_lp(lp_file, lp_horizon, lp_out);
        if (*c_tr)
            return run_trace(tr_file, tr_plan);
        if (*c_gw) {
            if (gw_count > 0) {
                auto suite = copp::gen_gridworld_suite(
                    gw.width, gw.height, gw_count, gw_gpi, gw_seed,
                    gw.horizon ? gw.horizon : 12);
                namespace fs = std::filesystem;
                fs::create_directories(gw_outdir);
                for (std::size_t i = 0; i < suite.size(); ++i) {
                    char name[64];
                    std::snprintf(name, sizeof name,
                                  "gridworld-s%u-%02zu.copp", gw_seed, i + 1);
                    write_file((fs::path(gw_outdir) / name).string(),
                               copp::serialize(suite[i]));
                    std::printf("wrote %s\n",
                                (fs::path(gw_outdir) / name).c_str());
                }
                return kExitSolved;
            }
            std::vector<copp::Cell> goals = to_cells(gw_goals, "--goal");
            if (goals.empty())
                goals = {{0, 0}, {0, gw.width - 1}, {gw.height - 1, 0}};
            copp::ProblemFile p = copp::gen_gridworld(
                gw.width, gw.height, {gw_start[0], gw_start[1]}, goals,
                gw.true_index - 1, gw.horizon ? gw.horizon : 12);
            return emit_problem(p, gw.out);
        }
        if (*c_bp) {
            std::vector<copp::Cell> goals = to_cells(bp_goals, "--goal");
            if (goals.empty())
                goals = {{bp.height - 1, bp.width - 1}, {bp.height - 1, 0}};
            copp::ProblemFile p = copp::gen_boxpush(
                bp.width, bp.height, {bp_agent[0], bp_agent[1]},
                {bp_box[0], bp_box[1]}, goals, bp.true_index - 1,
                bp.horizon ? bp.horizon : 12);
            return emit_problem(p, bp.out);
        }
        if (*c_rc) {
            std::vector<copp::Cell> cans = to_cells(rc_cans, "--can");
            std::vector<copp::Cell> goals = to_cells(rc_goals, "--goal");
            if (cans.empty())
                cans = {{0, rc.width - 1}};
            if (goals.empty())
                goals = {{rc.height - 1, 0}, {rc.height - 1, rc.width - 1}};
            copp::ProblemFile p = copp::gen_recycling(
                rc.width, rc.height, {rc_start[0], rc_start[1]}, cans, goals,
                rc.true_index - 1, rc_battery,
                rc.horizon ? rc.horizon : 10);
            return emit_problem(p, rc.out);
        }
        if (*c_bench) {
            if (bench_k >= 0)
                bs.k = bench_k;
            if (bench_j >= 0)
                bs.j = bench_j;
            if (bench_beta >= 0.0)
                bs.beta = bench_beta;
            std::vector<copp::RunRecord> records =
                copp::bench_directory(bench_dir, bs);
            for (const copp::RunRecord &r : records)
                if (!r.note.empty())
                    std::fprintf(stderr, "%s/%s: %s\n", r.problem.c_str(),
                                 r.method.c_str(), r.note.c_str());
            if (!bench_csv_path.empty()) {
                write_file(bench_csv_path, copp::bench_csv(records));
                std::printf("wrote %s (%zu records)\n",
                            bench_csv_path.c_str(), records.size());
            }
            if (!bench_plot_dir.empty())
                copp::write_plot_data(records, bench_plot_dir);
            std::fputs(copp::bench_aggregate_text(records).c_str(), stdout);
            return kExitSolved;
        }
    } catch (const copp::EncodingSoundnessError &e) {
        std::fprintf(stderr, "internal verification failure: %s\n", e.what());
        return kExitVerification;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
