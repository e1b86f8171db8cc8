// End-to-end gate: one printed pass/fail line per shipped guarantee.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "copp/bench.hpp"
#include "copp/generators.hpp"
#include "copp/ip_encoder.hpp"
#include "copp/ip_solver.hpp"
#include "copp/search.hpp"
#include "oracles.hpp"

using namespace copp;
namespace fs = std::filesystem;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

void announce(int idx, const std::string &what, bool ok,
              const std::string &detail) {
    std::printf("acceptance %d (%s): %s%s%s\n", idx, what.c_str(),
                ok ? "PASS" : "FAIL", detail.empty() ? "" : " — ",
                detail.c_str());
    std::fflush(stdout);
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p);
    if (!in.good())
        throw Error("cannot read " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ProblemFile load_fixture(const std::string &name) {
    return parse(slurp(fs::path(COPP_PROBLEMS_DIR) / name));
}

std::set<oracle::FluentSet> as_sets(const Belief &b) {
    std::set<oracle::FluentSet> out;
    for (const State &s : b.states)
        out.insert(oracle::to_set(s));
    return out;
}

bool traces_match(const BeliefTrace &got, const oracle::RefTrace &want,
                  std::size_t n_observers) {
    if (got.states.size() != want.states.size())
        return false;
    for (std::size_t t = 0; t < got.states.size(); ++t)
        if (oracle::to_set(got.states[t]) != want.states[t])
            return false;
    for (std::size_t i = 0; i < n_observers; ++i) {
        const ObserverTrace &ot = got.observers[i];
        if (ot.beliefs.size() != want.beliefs[i].size())
            return false;
        for (std::size_t t = 0; t < ot.beliefs.size(); ++t)
            if (as_sets(ot.beliefs[t]) != want.beliefs[i][t])
                return false;
        if (ot.observations.size() != want.received[i].size())
            return false;
        for (std::size_t t = 0; t < ot.observations.size(); ++t)
            if (ot.observations[t] != want.received[i][t])
                return false;
    }
    return true;
}

// stdout of a CLI invocation plus its exit code
std::pair<int, std::string> run_cli(const std::string &args) {
    std::string cmd = std::string(COPP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        throw Error("popen failed");
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, n);
    int rc = pclose(pipe);
    return {WEXITSTATUS(rc), out};
}

int scan_goal_count(const std::string &text, const std::string &observer) {
    std::string key = "goals " + observer + ": ";
    auto pos = text.find(key);
    if (pos == std::string::npos)
        return -1;
    return std::atoi(text.c_str() + pos + key.size());
}

} // namespace

TEST(Acceptance, A1BeliefUpdateMatchesBruteForce) {
    double t0 = now_s();
    std::mt19937 rng(11);
    std::vector<PlanningDomain> domains;
    domains.push_back(
        gen_gridworld(3, 3, {1, 1}, {{0, 0}}, 0).domain);
    domains.push_back(
        gen_gridworld(4, 4, {2, 1}, {{0, 0}}, 0).domain);
    domains.push_back(
        gen_gridworld(5, 5, {2, 2}, {{0, 0}}, 0).domain);
    domains.push_back(
        gen_boxpush(3, 3, {0, 0}, {1, 1}, {{2, 2}}, 0).domain);
    domains.push_back(
        gen_boxpush(4, 3, {1, 0}, {1, 1}, {{1, 3}}, 0).domain);

    int cases = 0, mismatches = 0;
    for (int round = 0; round < 120; ++round) {
        const PlanningDomain &d = domains[round % domains.size()];
        std::vector<SensorModel> sensors{oracle::random_sensor(d, rng, "X"),
                                         oracle::random_sensor(d, rng, "C")};
        Plan plan = oracle::random_plan(d, rng, 6);
        std::vector<std::optional<ActionId>> steps;
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
            if (round % 4 == 0 && i == plan.steps.size() / 2)
                steps.push_back(std::nullopt);
            steps.emplace_back(plan.steps[i]);
        }
        BeliefTrace got = run_trace_steps(d, sensors, steps);
        oracle::RefTrace want = oracle::ref_run(d, sensors, steps);
        ++cases;
        mismatches += !traces_match(got, want, sensors.size());
    }
    bool ok = cases >= 100 && mismatches == 0;
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d/%d random traces agree, %.1f s",
                  cases - mismatches, cases, now_s() - t0);
    announce(1, "belief updates match brute-force enumeration", ok, detail);
    ASSERT_TRUE(ok);
}

TEST(Acceptance, A2IpSoundAndCompleteAtSmallScale) {
    double t0 = now_s();
    ProblemFile p = gen_gridworld(3, 3, {1, 1}, {{0, 0}, {0, 2}, {2, 0}}, 0);
    int incumbents = 0, decode_failures = 0, optimum_mismatches = 0;
    for (int horizon = 2; horizon <= 6; ++horizon) {
        IPModel m = encode(p, horizon);
        std::vector<std::vector<std::int8_t>> seen;
        SolverConfig cfg;
        cfg.incumbent_callback = [&](const IncumbentInfo &inc) {
            seen.push_back(inc.assignment);
        };
        SolveResult res = solve(m, cfg);
        if (res.status != SolveStatus::Optimal) {
            ++optimum_mismatches;
            continue;
        }
        for (const auto &asg : seen) {
            ++incumbents;
            try {
                decode(m, asg);  // replays and cross-checks every variable
            } catch (const EncodingSoundnessError &) {
                ++decode_failures;
            }
        }
        oracle::RefOptimum ref = oracle::ref_optimum(p, horizon, 0.5);
        if (!ref.found || std::abs(ref.objective - res.objective) > 1e-9)
            ++optimum_mismatches;
    }
    bool ok = incumbents > 0 && decode_failures == 0 &&
              optimum_mismatches == 0;
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "%d incumbents decoded cleanly over horizons 2-6, "
                  "optimum = brute force at each, %.1f s",
                  incumbents, now_s() - t0);
    announce(2, "exact solver sound and optimal on 3x3 grid", ok, detail);
    ASSERT_TRUE(ok);
}

TEST(Acceptance, A3SingleBoundVariantsAgreeOnGoalCounts) {
    double t0 = now_s();
    ProblemFile p = load_fixture("gridworld-7x7.copp");
    const int horizon = p.horizon_hint.value_or(12);
    struct Variant {
        const char *name;
        std::optional<int> k, j;
    } variants[] = {
        {"X>=3", 3, {}},
        {"C<=3", {}, 3},
        {"X>=1", 1, {}},
        {"C<=1", {}, 1},
    };
    bool ok = true;
    std::string detail;
    for (const Variant &v : variants) {
        EncodeOptions o;
        o.k_obfuscation = v.k;
        o.j_legibility = v.j;
        IPModel m = encode(p, horizon, o);
        SolverConfig cfg;
        cfg.time_limit_s = 900.0;  // per-variant budget
        SolveResult res = solve(m, cfg);
        std::size_t gx = 0, gc = 0;
        if (res.has_assignment()) {
            DecodeResult d = decode(m, res.assignment);
            gx = d.goals_x;
            gc = d.goals_c;
        }
        bool this_ok =
            res.status == SolveStatus::Optimal && gx == 3 && gc == 1;
        ok = ok && this_ok;
        char part[64];
        std::snprintf(part, sizeof part, "%s%s -> (%zu,%zu)",
                      detail.empty() ? "" : ", ", v.name, gx, gc);
        detail += part;
    }
    char tail[32];
    std::snprintf(tail, sizeof tail, ", %.1f s", now_s() - t0);
    detail += tail;
    announce(3, "7x7 single-bound plans all show 3 goals to X and 1 to C", ok,
             detail);
    ASSERT_TRUE(ok);
}

TEST(Acceptance, A4SuiteSearchMeetsBothBoundsWhenSolved) {
    double t0 = now_s();
    std::vector<fs::path> files;
    for (const auto &entry :
         fs::directory_iterator(fs::path(COPP_PROBLEMS_DIR) / "suite"))
        if (entry.path().extension() == ".copp")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    int solved = 0, bound_violations = 0;
    for (const fs::path &f : files) {
        ProblemFile p = parse(slurp(f));
        GoalSpec phi;
        phi.at_least_x = 2;
        phi.at_most_c = 2;
        SearchConfig cfg;
        cfg.time_limit_s = 900.0;  // per-instance budget
        SearchResult res = plan_search(p, phi, cfg);
        if (res.status != SearchStatus::Solved)
            continue;
        ++solved;
        std::vector<std::optional<ActionId>> steps;
        for (ActionId a : res.plan.steps)
            steps.emplace_back(a);
        oracle::RefTrace ref = oracle::ref_run(p.domain, p.sensors, steps);
        auto gx = oracle::ref_possible_goals(ref.beliefs[0].back(), p.goals);
        auto gc = oracle::ref_possible_goals(ref.beliefs[1].back(), p.goals);
        bool holds = satisfies(oracle::to_state(ref.states.back()),
                               p.goals.true_goal()) &&
                     gx.size() >= 2 && gc.size() <= 2;
        bound_violations += !holds;
    }
    bool ok = files.size() == 10 && solved >= 8 && bound_violations == 0;
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "%d/%zu solved, replayed bounds hold on all, %.1f s",
                  solved, files.size(), now_s() - t0);
    announce(4, "seeded 7x7 suite solved >= 8/10 under (X>=2, C<=2)", ok,
             detail);
    ASSERT_TRUE(ok);
}

TEST(Acceptance, A5LogisticsTraceCountsThroughTheCli) {
    std::string dir = COPP_PROBLEMS_DIR;
    auto [rc1, out1] =
        run_cli("trace " + dir + "/logistics.copp " + dir +
                "/logistics-plan1.plan");
    auto [rc2, out2] =
        run_cli("trace " + dir + "/logistics.copp " + dir +
                "/logistics-plan2.plan");
    int x1 = scan_goal_count(out1, "X"), c1 = scan_goal_count(out1, "C");
    int x2 = scan_goal_count(out2, "X"), c2 = scan_goal_count(out2, "C");
    bool ok = rc1 == 0 && rc2 == 0 && c1 == 4 && x1 == 6 && c2 == 1 &&
              x2 == 6;
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "plan-1 (C,X)=(%d,%d), plan-2 (C,X)=(%d,%d)", c1, x1, c2,
                  x2);
    announce(5, "logistics plans show (4,6) and (1,6) via the CLI trace", ok,
             detail);
    ASSERT_TRUE(ok);
}

TEST(Acceptance, A6SensorErrorExploitationHidesTheTrueGoal) {
    double t0 = now_s();
    ProblemFile p = load_fixture("sensor-error.copp");
    int solutions = 0, leaks = 0, feasible_horizons = 0;
    for (int horizon = 2; horizon <= 6; ++horizon) {
        EncodeOptions o;
        o.exploit_error = true;
        IPModel m = encode(p, horizon, o);
        std::vector<std::vector<std::int8_t>> seen;
        SolverConfig cfg;
        cfg.incumbent_callback = [&](const IncumbentInfo &inc) {
            seen.push_back(inc.assignment);
        };
        SolveResult res = solve(m, cfg);
        if (!res.has_assignment())
            continue;
        ++feasible_horizons;
        seen.push_back(res.assignment);
        for (const auto &asg : seen) {
            ++solutions;
            DecodeResult d = decode(m, asg);
            auto gx = possible_goals(d.trace.observer("X").beliefs.back(),
                                     p.goals);
            if (std::find(gx.begin(), gx.end(), p.goals.true_goal_index) !=
                gx.end())
                ++leaks;
        }
    }
    bool ok = feasible_horizons > 0 && solutions > 0 && leaks == 0;
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "%d solutions over %d feasible horizons, none leaks, %.1f s",
                  solutions, feasible_horizons, now_s() - t0);
    announce(6, "misreporting sensor keeps the true goal out of X's set", ok,
             detail);
    ASSERT_TRUE(ok);
}

TEST(Acceptance, A7SolverEqualsEnumerationOnRandomModels) {
    double t0 = now_s();
    std::mt19937 rng(77);
    int rounds = 0, disagreements = 0, feasible = 0;
    for (int round = 0; round < 50; ++round) {
        std::uniform_int_distribution<int> nvars(round < 40 ? 4 : 17,
                                                 round < 40 ? 16 : 22);
        IPModel m = oracle::random_model(rng, nvars(rng));
        ++rounds;
        oracle::RefEnum ref = oracle::enumerate_model(m);
        SolveResult res = solve(m);
        if (ref.feasible) {
            ++feasible;
            bool same = res.status == SolveStatus::Optimal &&
                        std::abs(res.objective - ref.objective) < 1e-9 &&
                        verify(m, res.assignment).ok;
            disagreements += !same;
        } else {
            disagreements += res.status != SolveStatus::Infeasible;
        }
    }
    bool ok = rounds == 50 && disagreements == 0 && feasible > 0 &&
              feasible < 50;
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "50 models (%d feasible), 0 disagreements, %.1f s",
                  feasible, now_s() - t0);
    announce(7, "branch-and-bound equals exhaustive enumeration", ok, detail);
    ASSERT_TRUE(ok);
}

TEST(Acceptance, A8ProblemFilesRoundTripStructurally) {
    double t0 = now_s();
    int checked = 0, failures = 0;
    auto check = [&](const ProblemFile &p) {
        ++checked;
        try {
            failures += !problems_equal(p, parse(serialize(p)));
        } catch (const std::exception &) {
            ++failures;
        }
    };
    for (const char *sub : {"", "suite"})
        for (const auto &entry :
             fs::directory_iterator(fs::path(COPP_PROBLEMS_DIR) / sub))
            if (entry.path().extension() == ".copp")
                check(parse(slurp(entry.path())));
    int shipped = checked;
    check(gen_gridworld(5, 4, {2, 2}, {{0, 0}, {3, 3}}, 1));
    check(gen_boxpush(4, 4, {0, 0}, {1, 1}, {{3, 3}, {0, 3}}, 0));
    check(gen_recycling(4, 4, {0, 0}, {{1, 1}, {2, 3}}, {{3, 0}, {0, 3}}, 1,
                        4));
    for (const ProblemFile &p : gen_gridworld_suite(7, 7, 5, 3, 5))
        check(p);
    bool ok = shipped >= 15 && failures == 0;
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "%d files (%d shipped + %d generated), %.1f s", checked,
                  shipped, checked - shipped, now_s() - t0);
    announce(8, "parse/serialize round-trip is structurally exact", ok,
             detail);
    ASSERT_TRUE(ok);
}
