#pragma once

// Batch runner: sweeps every problem file in a directory through the chosen
// methods, collects one record per run, and writes the CSV / plot tables.
// Goal counts in records never come from the solvers' own bookkeeping; the
// returned plan is replayed through the sensor machinery here and the final
// possible-goal sets are counted from that replay.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "copp/core.hpp"
#include "copp/ip_encoder.hpp"
#include "copp/ip_solver.hpp"
#include "copp/problem.hpp"
#include "copp/search.hpp"
#include "copp/sensor.hpp"

namespace copp {

struct RunRecord {
    std::string problem;  // file stem
    std::string method;   // baseline | ip | search
    int k = 0;            // 0 = bound not applied
    int j = 0;
    double beta = 0.5;
    int delta = 0;        // search: delta that solved; others 0
    std::string status;
    double time_s = 0.0;
    int plan_len = -1;    // -1 = no plan
    int goals_x = -1;
    int goals_c = -1;
    std::string note;     // error text; not part of the CSV schema
};

struct BenchSettings {
    std::vector<std::string> methods{"baseline", "ip", "search"};
    std::optional<int> k;          // obfuscation bound for ip/search
    std::optional<int> j;          // legibility bound for ip/search
    std::optional<double> beta;    // ip objective weight override
    int delta_max = 4;
    double time_limit_s = 900.0;
    std::uint64_t node_limit = 0;
    int default_horizon = 12;      // when the file carries no hint
    int horizon_retries = 2;       // +2 each time the model is infeasible
};

namespace detail {

inline void count_goals(const ProblemFile &p, const Plan &plan,
                        RunRecord &rec) {
    BeliefTrace tr = run_trace(p.domain, p.sensors, plan);
    for (std::size_t i = 0; i < p.sensors.size(); ++i) {
        int n = static_cast<int>(
            possible_goals(tr.observers[i].beliefs.back(), p.goals).size());
        if (p.sensors[i].observer_id == "X")
            rec.goals_x = n;
        else
            rec.goals_c = n;
    }
    rec.plan_len = static_cast<int>(plan.steps.size());
}

} // namespace detail

// One problem through one method. Never throws for solver-level trouble;
// the record's status/note carry it instead.
inline RunRecord bench_run(const ProblemFile &p, const std::string &stem,
                           const std::string &method,
                           const BenchSettings &cfg) {
    RunRecord rec;
    rec.problem = stem;
    rec.method = method;
    rec.k = cfg.k.value_or(0);
    rec.j = cfg.j.value_or(0);
    rec.beta = cfg.beta ? *cfg.beta : p.beta.value_or(0.5);
    auto t0 = std::chrono::steady_clock::now();
    auto done = [&] {
        rec.time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
    };
    try {
        if (method == "baseline") {
            SearchConfig sc;
            sc.time_limit_s = cfg.time_limit_s;
            SearchResult r = baseline_gbfs(p, sc);
            done();
            rec.status = r.status == SearchStatus::Solved ? "solved"
                         : r.status == SearchStatus::Exhausted
                             ? "no-solution"
                             : "limit-reached";
            if (r.status == SearchStatus::Solved)
                detail::count_goals(p, r.plan, rec);
        } else if (method == "search") {
            SearchConfig sc;
            sc.delta_max = cfg.delta_max;
            sc.time_limit_s = cfg.time_limit_s;
            if (cfg.node_limit)
                sc.node_limit = cfg.node_limit;
            GoalSpec phi;
            if (cfg.k)
                phi.at_least_x = *cfg.k;
            if (cfg.j)
                phi.at_most_c = *cfg.j;
            SearchResult r = plan_search(p, phi, sc);
            done();
            rec.delta = r.delta_used;
            rec.status = r.status == SearchStatus::Solved ? "solved"
                         : r.status == SearchStatus::Exhausted
                             ? "no-solution"
                             : "limit-reached";
            if (r.status == SearchStatus::Solved)
                detail::count_goals(p, r.plan, rec);
        } else if (method == "ip") {
            int horizon = p.horizon_hint.value_or(cfg.default_horizon);
            double budget = cfg.time_limit_s;
            SolveResult sr;
            IPModel model;
            for (int attempt = 0;; ++attempt) {
                EncodeOptions eo;
                eo.k_obfuscation = cfg.k;
                eo.j_legibility = cfg.j;
                eo.beta = cfg.beta;
                model = encode(p, horizon, eo);
                SolverConfig scfg;
                scfg.time_limit_s = budget;
                scfg.node_limit = cfg.node_limit;
                sr = solve(model, scfg);
                budget -= sr.time_s;
                // A horizon too short shows up as infeasibility; stretch it
                // a couple of times before giving up.
                if (sr.status == SolveStatus::Infeasible &&
                    attempt < cfg.horizon_retries && budget > 0) {
                    horizon += 2;
                    continue;
                }
                break;
            }
            done();
            rec.status = solve_status_name(sr.status);
            if (sr.has_assignment()) {
                DecodeResult dr = decode(model, sr.assignment);
                detail::count_goals(p, dr.plan, rec);
            }
        } else {
            rec.status = "error";
            rec.note = "unknown method: " + method;
        }
    } catch (const std::exception &e) {
        done();
        rec.status = "error";
        rec.note = e.what();
    }
    return rec;
}

// All .copp files in dir (sorted by name) through every requested method.
// Individual failures land in their records; the sweep always finishes.
inline std::vector<RunRecord> bench_directory(const std::string &dir,
                                              const BenchSettings &cfg) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".copp")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> out;
    for (const fs::path &f : files) {
        ProblemFile p;
        try {
            std::ifstream in(f);
            std::stringstream buf;
            buf << in.rdbuf();
            p = parse(buf.str());
        } catch (const std::exception &e) {
            RunRecord rec;
            rec.problem = f.stem().string();
            rec.method = "-";
            rec.status = "parse-error";
            rec.note = e.what();
            out.push_back(std::move(rec));
            continue;
        }
        for (const std::string &m : cfg.methods)
            out.push_back(bench_run(p, f.stem().string(), m, cfg));
    }
    return out;
}

inline std::string bench_csv(const std::vector<RunRecord> &records) {
    std::ostringstream out;
    out << "problem,method,k,j,beta,delta,status,time_s,plan_len,goals_X,"
           "goals_C\n";
    char buf[64];
    for (const RunRecord &r : records) {
        std::snprintf(buf, sizeof buf, "%.6g", r.beta);
        out << r.problem << ',' << r.method << ',' << r.k << ',' << r.j << ','
            << buf << ',' << r.delta << ',' << r.status << ',';
        std::snprintf(buf, sizeof buf, "%.3f", r.time_s);
        out << buf << ',' << r.plan_len << ',' << r.goals_x << ','
            << r.goals_c << '\n';
    }
    return out.str();
}

struct MethodAggregate {
    std::string method;
    int runs = 0;
    int solved = 0;
    double mean_time_s = 0.0;
    double mean_plan_len = 0.0;   // over solved runs
    double mean_goal_diff = 0.0;  // mean goals_X - mean goals_C, solved runs
};

inline std::vector<MethodAggregate>
bench_aggregate(const std::vector<RunRecord> &records) {
    std::map<std::string, MethodAggregate> agg;
    std::map<std::string, std::pair<double, double>> goal_sums;
    for (const RunRecord &r : records) {
        if (r.method == "-")
            continue;
        MethodAggregate &a = agg[r.method];
        a.method = r.method;
        ++a.runs;
        a.mean_time_s += r.time_s;
        if (r.plan_len >= 0) {
            ++a.solved;
            a.mean_plan_len += r.plan_len;
            goal_sums[r.method].first += r.goals_x;
            goal_sums[r.method].second += r.goals_c;
        }
    }
    std::vector<MethodAggregate> out;
    for (auto &[name, a] : agg) {
        if (a.runs)
            a.mean_time_s /= a.runs;
        if (a.solved) {
            a.mean_plan_len /= a.solved;
            a.mean_goal_diff = (goal_sums[name].first -
                                goal_sums[name].second) /
                               a.solved;
        }
        out.push_back(a);
    }
    return out;
}

inline std::string bench_aggregate_text(const std::vector<RunRecord> &recs) {
    std::ostringstream out;
    out << "method      runs solved mean_time_s mean_plan_len goal_diff\n";
    char line[160];
    for (const MethodAggregate &a : bench_aggregate(recs)) {
        std::snprintf(line, sizeof line, "%-11s %4d %6d %11.3f %13.2f %9.2f\n",
                      a.method.c_str(), a.runs, a.solved, a.mean_time_s,
                      a.mean_plan_len, a.mean_goal_diff);
        out << line;
    }
    return out.str();
}

// One TSV per panel: rows are problems, columns are methods.
inline void write_plot_data(const std::vector<RunRecord> &records,
                            const std::string &dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> methods, problems;
    for (const RunRecord &r : records) {
        if (r.method != "-" &&
            std::find(methods.begin(), methods.end(), r.method) ==
                methods.end())
            methods.push_back(r.method);
        if (std::find(problems.begin(), problems.end(), r.problem) ==
            problems.end())
            problems.push_back(r.problem);
    }
    auto cell = [&](const std::string &prob, const std::string &meth,
                    auto getter) -> std::string {
        for (const RunRecord &r : records)
            if (r.problem == prob && r.method == meth)
                return getter(r);
        return "-";
    };
    struct Panel {
        const char *file;
        std::string (*get)(const RunRecord &);
    };
    Panel panels[] = {
        {"time.tsv",
         [](const RunRecord &r) {
             char b[32];
             std::snprintf(b, sizeof b, "%.3f", r.time_s);
             return std::string(b);
         }},
        {"plan_length.tsv",
         [](const RunRecord &r) {
             return r.plan_len >= 0 ? std::to_string(r.plan_len)
                                    : std::string("-");
         }},
        {"goal_counts.tsv",
         [](const RunRecord &r) {
             return r.goals_x >= 0 ? std::to_string(r.goals_x) + "/" +
                                         std::to_string(r.goals_c)
                                   : std::string("-");
         }},
    };
    for (const Panel &panel : panels) {
        std::ofstream out(fs::path(dir) / panel.file);
        out << "problem";
        for (const std::string &m : methods)
            out << '\t' << m;
        out << '\n';
        for (const std::string &prob : problems) {
            out << prob;
            for (const std::string &m : methods)
                out << '\t' << cell(prob, m, panel.get);
            out << '\n';
        }
    }
}

// Plan files: one action name per line; blanks and ';' comments ignored.
inline Plan parse_plan_text(const PlanningDomain &d, const std::string &text) {
    Plan plan;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto semi = line.find(';');
        if (semi != std::string::npos)
            line.erase(semi);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string name = line.substr(b, e - b + 1);
        if (!d.has_action(name))
            throw ParseError("unknown action '" + name + "'", lineno, 1);
        plan.steps.push_back(d.action_id(name));
    }
    return plan;
}

inline std::string plan_to_text(const PlanningDomain &d, const Plan &plan) {
    std::string out;
    for (ActionId a : plan.steps) {
        out += d.action(a).name;
        out += '\n';
    }
    return out;
}

} // namespace copp
