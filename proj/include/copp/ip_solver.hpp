#pragma once

// Depth-first branch and bound for the pure 0/1 models produced by the
// encoder. No LP relaxation: pruning comes from integer activity-bound
// propagation on every row plus an optimistic completion bound on the
// objective. Branching order is fixed (variable id order, which the encoder
// lays out time-major), so runs are deterministic.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "copp/errors.hpp"
#include "copp/ip_model.hpp"

namespace copp {

enum class SolveStatus {
    Optimal,      // search space exhausted with an incumbent
    Infeasible,   // search space exhausted without one
    Feasible,     // hit a limit holding an incumbent
    LimitReached, // hit a limit with no incumbent
};

inline const char *solve_status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::LimitReached: return "limit-reached";
    }
    return "?";
}

struct IncumbentInfo {
    double time_s = 0.0;
    std::uint64_t nodes = 0;
    double objective = 0.0;
    const std::vector<std::int8_t> &assignment;
};

struct SolverConfig {
    double time_limit_s = 900.0;
    std::uint64_t node_limit = 0;  // 0 = unlimited
    std::function<void(const IncumbentInfo &)> incumbent_callback;
};

struct SolveResult {
    SolveStatus status = SolveStatus::LimitReached;
    std::vector<std::int8_t> assignment;  // incumbent, if any
    double objective = 0.0;
    std::uint64_t nodes = 0;
    std::uint64_t propagations = 0;
    double time_s = 0.0;
    bool has_assignment() const {
        return status == SolveStatus::Optimal ||
               status == SolveStatus::Feasible;
    }
};

struct VerifyResult {
    bool ok = true;
    std::vector<std::size_t> violated;  // row indices
};

// Plain re-evaluation of every row against a full assignment.
inline VerifyResult verify(const IPModel &m,
                           const std::vector<std::int8_t> &assignment) {
    VerifyResult r;
    if (assignment.size() != m.num_vars())
        throw BoundsError("assignment size does not match the model");
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        const LinearConstraint &c = m.constraints[i];
        long long lhs = 0;
        for (const auto &[var, coef] : c.terms)
            lhs += static_cast<long long>(coef) * assignment[var];
        bool ok = true;
        switch (c.cmp) {
        case LinearConstraint::Cmp::LE: ok = lhs <= c.rhs; break;
        case LinearConstraint::Cmp::GE: ok = lhs >= c.rhs; break;
        case LinearConstraint::Cmp::EQ: ok = lhs == c.rhs; break;
        }
        if (!ok) {
            r.ok = false;
            r.violated.push_back(i);
        }
    }
    return r;
}

namespace detail {

class BnbSolver {
public:
    BnbSolver(const IPModel &m, const SolverConfig &cfg) : m_(m), cfg_(cfg) {
        build_rows();
    }

    SolveResult run() {
        start_ = Clock::now();
        n_ = m_.num_vars();
        value_.assign(n_, -1);
        best_obj_ = std::numeric_limits<double>::infinity();

        bool exhausted = root_propagate() ? dfs() : true;

        SolveResult out;
        out.nodes = nodes_;
        out.propagations = propagations_;
        out.time_s = elapsed();
        if (!best_.empty()) {
            out.assignment = best_;
            out.objective = best_obj_;
            out.status =
                exhausted ? SolveStatus::Optimal : SolveStatus::Feasible;
        } else {
            out.status = exhausted ? SolveStatus::Infeasible
                                   : SolveStatus::LimitReached;
        }
        return out;
    }

private:
    using Clock = std::chrono::steady_clock;

    struct Row {
        long long lo = 0, hi = 0;
        bool has_lo = false, has_hi = false;
        long long min_act = 0, max_act = 0;  // over current fixings
        int max_abs = 0;
        std::vector<std::pair<int, int>> terms;  // (var, coefficient)
    };

    void build_rows() {
        rows_.reserve(m_.constraints.size());
        occ_.assign(m_.num_vars(), {});
        for (const LinearConstraint &c : m_.constraints) {
            Row r;
            r.terms = c.terms;
            switch (c.cmp) {
            case LinearConstraint::Cmp::LE:
                r.has_hi = true;
                r.hi = c.rhs;
                break;
            case LinearConstraint::Cmp::GE:
                r.has_lo = true;
                r.lo = c.rhs;
                break;
            case LinearConstraint::Cmp::EQ:
                r.has_lo = r.has_hi = true;
                r.lo = r.hi = c.rhs;
                break;
            }
            for (const auto &[var, coef] : r.terms) {
                if (coef < 0)
                    r.min_act += coef;
                else
                    r.max_act += coef;
                r.max_abs = std::max(r.max_abs, coef < 0 ? -coef : coef);
                occ_[var].emplace_back(static_cast<int>(rows_.size()), coef);
            }
            rows_.push_back(std::move(r));
        }
    }

    double elapsed() const {
        return std::chrono::duration<double>(Clock::now() - start_).count();
    }

    bool out_of_budget() {
        if (cfg_.node_limit && nodes_ >= cfg_.node_limit)
            return true;
        // Clock reads are costly next to propagation; sample them.
        if ((++budget_ticks_ & 0x3ff) == 0 && elapsed() > cfg_.time_limit_s)
            timed_out_ = true;
        return timed_out_;
    }

    // Optimistic completion: fixed contributions plus every still-free
    // negative coefficient. The objective only touches goal indicators, so
    // a full rescan is cheap and avoids incremental float drift.
    double bound() const {
        double b = 0.0;
        for (const auto &[var, coef] : m_.objective) {
            if (value_[var] == -1)
                b += coef < 0 ? coef : 0.0;
            else if (value_[var] == 1)
                b += coef;
        }
        return b;
    }

    // Fix var, update all row activities (always completely, so unfix stays
    // symmetric), report conflicts, queue rows that became tight.
    bool fix(int var, std::int8_t val) {
        value_[var] = val;
        trail_.push_back(var);
        bool ok = true;
        for (const auto &[ri, coef] : occ_[var]) {
            Row &r = rows_[ri];
            long long delta = static_cast<long long>(coef) * val;
            r.min_act += delta - (coef < 0 ? coef : 0);
            r.max_act += delta - (coef > 0 ? coef : 0);
            if ((r.has_hi && r.min_act > r.hi) ||
                (r.has_lo && r.max_act < r.lo))
                ok = false;
            else if ((r.has_hi && r.min_act + r.max_abs > r.hi) ||
                     (r.has_lo && r.max_act - r.max_abs < r.lo))
                pending_.push_back(ri);
        }
        return ok;
    }

    void unfix(int var) {
        std::int8_t val = value_[var];
        for (const auto &[ri, coef] : occ_[var]) {
            Row &r = rows_[ri];
            long long delta = static_cast<long long>(coef) * val;
            r.min_act -= delta - (coef < 0 ? coef : 0);
            r.max_act -= delta - (coef > 0 ? coef : 0);
        }
        value_[var] = -1;
    }

    void pop_to(std::size_t mark) {
        while (trail_.size() > mark) {
            unfix(trail_.back());
            trail_.pop_back();
        }
    }

    // Scan a row whose slack got tight; force unfixed vars whose values have
    // become implied. Returns false on conflict.
    bool scan_row(int ri) {
        Row &r = rows_[ri];
        if ((r.has_hi && r.min_act > r.hi) || (r.has_lo && r.max_act < r.lo))
            return false;
        if (!((r.has_hi && r.min_act + r.max_abs > r.hi) ||
              (r.has_lo && r.max_act - r.max_abs < r.lo)))
            return true;
        for (const auto &[v, c] : r.terms) {
            if (value_[v] != -1)
                continue;
            // Activities with v pinned: its contribution min(0,c)/max(0,c)
            // in the current bounds gets replaced by c or by 0.
            long long min_if1 = r.min_act - (c < 0 ? c : 0) + c;
            long long max_if1 = r.max_act - (c > 0 ? c : 0) + c;
            long long min_if0 = r.min_act - (c < 0 ? c : 0);
            long long max_if0 = r.max_act - (c > 0 ? c : 0);
            bool bad1 = (r.has_hi && min_if1 > r.hi) ||
                        (r.has_lo && max_if1 < r.lo);
            bool bad0 = (r.has_hi && min_if0 > r.hi) ||
                        (r.has_lo && max_if0 < r.lo);
            if (bad0 && bad1)
                return false;
            if (bad0 || bad1) {
                ++propagations_;
                if (!fix(v, bad0 ? 1 : 0))
                    return false;
            }
        }
        return true;
    }

    bool propagate() {
        while (!pending_.empty()) {
            int ri = pending_.back();
            pending_.pop_back();
            if (!scan_row(ri))
                return false;
        }
        return true;
    }

    bool root_propagate() {
        pending_.clear();
        for (int ri = 0; ri < static_cast<int>(rows_.size()); ++ri)
            if (!scan_row(ri))
                return false;
        return propagate();
    }

    void record_incumbent() {
        best_ = value_;
        best_obj_ = bound();  // all vars fixed: the exact objective
        if (cfg_.incumbent_callback) {
            IncumbentInfo info{elapsed(), nodes_, best_obj_, best_};
            cfg_.incumbent_callback(info);
        }
    }

    std::int8_t first_value(int var) const {
        // Trying "action fires" first reaches goal-satisfying leaves sooner.
        return m_.variables[var].kind == VarKind::Action ? 1 : 0;
    }

    // Returns true if the tree was exhausted (no limit hit).
    bool dfs() {
        struct Frame {
            int var;
            std::size_t trail_mark;
            bool flipped;
        };
        std::vector<Frame> stack;
        int cursor = 0;
        bool exhausted = true;

        auto next_unfixed = [&](int from) {
            int v = from;
            while (v < static_cast<int>(n_) && value_[v] != -1)
                ++v;
            return v;
        };

        for (;;) {
            // Descend while the partial assignment survives.
            for (;;) {
                if (!best_.empty() && bound() >= best_obj_ - 1e-9)
                    break;  // cannot beat the incumbent
                int var = next_unfixed(cursor);
                if (var == static_cast<int>(n_)) {
                    record_incumbent();
                    break;
                }
                ++nodes_;
                if (out_of_budget()) {
                    exhausted = false;
                    break;
                }
                stack.push_back({var, trail_.size(), false});
                pending_.clear();
                if (fix(var, first_value(var)) && propagate()) {
                    cursor = var;
                    continue;
                }
                break;  // conflict: flip below
            }
            // Backtrack to the deepest frame with an untried value.
            for (;;) {
                if (stack.empty())
                    return exhausted;
                if (timed_out_ ||
                    (cfg_.node_limit && nodes_ >= cfg_.node_limit)) {
                    pop_to(stack.front().trail_mark);
                    return false;
                }
                Frame &f = stack.back();
                pop_to(f.trail_mark);
                if (!f.flipped) {
                    f.flipped = true;
                    if (best_.empty() || bound() < best_obj_ - 1e-9) {
                        pending_.clear();
                        if (fix(f.var, first_value(f.var) ? 0 : 1) &&
                            propagate()) {
                            cursor = f.var;
                            break;  // descend again
                        }
                        pop_to(f.trail_mark);
                    }
                }
                stack.pop_back();
                cursor = stack.empty() ? 0 : stack.back().var;
            }
        }
    }

    const IPModel &m_;
    const SolverConfig &cfg_;
    std::size_t n_ = 0;

    std::vector<Row> rows_;
    std::vector<std::vector<std::pair<int, int>>> occ_;  // var -> (row, coef)

    std::vector<std::int8_t> value_;
    std::vector<int> trail_;
    std::vector<int> pending_;

    std::vector<std::int8_t> best_;
    double best_obj_ = 0.0;

    std::uint64_t nodes_ = 0;
    std::uint64_t propagations_ = 0;
    std::uint64_t budget_ticks_ = 0;
    bool timed_out_ = false;
    Clock::time_point start_;
};

} // namespace detail

inline SolveResult solve(const IPModel &m, const SolverConfig &cfg = {}) {
    detail::BnbSolver s(m, cfg);
    SolveResult r = s.run();
    if (r.has_assignment()) {
        VerifyResult v = verify(m, r.assignment);
        if (!v.ok)
            throw EncodingSoundnessError(
                "solver returned an assignment violating " +
                std::to_string(v.violated.size()) + " rows");
    }
    return r;
}

} // namespace copp
