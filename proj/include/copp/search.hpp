#pragma once

// Satisficing forward search over (state, belief_X, belief_C) nodes.
//
// The outer loop widens a belief-cardinality parameter delta; each inner run
// is a fresh best-first search on f = g + h with FIFO tie-breaking and
// duplicate detection on the exact (state, full beliefs) key. Approximate
// beliefs — delta-sized subsets of the full belief — only shape the
// heuristic: sibling entries that differ just in the subset choice share a
// duplicate key, so only the best-scored choice ever gets expanded. We
// therefore compute the best subset per observer term directly instead of
// materializing every combination.
//
// The goal test is exact (full beliefs) and every returned plan is
// re-verified through an independent trace replay.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "copp/core.hpp"
#include "copp/heuristics.hpp"
#include "copp/problem.hpp"
#include "copp/sensor.hpp"

namespace copp {

// Phi: at least k goals possible for X, at most j possible for C.
struct GoalSpec {
    std::size_t at_least_x = 1;  // k
    std::size_t at_most_c = 0;   // j; 0 = |goals| (vacuous)
    // Heuristic steering only; correctness comes from the exact goal test.
    std::vector<std::size_t> decoys_x;   // goals X should keep plausible
    std::vector<std::size_t> targets_c;  // goals to push out of C's belief
};

struct SearchConfig {
    std::size_t delta_max = 4;
    std::size_t node_limit = 2000000;  // expansions per delta run
    double time_limit_s = 900.0;       // cumulative over the delta loop
};

enum class SearchStatus { Solved, Exhausted, LimitReached };

struct SearchResult {
    SearchStatus status = SearchStatus::Exhausted;
    Plan plan;
    BeliefTrace trace;
    std::size_t delta_used = 0;
    std::size_t expansions = 0;
    double time_s = 0.0;
    std::size_t goals_x = 0;
    std::size_t goals_c = 0;
};

namespace detail {

struct NodeKey {
    State state;
    std::vector<State> bx;
    std::vector<State> bc;

    bool operator==(const NodeKey &o) const {
        return state == o.state && bx == o.bx && bc == o.bc;
    }
};

struct NodeKeyHash {
    static void mix(std::size_t &h, std::size_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    std::size_t operator()(const NodeKey &k) const {
        StateHash sh;
        std::size_t h = sh(k.state);
        for (const State &s : k.bx)
            mix(h, sh(s));
        mix(h, 0xabcdull);
        for (const State &s : k.bc)
            mix(h, sh(s));
        return h;
    }
};

struct SearchNode {
    State state;
    Belief bx, bc;                   // exact beliefs
    std::vector<State> ax, ac;       // approximate beliefs, |.| <= delta
    std::int64_t parent = -1;
    ActionId via = 0;
    double g = 0.0;
    double h = 0.0;
};

struct QueueEntry {
    double f;
    std::uint64_t seq;  // FIFO among equal f
    std::size_t node;
    bool operator>(const QueueEntry &o) const {
        if (f != o.f)
            return f > o.f;
        return seq > o.seq;
    }
};

// Best delta-subset for the obfuscation term
//   min over subsets A (|A| <= delta) of max over decoys g of
//     min over s in A of h_add(s, g).
// With enough room each decoy gets its own closest state (the lower bound
// over all subsets); otherwise fill slots greedily.
inline std::pair<double, std::vector<State>>
best_obfuscation_subset(const AdditiveHeuristic &hadd,
                        const std::vector<State> &belief,
                        const std::vector<const State *> &decoy_goals,
                        std::size_t delta) {
    if (decoy_goals.empty())
        return {0.0, {}};
    if (belief.empty())
        return {kCostSentinel, {}};
    std::size_t room = std::min(delta, belief.size());
    std::vector<std::vector<double>> d(decoy_goals.size(),
                                       std::vector<double>(belief.size()));
    for (std::size_t gi = 0; gi < decoy_goals.size(); ++gi)
        for (std::size_t si = 0; si < belief.size(); ++si)
            d[gi][si] = hadd.clamped_cost(belief[si], *decoy_goals[gi]);

    std::vector<std::size_t> chosen;
    if (decoy_goals.size() <= room) {
        for (std::size_t gi = 0; gi < decoy_goals.size(); ++gi) {
            std::size_t best = 0;
            for (std::size_t si = 1; si < belief.size(); ++si)
                if (d[gi][si] < d[gi][best])
                    best = si;
            chosen.push_back(best);
        }
    } else {
        std::vector<double> cur(decoy_goals.size(), kCostSentinel);
        for (std::size_t slot = 0; slot < room; ++slot) {
            std::size_t best = belief.size();
            double best_val = kCostSentinel + 1;
            for (std::size_t si = 0; si < belief.size(); ++si) {
                double val = 0.0;
                for (std::size_t gi = 0; gi < decoy_goals.size(); ++gi)
                    val = std::max(val, std::min(cur[gi], d[gi][si]));
                if (val < best_val) {
                    best_val = val;
                    best = si;
                }
            }
            chosen.push_back(best);
            for (std::size_t gi = 0; gi < decoy_goals.size(); ++gi)
                cur[gi] = std::min(cur[gi], d[gi][best]);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    std::vector<State> subset;
    double value = 0.0;
    for (std::size_t gi = 0; gi < decoy_goals.size(); ++gi) {
        double best = kCostSentinel;
        for (std::size_t si : chosen)
            best = std::min(best, d[gi][si]);
        value = std::max(value, best);
    }
    for (std::size_t si : chosen)
        subset.push_back(belief[si]);
    return {value, std::move(subset)};
}

// Best delta-subset for the legibility term: maximize
//   min over targets g of dist(A, g) = min over s in A of score(s),
// so take the delta states with the largest score(s) = min_g h_add(s, g).
inline std::pair<double, std::vector<State>>
best_legibility_subset(const AdditiveHeuristic &hadd,
                       const std::vector<State> &belief,
                       const std::vector<const State *> &target_goals,
                       std::size_t delta) {
    if (target_goals.empty())
        return {0.0, {}};
    if (belief.empty())
        return {kCostSentinel, {}};
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(belief.size());
    for (std::size_t si = 0; si < belief.size(); ++si) {
        double score = kCostSentinel;
        for (const State *g : target_goals)
            score = std::min(score, hadd.clamped_cost(belief[si], *g));
        scored.emplace_back(score, si);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto &a, const auto &b) {
                         return a.first > b.first;
                     });
    std::size_t room = std::min(delta, belief.size());
    std::vector<std::size_t> idx;
    double value = kCostSentinel;
    for (std::size_t i = 0; i < room; ++i) {
        idx.push_back(scored[i].second);
        value = std::min(value, scored[i].first);
    }
    std::sort(idx.begin(), idx.end());
    std::vector<State> subset;
    for (std::size_t si : idx)
        subset.push_back(belief[si]);
    return {value, std::move(subset)};
}

} // namespace detail

inline bool goal_test(const State &state, const Belief &bx, const Belief &bc,
                      const ProblemFile &p, const GoalSpec &phi) {
    if (!satisfies(state, p.goals.true_goal()))
        return false;
    std::size_t j = phi.at_most_c == 0 ? p.goals.size() : phi.at_most_c;
    return possible_goals(bx, p.goals).size() >= phi.at_least_x &&
           possible_goals(bc, p.goals).size() <= j;
}

// Fill in default decoy/target goal choices: decoys are the k-1 non-true
// goals cheapest to reach from the initial state, exclusion targets the
// |goals|-j ones most expensive to reach from it.
inline GoalSpec resolve_goal_spec(const ProblemFile &p, GoalSpec phi,
                                  const AdditiveHeuristic &hadd) {
    std::size_t n = p.goals.size();
    if (phi.at_least_x < 1 || phi.at_least_x > n)
        throw BoundsError("at-least bound outside [1, |goals|]");
    std::size_t j = phi.at_most_c == 0 ? n : phi.at_most_c;
    if (j < 1 || j > n)
        throw BoundsError("at-most bound outside [1, |goals|]");
    phi.at_most_c = j;
    for (std::size_t gi : phi.decoys_x)
        if (gi >= n)
            throw BoundsError("decoy goal index out of range");
    for (std::size_t gi : phi.targets_c) {
        if (gi >= n)
            throw BoundsError("target goal index out of range");
        if (gi == p.goals.true_goal_index)
            throw BoundsError("true goal cannot be a legibility target");
    }
    std::vector<std::pair<double, std::size_t>> others;
    for (std::size_t gi = 0; gi < n; ++gi)
        if (gi != p.goals.true_goal_index)
            others.emplace_back(hadd.clamped_cost(p.domain.initial,
                                                  p.goals.goals[gi]),
                                gi);
    if (phi.decoys_x.empty() && phi.at_least_x >= 2) {
        auto byCost = others;
        std::stable_sort(byCost.begin(), byCost.end());
        for (std::size_t i = 0; i + 1 < phi.at_least_x && i < byCost.size(); ++i)
            phi.decoys_x.push_back(byCost[i].second);
    }
    if (phi.targets_c.empty() && j < n) {
        auto byCost = others;
        std::stable_sort(byCost.begin(), byCost.end(),
                         [](const auto &a, const auto &b) {
                             return a.first > b.first;
                         });
        for (std::size_t i = 0; i < n - j && i < byCost.size(); ++i)
            phi.targets_c.push_back(byCost[i].second);
    }
    return phi;
}

namespace detail {

inline double node_heuristic(const ProblemFile &p, const AdditiveHeuristic &hadd,
                             const GoalSpec &phi, std::size_t delta,
                             const State &state, const Belief &bx,
                             const Belief &bc, std::vector<State> &ax_out,
                             std::vector<State> &ac_out) {
    std::vector<const State *> decoys, targets;
    for (std::size_t gi : phi.decoys_x)
        decoys.push_back(&p.goals.goals[gi]);
    for (std::size_t gi : phi.targets_c)
        targets.push_back(&p.goals.goals[gi]);
    double base = hadd.clamped_cost(state, p.goals.true_goal());
    auto [obf, ax] = best_obfuscation_subset(hadd, bx.states, decoys, delta);
    auto [leg, ac] = best_legibility_subset(hadd, bc.states, targets, delta);
    ax_out = std::move(ax);
    ac_out = std::move(ac);
    return base + obf - leg;
}

} // namespace detail

// Delta-widening satisficing search. Exhaustion at any delta already proves
// no (state, beliefs) key satisfies the goal test — the key space explored
// does not depend on delta — so the loop stops early on it.
inline SearchResult plan_search(const ProblemFile &p, const GoalSpec &phi_in,
                                const SearchConfig &cfg = {}) {
    using namespace detail;
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };
    if (cfg.delta_max < 1)
        throw BoundsError("delta_max must be at least 1");

    AdditiveHeuristic hadd(p.domain);
    GoalSpec phi = resolve_goal_spec(p, phi_in, hadd);
    const SensorModel &mx = p.sensor("X");
    const SensorModel &mc = p.sensor("C");

    SearchResult result;
    for (std::size_t delta = 1; delta <= cfg.delta_max; ++delta) {
        std::vector<SearchNode> arena;
        std::priority_queue<QueueEntry, std::vector<QueueEntry>,
                            std::greater<QueueEntry>>
            open;
        std::unordered_set<NodeKey, NodeKeyHash> closed;
        std::uint64_t seq = 0;

        SearchNode root;
        root.state = p.domain.initial;
        root.bx.owner = "X";
        root.bx.states = {p.domain.initial};
        root.bc.owner = "C";
        root.bc.states = {p.domain.initial};
        root.h = node_heuristic(p, hadd, phi, delta, root.state, root.bx,
                                root.bc, root.ax, root.ac);
        arena.push_back(std::move(root));
        open.push({arena[0].g + arena[0].h, seq++, 0});

        bool limit_hit = false;
        std::size_t run_expansions = 0;
        while (!open.empty()) {
            if (elapsed() > cfg.time_limit_s || run_expansions >= cfg.node_limit) {
                limit_hit = true;
                break;
            }
            QueueEntry entry = open.top();
            open.pop();
            const std::size_t ni = entry.node;
            NodeKey key{arena[ni].state, arena[ni].bx.states,
                        arena[ni].bc.states};
            if (!closed.insert(std::move(key)).second)
                continue;
            ++run_expansions;
            ++result.expansions;

            if (goal_test(arena[ni].state, arena[ni].bx, arena[ni].bc, p, phi)) {
                Plan plan;
                for (std::int64_t cur = static_cast<std::int64_t>(ni);
                     arena[cur].parent >= 0; cur = arena[cur].parent)
                    plan.steps.push_back(arena[cur].via);
                std::reverse(plan.steps.begin(), plan.steps.end());

                // Independent replay; a mismatch here is an internal bug.
                BeliefTrace trace = run_trace(p.domain, p.sensors, plan);
                std::size_t gx =
                    possible_goals(trace.observer("X").beliefs.back(), p.goals)
                        .size();
                std::size_t gc =
                    possible_goals(trace.observer("C").beliefs.back(), p.goals)
                        .size();
                if (!satisfies(trace.states.back(), p.goals.true_goal()) ||
                    gx < phi.at_least_x || gc > phi.at_most_c)
                    throw EncodingSoundnessError(
                        "search solution failed independent re-verification");
                result.status = SearchStatus::Solved;
                result.plan = std::move(plan);
                result.trace = std::move(trace);
                result.delta_used = delta;
                result.goals_x = gx;
                result.goals_c = gc;
                result.time_s = elapsed();
                return result;
            }

            for (ActionId a = 0; a < p.domain.actions.size(); ++a) {
                const Action &act = p.domain.action(a);
                if (!act.pre.subset_of(arena[ni].state))
                    continue;
                State succ = apply(p.domain, arena[ni].state, act);
                ObservationSymbol ox = mx.emitted_symbol(a, succ);
                ObservationSymbol oc = mc.emitted_symbol(a, succ);
                SearchNode child;
                child.bx = belief_update(p.domain, mx, arena[ni].bx, ox);
                child.bc = belief_update(p.domain, mc, arena[ni].bc, oc);
                child.state = std::move(succ);
                child.parent = static_cast<std::int64_t>(ni);
                child.via = a;
                child.g = arena[ni].g + act.cost;
                child.h = node_heuristic(p, hadd, phi, delta, child.state,
                                         child.bx, child.bc, child.ax,
                                         child.ac);
                double f = child.g + child.h;
                arena.push_back(std::move(child));
                open.push({f, seq++, arena.size() - 1});
            }
        }
        if (!limit_hit) {
            result.status = SearchStatus::Exhausted;
            result.time_s = elapsed();
            return result;
        }
        result.status = SearchStatus::LimitReached;
    }
    result.time_s = elapsed();
    return result;
}

// Observer-blind greedy best-first on h_add to the true goal; the trace is
// replayed afterwards purely for reporting.
inline SearchResult baseline_gbfs(const ProblemFile &p,
                                  const SearchConfig &cfg = {}) {
    using namespace detail;
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };
    AdditiveHeuristic hadd(p.domain);
    const State &goal = p.goals.true_goal();

    struct GNode {
        State state;
        std::int64_t parent;
        ActionId via;
    };
    std::vector<GNode> arena;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>,
                        std::greater<QueueEntry>>
        open;
    std::unordered_set<State, StateHash> closed;
    std::uint64_t seq = 0;
    arena.push_back({p.domain.initial, -1, 0});
    open.push({hadd.clamped_cost(p.domain.initial, goal), seq++, 0});

    SearchResult result;
    while (!open.empty()) {
        if (elapsed() > cfg.time_limit_s || result.expansions >= cfg.node_limit) {
            result.status = SearchStatus::LimitReached;
            result.time_s = elapsed();
            return result;
        }
        QueueEntry entry = open.top();
        open.pop();
        std::size_t ni = entry.node;
        if (!closed.insert(arena[ni].state).second)
            continue;
        ++result.expansions;
        if (satisfies(arena[ni].state, goal)) {
            Plan plan;
            for (std::int64_t cur = static_cast<std::int64_t>(ni);
                 arena[cur].parent >= 0; cur = arena[cur].parent)
                plan.steps.push_back(arena[cur].via);
            std::reverse(plan.steps.begin(), plan.steps.end());
            result.trace = run_trace(p.domain, p.sensors, plan);
            result.goals_x =
                possible_goals(result.trace.observer("X").beliefs.back(),
                               p.goals)
                    .size();
            result.goals_c =
                possible_goals(result.trace.observer("C").beliefs.back(),
                               p.goals)
                    .size();
            result.status = SearchStatus::Solved;
            result.plan = std::move(plan);
            result.time_s = elapsed();
            return result;
        }
        for (ActionId a = 0; a < p.domain.actions.size(); ++a) {
            const Action &act = p.domain.action(a);
            if (!act.pre.subset_of(arena[ni].state))
                continue;
            State succ = apply(p.domain, arena[ni].state, act);
            if (closed.count(succ))
                continue;
            double h = hadd.clamped_cost(succ, goal);
            arena.push_back({std::move(succ), static_cast<std::int64_t>(ni), a});
            open.push({h, seq++, arena.size() - 1});
        }
    }
    result.status = SearchStatus::Exhausted;
    result.time_s = elapsed();
    return result;
}

} // namespace copp
