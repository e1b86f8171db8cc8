#pragma once

// Additive delete-relaxation heuristic with a per-source-state cache: one
// fixpoint pass per distinct source state amortizes all goal queries made
// from it (the search asks for many goals per belief state).

#include <limits>
#include <unordered_map>
#include <vector>

#include "copp/core.hpp"

namespace copp {

constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// Clamp for infinite heuristic components so node scores stay comparable.
constexpr double kCostSentinel = 1e6;

class AdditiveHeuristic {
public:
    explicit AdditiveHeuristic(const PlanningDomain &d) : domain_(&d) {}

    // h_add(s -> goal); kInfiniteCost when some goal fluent is unreachable.
    double cost(const State &s, const State &goal) const {
        const std::vector<double> &fc = fluent_costs(s);
        double total = 0.0;
        for (FluentId f : goal.fluents) {
            if (fc[f] == kInfiniteCost)
                return kInfiniteCost;
            total += fc[f];
        }
        return total;
    }

    double clamped_cost(const State &s, const State &goal) const {
        double v = cost(s, goal);
        return v < kCostSentinel ? v : kCostSentinel;
    }

    std::size_t cache_size() const { return cache_.size(); }

private:
    const std::vector<double> &fluent_costs(const State &s) const {
        auto it = cache_.find(s);
        if (it != cache_.end())
            return it->second;
        std::vector<double> cost(domain_->num_fluents(), kInfiniteCost);
        for (FluentId f : s.fluents)
            cost[f] = 0.0;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Action &a : domain_->actions) {
                double c = a.cost;
                bool reachable = true;
                for (FluentId f : a.pre.fluents) {
                    if (cost[f] == kInfiniteCost) {
                        reachable = false;
                        break;
                    }
                    c += cost[f];
                }
                if (!reachable)
                    continue;
                for (FluentId f : a.add.fluents)
                    if (c < cost[f]) {
                        cost[f] = c;
                        changed = true;
                    }
            }
        }
        return cache_.emplace(s, std::move(cost)).first->second;
    }

    const PlanningDomain *domain_;
    mutable std::unordered_map<State, std::vector<double>, StateHash> cache_;
};

} // namespace copp
