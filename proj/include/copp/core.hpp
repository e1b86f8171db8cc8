#pragma once

// STRIPS planning core: fluents, set-of-fluents states, ground actions with
// add/delete effects, sequential plans and the candidate goal set.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "copp/errors.hpp"

namespace copp {

using FluentId = std::uint32_t;

// A world state (or partial goal state): sorted, duplicate-free fluent set.
struct State {
    std::vector<FluentId> fluents;

    State() = default;
    explicit State(std::vector<FluentId> fs) : fluents(std::move(fs)) {
        normalize();
    }

    void normalize() {
        std::sort(fluents.begin(), fluents.end());
        fluents.erase(std::unique(fluents.begin(), fluents.end()), fluents.end());
    }

    bool contains(FluentId f) const {
        return std::binary_search(fluents.begin(), fluents.end(), f);
    }

    bool subset_of(const State &other) const {
        return std::includes(other.fluents.begin(), other.fluents.end(),
                             fluents.begin(), fluents.end());
    }

    std::size_t size() const { return fluents.size(); }
    bool empty() const { return fluents.empty(); }

    bool operator==(const State &o) const { return fluents == o.fluents; }
    bool operator!=(const State &o) const { return fluents != o.fluents; }
    bool operator<(const State &o) const { return fluents < o.fluents; }
};

struct StateHash {
    std::size_t operator()(const State &s) const {
        std::size_t h = 1469598103934665603ull;
        for (FluentId f : s.fluents) {
            h ^= f + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

struct Action {
    std::string name;
    State pre;
    State add;
    State del;
    double cost = 1.0;
};

using ActionId = std::size_t;

struct Plan {
    std::vector<ActionId> steps;

    std::size_t length() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
};

// Candidate goals the observers consider possible; exactly one is true.
struct CandidateGoalSet {
    std::vector<State> goals;  // partial states
    std::size_t true_goal_index = 0;

    const State &true_goal() const { return goals.at(true_goal_index); }
    std::size_t size() const { return goals.size(); }
};

class PlanningDomain {
public:
    std::vector<std::string> fluent_names;
    std::vector<Action> actions;
    State initial;

    FluentId add_fluent(const std::string &name) {
        auto it = fluent_index_.find(name);
        if (it != fluent_index_.end())
            return it->second;
        FluentId id = static_cast<FluentId>(fluent_names.size());
        fluent_names.push_back(name);
        fluent_index_.emplace(name, id);
        return id;
    }

    bool has_fluent(const std::string &name) const {
        return fluent_index_.count(name) > 0;
    }

    FluentId fluent_id(const std::string &name) const {
        auto it = fluent_index_.find(name);
        if (it == fluent_index_.end())
            throw DomainMismatchError("unknown fluent: " + name);
        return it->second;
    }

    const std::string &fluent_name(FluentId id) const {
        if (id >= fluent_names.size())
            throw DomainMismatchError("fluent id out of range");
        return fluent_names[id];
    }

    ActionId add_action(Action a) {
        if (action_index_.count(a.name))
            throw DomainMismatchError("duplicate action name: " + a.name);
        check_in_universe(a.pre, a.name);
        check_in_universe(a.add, a.name);
        check_in_universe(a.del, a.name);
        for (FluentId f : a.add.fluents)
            if (a.del.contains(f))
                throw DomainMismatchError("action " + a.name +
                                          ": add and del overlap");
        if (a.cost < 0)
            throw DomainMismatchError("action " + a.name + ": negative cost");
        ActionId id = actions.size();
        action_index_.emplace(a.name, id);
        actions.push_back(std::move(a));
        return id;
    }

    bool has_action(const std::string &name) const {
        return action_index_.count(name) > 0;
    }

    ActionId action_id(const std::string &name) const {
        auto it = action_index_.find(name);
        if (it == action_index_.end())
            throw DomainMismatchError("unknown action: " + name);
        return it->second;
    }

    const Action &action(ActionId id) const {
        if (id >= actions.size())
            throw DomainMismatchError("action id out of range");
        return actions[id];
    }

    std::size_t num_fluents() const { return fluent_names.size(); }

    void set_initial(State s) {
        check_in_universe(s, "<init>");
        initial = std::move(s);
    }

    void check_in_universe(const State &s, const std::string &context) const {
        for (FluentId f : s.fluents)
            if (f >= fluent_names.size())
                throw DomainMismatchError(context + ": fluent id " +
                                          std::to_string(f) +
                                          " outside the domain universe");
    }

private:
    std::unordered_map<std::string, FluentId> fluent_index_;
    std::unordered_map<std::string, ActionId> action_index_;
};

inline bool applicable(const PlanningDomain &d, const State &s, const Action &a) {
    d.check_in_universe(s, "<state>");
    d.check_in_universe(a.pre, a.name);
    return a.pre.subset_of(s);
}

inline State apply(const PlanningDomain &d, const State &s, const Action &a) {
    if (!applicable(d, s, a))
        throw InapplicableActionError("action " + a.name + " not applicable", 0);
    std::vector<FluentId> out;
    out.reserve(s.fluents.size() + a.add.fluents.size());
    std::set_difference(s.fluents.begin(), s.fluents.end(),
                        a.del.fluents.begin(), a.del.fluents.end(),
                        std::back_inserter(out));
    State result(std::move(out));
    std::vector<FluentId> merged;
    merged.reserve(result.fluents.size() + a.add.fluents.size());
    std::set_union(result.fluents.begin(), result.fluents.end(),
                   a.add.fluents.begin(), a.add.fluents.end(),
                   std::back_inserter(merged));
    result.fluents = std::move(merged);
    return result;
}

// goal |= partial-state subset semantics
inline bool satisfies(const State &s, const State &goal) {
    return goal.subset_of(s);
}

// [initial, s_1, ..., s_T]; throws with the failing step index.
inline std::vector<State> simulate(const PlanningDomain &d, const Plan &plan) {
    std::vector<State> trajectory;
    trajectory.reserve(plan.steps.size() + 1);
    trajectory.push_back(d.initial);
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const Action &a = d.action(plan.steps[i]);
        if (!applicable(d, trajectory.back(), a))
            throw InapplicableActionError(
                "plan step " + std::to_string(i) + " (" + a.name +
                    ") not applicable",
                i);
        trajectory.push_back(apply(d, trajectory.back(), a));
    }
    return trajectory;
}

inline double plan_cost(const PlanningDomain &d, const Plan &plan) {
    double total = 0.0;
    for (ActionId id : plan.steps)
        total += d.action(id).cost;
    return total;
}

} // namespace copp
