#pragma once

// Per-observer deterministic sensor models, observation emission, exact
// belief update and possible-goal counting.
//
// A sensor model is an ordered rule list (first match wins) closed by a
// mandatory catch-all, so the map is total and deterministic over all
// (action, successor state) pairs. An optional list of emission overrides
// models an erroneous sensor: the symbol physically emitted for a pair can
// then differ from the symbol class the observer's own map assigns to it,
// which lets a plan push the true trajectory out of that observer's belief.

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "copp/core.hpp"
#include "copp/errors.hpp"

namespace copp {

using ObservationSymbol = std::string;

struct SensorRule {
    std::vector<ActionId> actions;  // empty = any action
    State state_has;                // successor must contain these; empty = any
    ObservationSymbol emit;

    bool matches(ActionId a, const State &succ) const {
        if (!actions.empty() &&
            !std::binary_search(actions.begin(), actions.end(), a))
            return false;
        return state_has.subset_of(succ);
    }
};

struct SensorModel {
    std::string observer_id;          // "X" or "C"
    std::vector<SensorRule> rules;    // the observer's assumed map
    ObservationSymbol catchall;       // totality backstop, required
    std::vector<SensorRule> emission_overrides;  // actual emission, if noisy

    bool has_overrides() const { return !emission_overrides.empty(); }

    // The observer's own map: used for belief filtering.
    ObservationSymbol model_symbol(ActionId a, const State &succ) const {
        for (const SensorRule &r : rules)
            if (r.matches(a, succ))
                return r.emit;
        if (catchall.empty())
            throw IncompleteSensorError("sensor " + observer_id +
                                        ": no rule matches and no catch-all");
        return catchall;
    }

    // What the sensor physically emits for the pair.
    ObservationSymbol emitted_symbol(ActionId a, const State &succ) const {
        for (const SensorRule &r : emission_overrides)
            if (r.matches(a, succ))
                return r.emit;
        return model_symbol(a, succ);
    }

    std::vector<ObservationSymbol> alphabet() const {
        std::set<ObservationSymbol> syms;
        for (const SensorRule &r : rules)
            syms.insert(r.emit);
        for (const SensorRule &r : emission_overrides)
            syms.insert(r.emit);
        if (!catchall.empty())
            syms.insert(catchall);
        return {syms.begin(), syms.end()};
    }
};

inline ObservationSymbol observe(const SensorModel &m, ActionId a,
                                 const State &succ) {
    return m.emitted_symbol(a, succ);
}

struct Belief {
    std::vector<State> states;  // sorted lexicographically, duplicate-free
    std::string owner;
    int time = 0;

    void normalize() {
        std::sort(states.begin(), states.end());
        states.erase(std::unique(states.begin(), states.end()), states.end());
    }

    bool contains(const State &s) const {
        return std::binary_search(states.begin(), states.end(), s);
    }

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }
};

// Exact update: successors of belief states under any applicable action
// whose model symbol matches the received observation. An empty result is
// legal (erroneous sensor) and propagates as empty.
inline Belief belief_update(const PlanningDomain &d, const SensorModel &m,
                            const Belief &b_prev, const ObservationSymbol &o) {
    Belief next;
    next.owner = b_prev.owner;
    next.time = b_prev.time + 1;
    for (const State &s : b_prev.states) {
        for (ActionId a = 0; a < d.actions.size(); ++a) {
            const Action &act = d.action(a);
            if (!act.pre.subset_of(s))
                continue;
            State succ = apply(d, s, act);
            if (m.model_symbol(a, succ) == o)
                next.states.push_back(std::move(succ));
        }
    }
    next.normalize();
    return next;
}

struct ObserverTrace {
    std::string observer;
    std::vector<Belief> beliefs;                 // index 0..T
    std::vector<ObservationSymbol> observations; // index 1..T ("" = padding)
};

struct BeliefTrace {
    std::vector<State> states;  // actor trajectory, index 0..T
    std::vector<ObserverTrace> observers;

    std::size_t horizon() const { return states.empty() ? 0 : states.size() - 1; }

    const ObserverTrace &observer(const std::string &id) const {
        for (const ObserverTrace &ot : observers)
            if (ot.observer == id)
                return ot;
        throw Error("no trace for observer " + id);
    }
};

// Timeline replay with optional padding slots: a slot without an action
// copies the state forward, emits nothing and leaves every belief unchanged.
inline BeliefTrace run_trace_steps(const PlanningDomain &d,
                                   const std::vector<SensorModel> &sensors,
                                   const std::vector<std::optional<ActionId>> &steps) {
    BeliefTrace trace;
    trace.states.push_back(d.initial);
    for (const SensorModel &m : sensors) {
        ObserverTrace ot;
        ot.observer = m.observer_id;
        Belief b0;
        b0.owner = m.observer_id;
        b0.time = 0;
        b0.states = {d.initial};
        ot.beliefs.push_back(std::move(b0));
        trace.observers.push_back(std::move(ot));
    }
    std::size_t step_index = 0;
    for (const std::optional<ActionId> &slot : steps) {
        const State &cur = trace.states.back();
        if (!slot.has_value()) {
            trace.states.push_back(cur);
            for (ObserverTrace &ot : trace.observers) {
                Belief frozen = ot.beliefs.back();
                frozen.time += 1;
                ot.beliefs.push_back(std::move(frozen));
                ot.observations.push_back("");
            }
            ++step_index;
            continue;
        }
        const Action &act = d.action(*slot);
        if (!applicable(d, cur, act))
            throw InapplicableActionError("trace step " +
                                              std::to_string(step_index) + " (" +
                                              act.name + ") not applicable",
                                          step_index);
        State succ = apply(d, cur, act);
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            ObservationSymbol o = observe(sensors[i], *slot, succ);
            trace.observers[i].beliefs.push_back(
                belief_update(d, sensors[i], trace.observers[i].beliefs.back(), o));
            trace.observers[i].observations.push_back(o);
        }
        trace.states.push_back(std::move(succ));
        ++step_index;
    }
    return trace;
}

inline BeliefTrace run_trace(const PlanningDomain &d,
                             const std::vector<SensorModel> &sensors,
                             const Plan &plan) {
    std::vector<std::optional<ActionId>> steps;
    steps.reserve(plan.steps.size());
    for (ActionId a : plan.steps)
        steps.emplace_back(a);
    return run_trace_steps(d, sensors, steps);
}

// Indices of candidate goals satisfied by at least one belief state.
inline std::vector<std::size_t> possible_goals(const Belief &b,
                                               const CandidateGoalSet &goals) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < goals.goals.size(); ++i) {
        for (const State &s : b.states) {
            if (satisfies(s, goals.goals[i])) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

// Line-oriented trace export: `t observer symbol |belief| goal_indices`,
// goal indices printed 1-based, `-` when there are none.
inline std::string format_trace(const BeliefTrace &trace,
                                const CandidateGoalSet &goals) {
    std::ostringstream out;
    for (std::size_t t = 0; t < trace.states.size(); ++t) {
        for (const ObserverTrace &ot : trace.observers) {
            const Belief &b = ot.beliefs[t];
            std::string symbol = "-";
            if (t > 0 && !ot.observations[t - 1].empty())
                symbol = ot.observations[t - 1];
            out << t << ' ' << ot.observer << ' ' << symbol << ' ' << b.size()
                << ' ';
            std::vector<std::size_t> gs = possible_goals(b, goals);
            if (gs.empty()) {
                out << '-';
            } else {
                for (std::size_t i = 0; i < gs.size(); ++i) {
                    if (i > 0)
                        out << ',';
                    out << gs[i] + 1;
                }
            }
            out << '\n';
        }
    }
    return out.str();
}

// Static checks shared by the parser and the generators: a catch-all must be
// present and no earlier rule may shadow a later one with a different symbol
// under identical conditions.
inline void validate_sensor(const PlanningDomain &d, const SensorModel &m) {
    if (m.catchall.empty())
        throw IncompleteSensorError("sensor " + m.observer_id +
                                    ": missing catch-all rule");
    auto check_rules = [&](const std::vector<SensorRule> &rules) {
        for (const SensorRule &r : rules) {
            for (ActionId a : r.actions)
                if (a >= d.actions.size())
                    throw DomainMismatchError("sensor " + m.observer_id +
                                              ": rule references unknown action");
            d.check_in_universe(r.state_has, "sensor " + m.observer_id);
        }
        for (std::size_t i = 0; i < rules.size(); ++i) {
            for (std::size_t j = i + 1; j < rules.size(); ++j) {
                if (rules[i].actions == rules[j].actions &&
                    rules[i].state_has == rules[j].state_has &&
                    rules[i].emit != rules[j].emit)
                    throw IncompleteSensorError(
                        "sensor " + m.observer_id + ": rules " +
                        std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                        " have identical conditions but different symbols");
            }
        }
    };
    check_rules(m.rules);
    check_rules(m.emission_overrides);
}

} // namespace copp
