#pragma once

// Compiles a problem plus horizon into the 0/1 model and decodes solver
// assignments back into plans.
//
// Timeline semantics: at most one action per step; a step without an action
// is padding — the state and all beliefs are copied forward and nothing is
// emitted. An auxiliary per-step activity variable act_t = sum of the step's
// action variables keeps the frame and guard rows small.
//
// Belief mechanics per observer: w picks up the symbol the sensor actually
// emits for the executed transition (via x*y product variables), while each
// belief-step variable h couples the previous belief, the received symbol
// under the observer's own rule map, and the successor belief state. With
// the uniqueness and frame rows this pins every b variable to the exact
// belief-update semantics, which decode() re-derives independently and
// cross-checks.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "copp/core.hpp"
#include "copp/ip_model.hpp"
#include "copp/problem.hpp"
#include "copp/sensor.hpp"

namespace copp {

struct ReachableSet {
    std::vector<State> states;  // BFS layer order, lexicographic within layer
    std::vector<int> depth;
    std::unordered_map<State, int, StateHash> index;
};

inline ReachableSet reachable_states(const ProblemFile &p, int horizon,
                                     std::size_t cap = 20000) {
    if (horizon < 0)
        throw BoundsError("horizon must be non-negative");
    ReachableSet r;
    r.states.push_back(p.domain.initial);
    r.depth.push_back(0);
    r.index.emplace(p.domain.initial, 0);
    std::size_t layer_begin = 0;
    for (int d = 1; d <= horizon; ++d) {
        std::size_t layer_end = r.states.size();
        std::vector<State> next;
        for (std::size_t i = layer_begin; i < layer_end; ++i) {
            for (const Action &a : p.domain.actions) {
                if (!a.pre.subset_of(r.states[i]))
                    continue;
                State succ = apply(p.domain, r.states[i], a);
                if (!r.index.count(succ))
                    next.push_back(std::move(succ));
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (State &s : next) {
            if (r.index.count(s))
                continue;
            if (r.states.size() >= cap)
                throw CapacityError(
                    "reachable state cap (" + std::to_string(cap) +
                    ") exceeded while grounding; use the belief search "
                    "solver for this instance");
            r.index.emplace(s, static_cast<int>(r.states.size()));
            r.states.push_back(std::move(s));
            r.depth.push_back(d);
        }
        layer_begin = layer_end;
        if (layer_begin == r.states.size())
            break;  // fixpoint
    }
    return r;
}

struct EncodeOptions {
    std::optional<int> k_obfuscation;  // at least k goals possible for X
    std::optional<int> j_legibility;   // at most j goals possible for C
    bool exploit_error = false;        // true goal never possible for X
    bool prefix_padding = false;       // padding steps only after the last action
    bool sound_observer_cuts = true;   // entailed rows, never change the optimum
    std::optional<double> beta;        // overrides the problem file's value
    std::size_t state_cap = 20000;
};

namespace detail {

struct EncTransition {
    int s;        // predecessor state index
    ActionId a;
    int succ;     // successor state index
};

class Encoder {
public:
    Encoder(std::shared_ptr<const ProblemFile> problem, int horizon,
            const EncodeOptions &opts)
        : p_(std::move(problem)), T_(horizon), opts_(opts) {}

    IPModel build() {
        if (T_ < 1)
            throw BoundsError("horizon must be at least 1");
        const std::size_t n_goals = p_->goals.size();
        if (opts_.k_obfuscation &&
            (*opts_.k_obfuscation < 1 ||
             *opts_.k_obfuscation > static_cast<int>(n_goals)))
            throw BoundsError("obfuscation bound outside [1, |goals|]");
        if (opts_.j_legibility &&
            (*opts_.j_legibility < 1 ||
             *opts_.j_legibility > static_cast<int>(n_goals)))
            throw BoundsError("legibility bound outside [1, |goals|]");

        m_.problem = p_;
        m_.horizon = T_;
        m_.beta = opts_.beta ? *opts_.beta : (p_->beta ? *p_->beta : 0.5);
        if (m_.beta < 0.0 || m_.beta > 1.0)
            throw BoundsError("beta must lie in [0, 1]");

        ReachableSet r = reachable_states(*p_, T_, opts_.state_cap);
        m_.state_index = r.states;
        m_.state_depth = r.depth;
        collect_transitions(r);
        collect_symbols();
        create_variables();
        add_rows();
        return std::move(m_);
    }

private:
    using Cmp = LinearConstraint::Cmp;

    void row(std::vector<std::pair<int, int>> terms, Cmp cmp, int rhs,
             const char *tag) {
        LinearConstraint c;
        c.terms = std::move(terms);
        c.cmp = cmp;
        c.rhs = rhs;
        c.tag = tag;
        m_.constraints.push_back(std::move(c));
    }

    void collect_transitions(const ReachableSet &r) {
        n_states_ = static_cast<int>(r.states.size());
        trans_from_.assign(n_states_, {});
        trans_into_.assign(n_states_, {});
        trans_of_action_.assign(p_->domain.actions.size(), {});
        for (int s = 0; s < n_states_; ++s) {
            if (r.depth[s] >= T_)
                continue;  // could only fire past the horizon
            for (ActionId a = 0; a < p_->domain.actions.size(); ++a) {
                const Action &act = p_->domain.action(a);
                if (!act.pre.subset_of(r.states[s]))
                    continue;
                State succ = apply(p_->domain, r.states[s], act);
                auto it = r.index.find(succ);
                if (it == r.index.end())
                    continue;  // beyond the cap-trimmed frontier
                int tr = static_cast<int>(trans_.size());
                trans_.push_back({s, a, it->second});
                trans_from_[s].push_back(tr);
                trans_into_[it->second].push_back(tr);
                trans_of_action_[a].push_back(tr);
            }
        }
        // Action/pair availability by earliest predecessor depth.
        min_depth_action_.assign(p_->domain.actions.size(), T_ + 1);
        for (std::size_t i = 0; i < trans_.size(); ++i) {
            const EncTransition &tr = trans_[i];
            min_depth_action_[tr.a] =
                std::min(min_depth_action_[tr.a], m_.state_depth[tr.s]);
        }
        // Occurrence pairs (a, succ) shared by all observers.
        std::map<std::pair<ActionId, int>, int> pair_index;
        pair_of_trans_.resize(trans_.size());
        for (std::size_t i = 0; i < trans_.size(); ++i) {
            auto key = std::make_pair(trans_[i].a, trans_[i].succ);
            auto it = pair_index.find(key);
            if (it == pair_index.end()) {
                int id = static_cast<int>(pairs_.size());
                pairs_.push_back(key);
                pair_min_depth_.push_back(m_.state_depth[trans_[i].s]);
                pair_index.emplace(key, id);
                pair_of_trans_[i] = id;
            } else {
                pair_min_depth_[it->second] = std::min(
                    pair_min_depth_[it->second], m_.state_depth[trans_[i].s]);
                pair_of_trans_[i] = it->second;
            }
        }
    }

    void collect_symbols() {
        const auto &sensors = p_->sensors;
        sym_names_.resize(sensors.size());
        model_sym_.assign(sensors.size(),
                          std::vector<int>(trans_.size(), -1));
        emit_sym_.assign(sensors.size(), std::vector<int>(trans_.size(), -1));
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            std::map<ObservationSymbol, int> ids;
            auto sym_id = [&](const ObservationSymbol &o) {
                auto it = ids.find(o);
                if (it != ids.end())
                    return it->second;
                int id = static_cast<int>(ids.size());
                ids.emplace(o, id);
                return id;
            };
            // Two passes keep symbol ids sorted by name.
            std::vector<ObservationSymbol> seen;
            for (const auto &tr : trans_) {
                const State &succ = m_.state_index[tr.succ];
                seen.push_back(sensors[i].model_symbol(tr.a, succ));
                seen.push_back(sensors[i].emitted_symbol(tr.a, succ));
            }
            std::sort(seen.begin(), seen.end());
            seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
            for (const ObservationSymbol &o : seen)
                sym_id(o);
            sym_names_[i] = seen;
            for (std::size_t ti = 0; ti < trans_.size(); ++ti) {
                const State &succ = m_.state_index[trans_[ti].succ];
                model_sym_[i][ti] = sym_id(
                    sensors[i].model_symbol(trans_[ti].a, succ));
                emit_sym_[i][ti] = sym_id(
                    sensors[i].emitted_symbol(trans_[ti].a, succ));
            }
        }
    }

    int new_var(VarKind kind, int t, int action, int state, int observer,
                int goal, std::string name) {
        VarInfo v;
        v.kind = kind;
        v.t = t;
        v.action = action;
        v.state = state;
        v.observer = observer;
        v.goal = goal;
        v.name = std::move(name);
        m_.variables.push_back(std::move(v));
        return static_cast<int>(m_.variables.size() - 1);
    }

    void create_variables() {
        const auto &d = p_->domain;
        const std::size_t n_obs = p_->sensors.size();
        m_.x_ids.assign(T_ + 1, std::vector<int>(d.actions.size(), -1));
        m_.y_ids.assign(T_ + 1, std::vector<int>(n_states_, -1));
        w_ids_.assign(n_obs, {});
        for (std::size_t i = 0; i < n_obs; ++i)
            w_ids_[i].assign(T_ + 1,
                             std::vector<int>(sym_names_[i].size(), -1));
        m_.b_ids.assign(n_obs, {});
        for (std::size_t i = 0; i < n_obs; ++i)
            m_.b_ids[i].assign(T_ + 1, std::vector<int>(n_states_, -1));
        h_ids_.assign(n_obs, {});
        for (std::size_t i = 0; i < n_obs; ++i)
            h_ids_[i].assign(T_ + 1, std::vector<int>(trans_.size(), -1));
        m_.g_ids.assign(n_obs, std::vector<int>(p_->goals.size(), -1));
        zp_ids_.assign(T_ + 1, std::vector<int>(pairs_.size(), -1));
        zt_ids_.assign(T_ + 1, std::vector<int>(trans_.size(), -1));
        m_.act_ids.assign(T_ + 1, -1);

        for (int t = 0; t <= T_; ++t) {
            if (t >= 1)
                for (ActionId a = 0; a < d.actions.size(); ++a)
                    if (min_depth_action_[a] <= t - 1)
                        m_.x_ids[t][a] = new_var(
                            VarKind::Action, t, static_cast<int>(a), -1, -1, -1,
                            "x" + std::to_string(t) + "_" +
                                detail::lp_safe(d.actions[a].name));
            for (int s = 0; s < n_states_; ++s)
                if (m_.state_depth[s] <= t)
                    m_.y_ids[t][s] =
                        new_var(VarKind::StateAt, t, -1, s, -1, -1,
                                "y" + std::to_string(t) + "_s" +
                                    std::to_string(s));
            if (t >= 1)
                for (std::size_t i = 0; i < n_obs; ++i)
                    for (std::size_t o = 0; o < sym_names_[i].size(); ++o) {
                        w_ids_[i][t][o] = new_var(
                            VarKind::Observation, t, -1, -1,
                            static_cast<int>(i), -1,
                            "w" + std::to_string(t) + "_" +
                                detail::lp_safe(p_->sensors[i].observer_id) +
                                "_" + detail::lp_safe(sym_names_[i][o]));
                        m_.variables.back().symbol = sym_names_[i][o];
                    }
            for (std::size_t i = 0; i < n_obs; ++i)
                for (int s = 0; s < n_states_; ++s)
                    if (m_.state_depth[s] <= t)
                        m_.b_ids[i][t][s] = new_var(
                            VarKind::BeliefState, t, -1, s,
                            static_cast<int>(i), -1,
                            "b" + std::to_string(t) + "_" +
                                detail::lp_safe(p_->sensors[i].observer_id) +
                                "_s" + std::to_string(s));
            if (t >= 1)
                for (std::size_t i = 0; i < n_obs; ++i)
                    for (std::size_t ti = 0; ti < trans_.size(); ++ti)
                        if (m_.state_depth[trans_[ti].s] <= t - 1)
                            h_ids_[i][t][ti] = new_var(
                                VarKind::BeliefStep, t,
                                static_cast<int>(trans_[ti].a), trans_[ti].s,
                                static_cast<int>(i), -1,
                                "h" + std::to_string(t) + "_" +
                                    detail::lp_safe(
                                        p_->sensors[i].observer_id) +
                                    "_tr" + std::to_string(ti));
            if (t == T_)
                for (std::size_t i = 0; i < n_obs; ++i)
                    for (std::size_t gi = 0; gi < p_->goals.size(); ++gi)
                        m_.g_ids[i][gi] = new_var(
                            VarKind::GoalIndicator, t, -1, -1,
                            static_cast<int>(i), static_cast<int>(gi),
                            "g_" + detail::lp_safe(
                                       p_->sensors[i].observer_id) +
                                "_" + std::to_string(gi + 1));
            if (t >= 1) {
                for (std::size_t pi = 0; pi < pairs_.size(); ++pi)
                    if (pair_min_depth_[pi] <= t - 1)
                        zp_ids_[t][pi] = new_var(
                            VarKind::Aux, t, static_cast<int>(pairs_[pi].first),
                            pairs_[pi].second, -1, -1,
                            "zp" + std::to_string(t) + "_" +
                                std::to_string(pi));
                for (std::size_t ti = 0; ti < trans_.size(); ++ti)
                    if (m_.state_depth[trans_[ti].s] <= t - 1)
                        zt_ids_[t][ti] = new_var(
                            VarKind::Aux, t, static_cast<int>(trans_[ti].a),
                            trans_[ti].s, -1, -1,
                            "zt" + std::to_string(t) + "_" +
                                std::to_string(ti));
                m_.act_ids[t] = new_var(VarKind::Aux, t, -1, -1, -1, -1,
                                        "act" + std::to_string(t));
            }
        }
    }

    void add_rows() {
        const auto &d = p_->domain;
        const std::size_t n_obs = p_->sensors.size();

        // Initial state and beliefs: depth gating leaves exactly the initial
        // state at t = 0.
        row({{m_.y_ids[0][0], 1}}, Cmp::EQ, 1, "initial-state");
        for (std::size_t i = 0; i < n_obs; ++i)
            row({{m_.b_ids[i][0][0], 1}}, Cmp::EQ, 1, "initial-belief");

        for (int t = 1; t <= T_; ++t) {
            // Step activity and the at-most-one-action rule.
            std::vector<std::pair<int, int>> act_link{{m_.act_ids[t], 1}};
            std::vector<std::pair<int, int>> at_most;
            for (ActionId a = 0; a < d.actions.size(); ++a)
                if (m_.x_ids[t][a] >= 0) {
                    act_link.emplace_back(m_.x_ids[t][a], -1);
                    at_most.emplace_back(m_.x_ids[t][a], 1);
                }
            row(std::move(act_link), Cmp::EQ, 0, "step-activity");
            if (!at_most.empty())
                row(std::move(at_most), Cmp::LE, 1, "at-most-one-action");
            if (opts_.prefix_padding && t >= 2)
                row({{m_.act_ids[t], 1}, {m_.act_ids[t - 1], -1}}, Cmp::LE, 0,
                    "prefix-padding");

            // State uniqueness.
            std::vector<std::pair<int, int>> uniq;
            for (int s = 0; s < n_states_; ++s)
                if (m_.y_ids[t][s] >= 0)
                    uniq.emplace_back(m_.y_ids[t][s], 1);
            row(std::move(uniq), Cmp::EQ, 1, "state-uniqueness");

            // Action applicability.
            for (ActionId a = 0; a < d.actions.size(); ++a) {
                if (m_.x_ids[t][a] < 0)
                    continue;
                std::vector<std::pair<int, int>> terms{{m_.x_ids[t][a], 1}};
                for (int ti : trans_of_action_[a])
                    if (m_.state_depth[trans_[ti].s] <= t - 1)
                        terms.emplace_back(m_.y_ids[t - 1][trans_[ti].s], -1);
                row(std::move(terms), Cmp::LE, 0, "action-applicability");
            }

            // State support: an occupied state on an action-bearing step
            // needs both an adding action and a predecessor.
            for (int s2 = 0; s2 < n_states_; ++s2) {
                if (m_.y_ids[t][s2] < 0)
                    continue;
                std::vector<std::pair<int, int>> terms;
                std::vector<int> adders, preds;
                for (int ti : trans_into_[s2])
                    if (m_.state_depth[trans_[ti].s] <= t - 1) {
                        adders.push_back(m_.x_ids[t][trans_[ti].a]);
                        preds.push_back(m_.y_ids[t - 1][trans_[ti].s]);
                    }
                std::sort(adders.begin(), adders.end());
                adders.erase(std::unique(adders.begin(), adders.end()),
                             adders.end());
                std::sort(preds.begin(), preds.end());
                preds.erase(std::unique(preds.begin(), preds.end()),
                            preds.end());
                for (int v : adders)
                    terms.emplace_back(v, 1);
                for (int v : preds)
                    terms.emplace_back(v, 1);
                terms.emplace_back(m_.y_ids[t][s2], -2);
                terms.emplace_back(m_.act_ids[t], -2);
                // Sums of adders/predecessors are each capped at 1 by the
                // at-most-one-action and uniqueness rows, so an occupied
                // state on an active step needs one of each.
                row(std::move(terms), Cmp::GE, -2, "state-support");
            }

            // Transition products and the action-transition link.
            for (std::size_t ti = 0; ti < trans_.size(); ++ti) {
                int zt = zt_ids_[t][ti];
                if (zt < 0)
                    continue;
                int yp = m_.y_ids[t - 1][trans_[ti].s];
                int ys = m_.y_ids[t][trans_[ti].succ];
                row({{zt, 1}, {yp, -1}}, Cmp::LE, 0, "transition-product");
                row({{zt, 1}, {ys, -1}}, Cmp::LE, 0, "transition-product");
                row({{zt, 1}, {yp, -1}, {ys, -1}}, Cmp::GE, -1,
                    "transition-product");
            }
            for (ActionId a = 0; a < d.actions.size(); ++a) {
                if (m_.x_ids[t][a] < 0)
                    continue;
                std::vector<std::pair<int, int>> terms;
                for (int ti : trans_of_action_[a])
                    if (zt_ids_[t][ti] >= 0)
                        terms.emplace_back(zt_ids_[t][ti], 1);
                terms.emplace_back(m_.x_ids[t][a], -1);
                row(std::move(terms), Cmp::GE, 0, "action-transition-link");
            }

            // State frame across padding steps.
            for (int s = 0; s < n_states_; ++s)
                if (m_.y_ids[t][s] >= 0 && m_.y_ids[t - 1][s] >= 0)
                    row({{m_.y_ids[t][s], 1},
                         {m_.y_ids[t - 1][s], -1},
                         {m_.act_ids[t], 1}},
                        Cmp::GE, 0, "state-frame");

            // Occurrence products x*y feeding the observation rows.
            for (std::size_t pi = 0; pi < pairs_.size(); ++pi) {
                int zp = zp_ids_[t][pi];
                if (zp < 0)
                    continue;
                int x = m_.x_ids[t][pairs_[pi].first];
                int ys = m_.y_ids[t][pairs_[pi].second];
                row({{zp, 1}, {x, -1}}, Cmp::LE, 0, "occurrence-product");
                row({{zp, 1}, {ys, -1}}, Cmp::LE, 0, "occurrence-product");
                row({{zp, 1}, {x, -1}, {ys, -1}}, Cmp::GE, -1,
                    "occurrence-product");
            }

            // Observation emission: w = sum of occurrence products whose
            // emitted symbol is o.
            for (std::size_t i = 0; i < n_obs; ++i)
                for (std::size_t o = 0; o < sym_names_[i].size(); ++o) {
                    std::vector<std::pair<int, int>> terms{
                        {w_ids_[i][t][o], 1}};
                    // Several transitions can share a pair; add each pair once.
                    std::vector<int> zps;
                    for (std::size_t ti = 0; ti < trans_.size(); ++ti)
                        if (emit_sym_[i][ti] == static_cast<int>(o) &&
                            zp_ids_[t][pair_of_trans_[ti]] >= 0)
                            zps.push_back(zp_ids_[t][pair_of_trans_[ti]]);
                    std::sort(zps.begin(), zps.end());
                    zps.erase(std::unique(zps.begin(), zps.end()), zps.end());
                    for (int zp : zps)
                        terms.emplace_back(zp, -1);
                    row(std::move(terms), Cmp::EQ, 0, "observation-emission");
                }

            // Belief transitions.
            for (std::size_t i = 0; i < n_obs; ++i) {
                for (std::size_t ti = 0; ti < trans_.size(); ++ti) {
                    int h = h_ids_[i][t][ti];
                    if (h < 0)
                        continue;
                    int bp = m_.b_ids[i][t - 1][trans_[ti].s];
                    int bs = m_.b_ids[i][t][trans_[ti].succ];
                    int w = w_ids_[i][t][model_sym_[i][ti]];
                    row({{h, 1}, {bp, -1}, {w, -1}}, Cmp::GE, -1,
                        "belief-step-lower");
                    row({{h, 1}, {bp, -1}}, Cmp::LE, 0, "belief-step-pre");
                    row({{h, 1}, {w, -1}}, Cmp::LE, 0, "belief-step-obs");
                    row({{h, 1}, {bs, -1}}, Cmp::LE, 0, "belief-step-succ");
                }
                // Belief support and frame.
                for (int s = 0; s < n_states_; ++s) {
                    int b = m_.b_ids[i][t][s];
                    if (b < 0)
                        continue;
                    std::vector<std::pair<int, int>> terms{
                        {b, 1}, {m_.act_ids[t], 1}};
                    for (int ti : trans_into_[s])
                        if (h_ids_[i][t][ti] >= 0)
                            terms.emplace_back(h_ids_[i][t][ti], -1);
                    row(std::move(terms), Cmp::LE, 1, "belief-support");
                    int bp = m_.b_ids[i][t - 1][s];
                    if (bp >= 0) {
                        row({{b, 1}, {bp, -1}, {m_.act_ids[t], 1}}, Cmp::GE,
                            0, "belief-frame-keep");
                        row({{b, 1}, {bp, -1}, {m_.act_ids[t], -1}}, Cmp::LE,
                            0, "belief-frame-limit");
                    } else {
                        row({{b, 1}, {m_.act_ids[t], -1}}, Cmp::LE, 0,
                            "belief-frame-limit");
                    }
                }
            }
        }

        // The true goal must hold at the horizon.
        {
            std::vector<std::pair<int, int>> terms;
            for (int s = 0; s < n_states_; ++s)
                if (m_.y_ids[T_][s] >= 0 &&
                    satisfies(m_.state_index[s], p_->goals.true_goal()))
                    terms.emplace_back(m_.y_ids[T_][s], 1);
            if (terms.empty())
                row({{m_.y_ids[0][0], 1}}, Cmp::LE, 0,
                    "goal-reached-unreachable");
            else
                row(std::move(terms), Cmp::GE, 1, "goal-reached");
        }

        // Goal indicators over the final beliefs.
        for (std::size_t i = 0; i < n_obs; ++i)
            for (std::size_t gi = 0; gi < p_->goals.size(); ++gi) {
                int g = m_.g_ids[i][gi];
                std::vector<std::pair<int, int>> upper{{g, 1}};
                for (int s = 0; s < n_states_; ++s) {
                    if (m_.b_ids[i][T_][s] < 0 ||
                        !satisfies(m_.state_index[s], p_->goals.goals[gi]))
                        continue;
                    row({{g, 1}, {m_.b_ids[i][T_][s], -1}}, Cmp::GE, 0,
                        "goal-indicator-lower");
                    upper.emplace_back(m_.b_ids[i][T_][s], -1);
                }
                row(std::move(upper), Cmp::LE, 0, "goal-indicator-upper");
            }

        // Optional bound rows and the erroneous-sensor exploitation row.
        int x_obs = observer_index("X");
        int c_obs = observer_index("C");
        if (opts_.k_obfuscation) {
            std::vector<std::pair<int, int>> terms;
            for (std::size_t gi = 0; gi < p_->goals.size(); ++gi)
                terms.emplace_back(m_.g_ids[x_obs][gi], 1);
            row(std::move(terms), Cmp::GE, *opts_.k_obfuscation,
                "obfuscation-bound");
        }
        if (opts_.j_legibility) {
            std::vector<std::pair<int, int>> terms;
            for (std::size_t gi = 0; gi < p_->goals.size(); ++gi)
                terms.emplace_back(m_.g_ids[c_obs][gi], 1);
            row(std::move(terms), Cmp::LE, *opts_.j_legibility,
                "legibility-bound");
        }
        if (opts_.exploit_error)
            row({{m_.g_ids[x_obs][p_->goals.true_goal_index], 1}}, Cmp::EQ, 0,
                "true-goal-exclusion");

        // Entailed rows: an observer whose emitted symbols always match its
        // own rule map keeps the true trajectory in its belief, so the true
        // goal is always possible for it at the horizon.
        if (opts_.sound_observer_cuts)
            for (std::size_t i = 0; i < n_obs; ++i) {
                bool sound = true;
                for (std::size_t ti = 0; ti < trans_.size() && sound; ++ti)
                    sound = model_sym_[i][ti] == emit_sym_[i][ti];
                if (sound)
                    row({{m_.g_ids[i][p_->goals.true_goal_index], 1}},
                        Cmp::EQ, 1, "sound-observer-true-goal");
            }

        // Objective: beta * goals possible for C - (1 - beta) * goals for X.
        for (std::size_t gi = 0; gi < p_->goals.size(); ++gi)
            m_.objective.emplace_back(m_.g_ids[c_obs][gi], m_.beta);
        for (std::size_t gi = 0; gi < p_->goals.size(); ++gi)
            m_.objective.emplace_back(m_.g_ids[x_obs][gi], -(1.0 - m_.beta));
    }

    int observer_index(const std::string &id) const {
        for (std::size_t i = 0; i < p_->sensors.size(); ++i)
            if (p_->sensors[i].observer_id == id)
                return static_cast<int>(i);
        throw Error("problem lacks observer " + id);
    }

    std::shared_ptr<const ProblemFile> p_;
    int T_;
    EncodeOptions opts_;
    IPModel m_;

    int n_states_ = 0;
    std::vector<EncTransition> trans_;
    std::vector<std::vector<int>> trans_from_, trans_into_, trans_of_action_;
    std::vector<int> min_depth_action_;
    std::vector<std::pair<ActionId, int>> pairs_;  // (action, successor)
    std::vector<int> pair_min_depth_;
    std::vector<int> pair_of_trans_;
    std::vector<std::vector<ObservationSymbol>> sym_names_;
    std::vector<std::vector<int>> model_sym_, emit_sym_;
    std::vector<std::vector<std::vector<int>>> w_ids_, h_ids_;
    std::vector<std::vector<int>> zp_ids_, zt_ids_;
};

} // namespace detail

inline IPModel encode(std::shared_ptr<const ProblemFile> p, int horizon,
                      const EncodeOptions &opts = {}) {
    return detail::Encoder(std::move(p), horizon, opts).build();
}

inline IPModel encode(const ProblemFile &p, int horizon,
                      const EncodeOptions &opts = {}) {
    return encode(std::make_shared<const ProblemFile>(p), horizon, opts);
}

struct DecodeResult {
    Plan plan;
    std::vector<std::optional<ActionId>> steps;  // padded timeline
    BeliefTrace trace;
    double objective = 0.0;
    std::size_t goals_x = 0;
    std::size_t goals_c = 0;
};

// Rebuild the plan from the x variables, replay it independently, and insist
// the replayed beliefs/observations/goal sets match every y/b/w/g variable.
inline DecodeResult decode(const IPModel &m,
                           const std::vector<std::int8_t> &assignment) {
    if (assignment.size() != m.num_vars())
        throw BoundsError("assignment size does not match the model");
    const ProblemFile &p = *m.problem;
    DecodeResult out;
    out.steps.assign(m.horizon, std::nullopt);
    for (int t = 1; t <= m.horizon; ++t) {
        for (ActionId a = 0; a < p.domain.actions.size(); ++a) {
            int id = m.x_ids[t][a];
            if (id >= 0 && assignment[id] == 1) {
                if (out.steps[t - 1].has_value())
                    throw EncodingSoundnessError(
                        "two actions set at step " + std::to_string(t));
                out.steps[t - 1] = a;
            }
        }
    }
    out.trace = run_trace_steps(p.domain, p.sensors, out.steps);
    for (const std::optional<ActionId> &s : out.steps)
        if (s)
            out.plan.steps.push_back(*s);

    // Cross-check the trajectory variables.
    for (int t = 0; t <= m.horizon; ++t) {
        const State &st = out.trace.states[t];
        auto it = std::find(m.state_index.begin(), m.state_index.end(), st);
        if (it == m.state_index.end())
            throw EncodingSoundnessError("replayed state missing from the "
                                         "reachable index at step " +
                                         std::to_string(t));
        int si = static_cast<int>(it - m.state_index.begin());
        for (int s = 0; s < static_cast<int>(m.state_index.size()); ++s) {
            int id = m.y_ids[t][s];
            if (id < 0)
                continue;
            int expect = (s == si) ? 1 : 0;
            if (assignment[id] != expect)
                throw EncodingSoundnessError(
                    "state variable disagrees with replay at step " +
                    std::to_string(t));
        }
    }

    // Cross-check beliefs, observations and goal indicators per observer.
    for (std::size_t i = 0; i < p.sensors.size(); ++i) {
        const ObserverTrace &ot = out.trace.observers[i];
        for (int t = 0; t <= m.horizon; ++t) {
            for (int s = 0; s < static_cast<int>(m.state_index.size()); ++s) {
                int id = m.b_ids[i][t][s];
                if (id < 0)
                    continue;
                int expect = ot.beliefs[t].contains(m.state_index[s]) ? 1 : 0;
                if (assignment[id] != expect)
                    throw EncodingSoundnessError(
                        "belief variable disagrees with replay (observer " +
                        p.sensors[i].observer_id + ", step " +
                        std::to_string(t) + ")");
            }
        }
        for (const VarInfo &v : m.variables) {
            if (v.kind != VarKind::Observation ||
                v.observer != static_cast<int>(i))
                continue;
            const ObservationSymbol &received = ot.observations[v.t - 1];
            int expect = (!received.empty() && received == v.symbol) ? 1 : 0;
            int id = static_cast<int>(&v - m.variables.data());
            if (assignment[id] != expect)
                throw EncodingSoundnessError(
                    "observation variable disagrees with replay (observer " +
                    p.sensors[i].observer_id + ", step " +
                    std::to_string(v.t) + ")");
        }
        std::vector<std::size_t> goals =
            possible_goals(ot.beliefs.back(), p.goals);
        for (std::size_t gi = 0; gi < p.goals.size(); ++gi) {
            int id = m.g_ids[i][gi];
            int expect = std::binary_search(goals.begin(), goals.end(), gi)
                             ? 1
                             : 0;
            if (assignment[id] != expect)
                throw EncodingSoundnessError(
                    "goal indicator disagrees with replay (observer " +
                    p.sensors[i].observer_id + ")");
        }
        if (p.sensors[i].observer_id == "X")
            out.goals_x = goals.size();
        else
            out.goals_c = goals.size();
    }
    out.objective = m.beta * static_cast<double>(out.goals_c) -
                    (1.0 - m.beta) * static_cast<double>(out.goals_x);
    return out;
}

} // namespace copp
