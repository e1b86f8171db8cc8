#pragma once

// The .copp problem file: a STRIPS domain plus candidate goals and the two
// observer sensor models, with an optional horizon hint and beta weight.
//
// Sections (order-insensitive, each at most once except `sensor`):
//   (fluents f ...)
//   (actions (name :pre (f ...) :add (f ...) :del (f ...) :cost r) ...)
//   (init f ...)
//   (goals (name f ...) ... :true i)          ; i is 1-based
//   (sensor X (rule :action-in (a ...) [:state-has (f ...)] :emit sym) ...
//             [(emit-rule ... :emit sym)] (catchall sym))
//   (sensor C ...)
//   (horizon n)
//   (beta r)

#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "copp/core.hpp"
#include "copp/sensor.hpp"
#include "copp/sexpr.hpp"

namespace copp {

struct ProblemFile {
    PlanningDomain domain;
    CandidateGoalSet goals;
    std::vector<SensorModel> sensors;  // file order; exactly {X, C} in v1
    std::optional<int> horizon_hint;
    std::optional<double> beta;

    const SensorModel &sensor(const std::string &id) const {
        for (const SensorModel &m : sensors)
            if (m.observer_id == id)
                return m;
        throw Error("no sensor for observer " + id);
    }
};

namespace detail {

inline const SExpr &expect_list(const SExpr &node, const std::string &what) {
    if (!node.is_list())
        throw ParseError("expected a list for " + what, node.line, node.col);
    return node;
}

inline const std::string &expect_atom(const SExpr &node,
                                      const std::string &what) {
    if (!node.is_atom)
        throw ParseError("expected an atom for " + what, node.line, node.col);
    return node.atom;
}

inline double parse_number(const SExpr &node, const std::string &what) {
    const std::string &s = expect_atom(node, what);
    char *end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == nullptr || *end != '\0' || s.empty())
        throw ParseError("invalid number '" + s + "' for " + what, node.line,
                         node.col);
    return v;
}

inline long parse_integer(const SExpr &node, const std::string &what) {
    double v = parse_number(node, what);
    if (v != std::floor(v))
        throw ParseError("expected an integer for " + what, node.line, node.col);
    return static_cast<long>(v);
}

inline State parse_fluent_list(const PlanningDomain &d, const SExpr &node,
                               const std::string &what) {
    std::vector<FluentId> ids;
    for (const SExpr &child : expect_list(node, what).children) {
        const std::string &name = expect_atom(child, "fluent name");
        if (!d.has_fluent(name))
            throw ParseError("reference to undeclared fluent '" + name + "'",
                             child.line, child.col);
        ids.push_back(d.fluent_id(name));
    }
    return State(std::move(ids));
}

inline SensorRule parse_sensor_rule(const PlanningDomain &d, const SExpr &node) {
    SensorRule rule;
    bool have_emit = false;
    const auto &kids = node.children;
    std::size_t i = 1;
    while (i < kids.size()) {
        const std::string &key = expect_atom(kids[i], "rule keyword");
        if (i + 1 >= kids.size())
            throw ParseError("missing value after " + key, kids[i].line,
                             kids[i].col);
        if (key == ":action-in") {
            for (const SExpr &a : expect_list(kids[i + 1], ":action-in").children) {
                const std::string &name = expect_atom(a, "action name");
                if (!d.has_action(name))
                    throw ParseError("reference to undeclared action '" + name +
                                         "'",
                                     a.line, a.col);
                rule.actions.push_back(d.action_id(name));
            }
            std::sort(rule.actions.begin(), rule.actions.end());
        } else if (key == ":state-has") {
            rule.state_has = parse_fluent_list(d, kids[i + 1], ":state-has");
        } else if (key == ":emit") {
            rule.emit = expect_atom(kids[i + 1], "symbol");
            have_emit = true;
        } else {
            throw ParseError("unknown rule keyword " + key, kids[i].line,
                             kids[i].col);
        }
        i += 2;
    }
    if (!have_emit)
        throw ParseError("rule without :emit", node.line, node.col);
    return rule;
}

} // namespace detail

inline ProblemFile parse(const std::string &text) {
    using namespace detail;
    std::vector<SExpr> nodes = parse_sexprs(text);

    const SExpr *fluents_node = nullptr;
    const SExpr *actions_node = nullptr;
    const SExpr *init_node = nullptr;
    const SExpr *goals_node = nullptr;
    std::vector<const SExpr *> sensor_nodes;
    const SExpr *horizon_node = nullptr;
    const SExpr *beta_node = nullptr;

    auto assign_once = [](const SExpr *&slot, const SExpr &node,
                          const std::string &name) {
        if (slot != nullptr)
            throw ParseError("duplicate section " + name, node.line, node.col);
        slot = &node;
    };

    for (const SExpr &node : nodes) {
        if (!node.is_list() || node.children.empty() ||
            !node.children[0].is_atom)
            throw ParseError("expected a (section ...) list", node.line,
                             node.col);
        const std::string &tag = node.children[0].atom;
        if (tag == "fluents")
            assign_once(fluents_node, node, tag);
        else if (tag == "actions")
            assign_once(actions_node, node, tag);
        else if (tag == "init")
            assign_once(init_node, node, tag);
        else if (tag == "goals")
            assign_once(goals_node, node, tag);
        else if (tag == "sensor")
            sensor_nodes.push_back(&node);
        else if (tag == "horizon")
            assign_once(horizon_node, node, tag);
        else if (tag == "beta")
            assign_once(beta_node, node, tag);
        else
            throw ParseError("unknown section '" + tag + "'", node.line,
                             node.col);
    }
    if (!fluents_node)
        throw ParseError("missing (fluents ...) section", 1, 1);
    if (!actions_node)
        throw ParseError("missing (actions ...) section", 1, 1);
    if (!init_node)
        throw ParseError("missing (init ...) section", 1, 1);
    if (!goals_node)
        throw ParseError("missing (goals ...) section", 1, 1);

    ProblemFile p;

    for (std::size_t i = 1; i < fluents_node->children.size(); ++i) {
        const SExpr &f = fluents_node->children[i];
        const std::string &name = expect_atom(f, "fluent name");
        if (p.domain.has_fluent(name))
            throw ParseError("duplicate fluent '" + name + "'", f.line, f.col);
        p.domain.add_fluent(name);
    }

    for (std::size_t i = 1; i < actions_node->children.size(); ++i) {
        const SExpr &a = expect_list(actions_node->children[i], "action");
        if (a.children.empty())
            throw ParseError("empty action definition", a.line, a.col);
        Action act;
        act.name = expect_atom(a.children[0], "action name");
        std::size_t j = 1;
        while (j < a.children.size()) {
            const std::string &key = expect_atom(a.children[j], "action keyword");
            if (j + 1 >= a.children.size())
                throw ParseError("missing value after " + key, a.children[j].line,
                                 a.children[j].col);
            const SExpr &val = a.children[j + 1];
            if (key == ":pre")
                act.pre = parse_fluent_list(p.domain, val, ":pre");
            else if (key == ":add")
                act.add = parse_fluent_list(p.domain, val, ":add");
            else if (key == ":del")
                act.del = parse_fluent_list(p.domain, val, ":del");
            else if (key == ":cost")
                act.cost = parse_number(val, ":cost");
            else
                throw ParseError("unknown action keyword " + key,
                                 a.children[j].line, a.children[j].col);
            j += 2;
        }
        if (act.cost < 0)
            throw ParseError("negative cost for action " + act.name, a.line,
                             a.col);
        try {
            p.domain.add_action(std::move(act));
        } catch (const DomainMismatchError &e) {
            throw ParseError(e.what(), a.line, a.col);
        }
    }

    {
        SExpr init_list = *init_node;
        init_list.children.erase(init_list.children.begin());
        p.domain.set_initial(
            parse_fluent_list(p.domain, init_list, "(init ...)"));
    }

    {
        const auto &kids = goals_node->children;
        std::optional<long> true_index;
        for (std::size_t i = 1; i < kids.size(); ++i) {
            if (kids[i].is_atom && kids[i].atom == ":true") {
                if (i + 1 >= kids.size())
                    throw ParseError("missing index after :true", kids[i].line,
                                     kids[i].col);
                true_index = parse_integer(kids[i + 1], ":true index");
                ++i;
                continue;
            }
            const SExpr &g = expect_list(kids[i], "goal");
            if (g.children.empty())
                throw ParseError("empty goal definition", g.line, g.col);
            expect_atom(g.children[0], "goal name");
            SExpr fl = g;
            fl.children.erase(fl.children.begin());
            State goal = parse_fluent_list(p.domain, fl, "goal");
            for (const State &existing : p.goals.goals)
                if (existing == goal)
                    throw ParseError("duplicate goal (same fluent set)", g.line,
                                     g.col);
            p.goals.goals.push_back(std::move(goal));
        }
        if (p.goals.goals.empty())
            throw ParseError("at least one goal required", goals_node->line,
                             goals_node->col);
        if (!true_index)
            throw ParseError("missing :true index", goals_node->line,
                             goals_node->col);
        if (*true_index < 1 ||
            *true_index > static_cast<long>(p.goals.goals.size()))
            throw ParseError(":true index out of range", goals_node->line,
                             goals_node->col);
        p.goals.true_goal_index = static_cast<std::size_t>(*true_index - 1);
    }

    for (const SExpr *sn : sensor_nodes) {
        const auto &kids = sn->children;
        if (kids.size() < 2 || !kids[1].is_atom)
            throw ParseError("sensor requires an observer id", sn->line,
                             sn->col);
        SensorModel m;
        m.observer_id = kids[1].atom;
        if (m.observer_id != "X" && m.observer_id != "C")
            throw ParseError("observer id must be X or C", kids[1].line,
                             kids[1].col);
        for (const SensorModel &existing : p.sensors)
            if (existing.observer_id == m.observer_id)
                throw ParseError("duplicate sensor for observer " +
                                     m.observer_id,
                                 sn->line, sn->col);
        bool saw_catchall = false;
        for (std::size_t i = 2; i < kids.size(); ++i) {
            const SExpr &entry = expect_list(kids[i], "sensor entry");
            if (entry.tagged("rule") || entry.tagged("emit-rule")) {
                if (saw_catchall)
                    throw ParseError("rule after catchall", entry.line,
                                     entry.col);
                SensorRule rule = parse_sensor_rule(p.domain, entry);
                if (entry.tagged("rule"))
                    m.rules.push_back(std::move(rule));
                else
                    m.emission_overrides.push_back(std::move(rule));
            } else if (entry.tagged("catchall")) {
                if (entry.children.size() != 2)
                    throw ParseError("catchall takes exactly one symbol",
                                     entry.line, entry.col);
                m.catchall = expect_atom(entry.children[1], "symbol");
                saw_catchall = true;
            } else {
                throw ParseError("unknown sensor entry", entry.line, entry.col);
            }
        }
        try {
            validate_sensor(p.domain, m);
        } catch (const Error &e) {
            throw ParseError(e.what(), sn->line, sn->col);
        }
        p.sensors.push_back(std::move(m));
    }
    if (p.sensors.size() != 2)
        throw ParseError("exactly two sensors (X and C) required", 1, 1);

    if (horizon_node) {
        if (horizon_node->children.size() != 2)
            throw ParseError("(horizon n) takes one integer",
                             horizon_node->line, horizon_node->col);
        long h = parse_integer(horizon_node->children[1], "horizon");
        if (h < 1)
            throw ParseError("horizon must be positive", horizon_node->line,
                             horizon_node->col);
        p.horizon_hint = static_cast<int>(h);
    }
    if (beta_node) {
        if (beta_node->children.size() != 2)
            throw ParseError("(beta r) takes one number", beta_node->line,
                             beta_node->col);
        double b = parse_number(beta_node->children[1], "beta");
        if (b < 0.0 || b > 1.0)
            throw ParseError("beta must lie in [0, 1]", beta_node->line,
                             beta_node->col);
        p.beta = b;
    }
    return p;
}

namespace detail {

inline std::string fmt_number(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_fluent_list(std::ostringstream &out, const PlanningDomain &d,
                              const State &s) {
    out << '(';
    for (std::size_t i = 0; i < s.fluents.size(); ++i) {
        if (i > 0)
            out << ' ';
        out << d.fluent_name(s.fluents[i]);
    }
    out << ')';
}

inline void write_rule(std::ostringstream &out, const ProblemFile &p,
                       const SensorRule &r, const char *tag) {
    out << "  (" << tag;
    if (!r.actions.empty()) {
        out << " :action-in (";
        for (std::size_t i = 0; i < r.actions.size(); ++i) {
            if (i > 0)
                out << ' ';
            out << p.domain.action(r.actions[i]).name;
        }
        out << ')';
    }
    if (!r.state_has.empty()) {
        out << " :state-has ";
        write_fluent_list(out, p.domain, r.state_has);
    }
    out << " :emit " << r.emit << ")\n";
}

} // namespace detail

// Deterministic canonical form; parse(serialize(p)) is structurally equal
// to p and serialize itself is byte-stable.
inline std::string serialize(const ProblemFile &p) {
    using namespace detail;
    std::ostringstream out;
    out << "(fluents";
    for (const std::string &f : p.domain.fluent_names)
        out << ' ' << f;
    out << ")\n";

    out << "(actions\n";
    for (const Action &a : p.domain.actions) {
        out << "  (" << a.name;
        if (!a.pre.empty()) {
            out << " :pre ";
            write_fluent_list(out, p.domain, a.pre);
        }
        if (!a.add.empty()) {
            out << " :add ";
            write_fluent_list(out, p.domain, a.add);
        }
        if (!a.del.empty()) {
            out << " :del ";
            write_fluent_list(out, p.domain, a.del);
        }
        if (a.cost != 1.0)
            out << " :cost " << fmt_number(a.cost);
        out << ")\n";
    }
    out << ")\n";

    out << "(init";
    for (FluentId f : p.domain.initial.fluents)
        out << ' ' << p.domain.fluent_name(f);
    out << ")\n";

    out << "(goals\n";
    for (std::size_t i = 0; i < p.goals.goals.size(); ++i) {
        out << "  (g" << i + 1;
        for (FluentId f : p.goals.goals[i].fluents)
            out << ' ' << p.domain.fluent_name(f);
        out << ")\n";
    }
    out << "  :true " << p.goals.true_goal_index + 1 << ")\n";

    for (const SensorModel &m : p.sensors) {
        out << "(sensor " << m.observer_id << '\n';
        for (const SensorRule &r : m.rules)
            write_rule(out, p, r, "rule");
        for (const SensorRule &r : m.emission_overrides)
            write_rule(out, p, r, "emit-rule");
        out << "  (catchall " << m.catchall << "))\n";
    }

    if (p.horizon_hint)
        out << "(horizon " << *p.horizon_hint << ")\n";
    if (p.beta)
        out << "(beta " << fmt_number(*p.beta) << ")\n";
    return out.str();
}

inline bool rules_equal(const std::vector<SensorRule> &a,
                        const std::vector<SensorRule> &b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].actions != b[i].actions || a[i].state_has != b[i].state_has ||
            a[i].emit != b[i].emit)
            return false;
    return true;
}

inline bool problems_equal(const ProblemFile &a, const ProblemFile &b) {
    if (a.domain.fluent_names != b.domain.fluent_names)
        return false;
    if (a.domain.actions.size() != b.domain.actions.size())
        return false;
    for (std::size_t i = 0; i < a.domain.actions.size(); ++i) {
        const Action &x = a.domain.actions[i];
        const Action &y = b.domain.actions[i];
        if (x.name != y.name || x.pre != y.pre || x.add != y.add ||
            x.del != y.del || x.cost != y.cost)
            return false;
    }
    if (a.domain.initial != b.domain.initial)
        return false;
    if (a.goals.goals != b.goals.goals ||
        a.goals.true_goal_index != b.goals.true_goal_index)
        return false;
    if (a.sensors.size() != b.sensors.size())
        return false;
    for (std::size_t i = 0; i < a.sensors.size(); ++i) {
        const SensorModel &x = a.sensors[i];
        const SensorModel &y = b.sensors[i];
        if (x.observer_id != y.observer_id || x.catchall != y.catchall ||
            !rules_equal(x.rules, y.rules) ||
            !rules_equal(x.emission_overrides, y.emission_overrides))
            return false;
    }
    return a.horizon_hint == b.horizon_hint && a.beta == b.beta;
}

} // namespace copp
