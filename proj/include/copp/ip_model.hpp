#pragma once

// 0/1 integer-program model produced by the encoder: binary variables with
// typed indices, integer-coefficient linear rows tagged with the rule that
// produced them, and a (possibly fractional) linear objective. Models are
// immutable after encoding and carry everything decode() needs.

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "copp/core.hpp"
#include "copp/problem.hpp"

namespace copp {

// Enum order doubles as the branching rank within a timestep.
enum class VarKind : std::uint8_t {
    Action = 0,      // x: action a fires at step t
    StateAt,         // y: world is in state s at step t
    Observation,     // w: observer receives symbol o at step t
    BeliefState,     // b: state s is in observer's belief at step t
    BeliefStep,      // h: belief transition (s, a) active at step t
    GoalIndicator,   // g: goal satisfied by observer's final belief
    Aux,             // products and step-activity indicators
};

inline const char *var_kind_tag(VarKind k) {
    switch (k) {
    case VarKind::Action: return "x";
    case VarKind::StateAt: return "y";
    case VarKind::Observation: return "w";
    case VarKind::BeliefState: return "b";
    case VarKind::BeliefStep: return "h";
    case VarKind::GoalIndicator: return "g";
    case VarKind::Aux: return "z";
    }
    return "?";
}

struct VarInfo {
    VarKind kind;
    int t = -1;         // timestep; g-variables use the horizon
    int action = -1;    // Action/BeliefStep/Aux products
    int state = -1;     // index into IPModel::state_index
    int observer = -1;  // index into ProblemFile::sensors
    int goal = -1;      // index into goals
    std::string symbol; // Observation variables: the received symbol
    std::string name;   // unique, LP-safe
};

struct LinearConstraint {
    enum class Cmp { LE, GE, EQ };
    std::vector<std::pair<int, int>> terms;  // (variable id, coefficient)
    Cmp cmp = Cmp::LE;
    int rhs = 0;
    std::string tag;  // producing rule, e.g. "state-uniqueness"
};

struct IPModel {
    std::shared_ptr<const ProblemFile> problem;
    int horizon = 0;
    double beta = 0.5;

    std::vector<VarInfo> variables;               // id = position
    std::vector<LinearConstraint> constraints;
    std::vector<std::pair<int, double>> objective; // minimized

    std::vector<State> state_index;               // reachable set, BFS order
    std::vector<int> state_depth;

    // Dense lookup tables; -1 where the variable does not exist.
    std::vector<std::vector<int>> x_ids;              // [t][action]
    std::vector<std::vector<int>> y_ids;              // [t][state]
    std::vector<std::vector<std::vector<int>>> b_ids; // [obs][t][state]
    std::vector<std::vector<int>> g_ids;              // [obs][goal]
    std::vector<int> act_ids;                         // [t]

    std::size_t num_vars() const { return variables.size(); }
    std::size_t num_constraints() const { return constraints.size(); }
};

namespace detail {

inline std::string lp_safe(const std::string &s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

inline void lp_write_terms(std::ostringstream &out,
                           const std::vector<std::pair<int, int>> &terms,
                           const IPModel &m) {
    bool first = true;
    for (const auto &[var, coef] : terms) {
        if (coef == 0)
            continue;
        if (first) {
            if (coef < 0)
                out << "- ";
            first = false;
        } else {
            out << (coef < 0 ? " - " : " + ");
        }
        int mag = coef < 0 ? -coef : coef;
        if (mag != 1)
            out << mag << ' ';
        out << m.variables[var].name;
    }
    if (first)
        out << '0';
}

} // namespace detail

// Textual LP export (Minimize / Subject To / Binary / End), deterministic.
inline std::string export_lp(const IPModel &m) {
    std::ostringstream out;
    out << "Minimize\n obj:";
    {
        bool first = true;
        for (const auto &[var, coef] : m.objective) {
            if (coef == 0.0)
                continue;
            if (first) {
                out << ' ';
                if (coef < 0)
                    out << "- ";
                first = false;
            } else {
                out << (coef < 0 ? " - " : " + ");
            }
            double mag = coef < 0 ? -coef : coef;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g", mag);
            out << buf << ' ' << m.variables[var].name;
        }
        if (first)
            out << " 0";
    }
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        const LinearConstraint &c = m.constraints[i];
        out << ' ' << detail::lp_safe(c.tag) << '_' << i << ": ";
        detail::lp_write_terms(out, c.terms, m);
        switch (c.cmp) {
        case LinearConstraint::Cmp::LE: out << " <= "; break;
        case LinearConstraint::Cmp::GE: out << " >= "; break;
        case LinearConstraint::Cmp::EQ: out << " = "; break;
        }
        out << c.rhs << '\n';
    }
    out << "Binary\n";
    for (const VarInfo &v : m.variables)
        out << ' ' << v.name << '\n';
    out << "End\n";
    return out.str();
}

// Debug listing: one line per row with its rule tag spelled out.
inline std::string dump_constraints(const IPModel &m) {
    std::ostringstream out;
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        const LinearConstraint &c = m.constraints[i];
        out << "row " << i << " [" << c.tag << "] ";
        detail::lp_write_terms(out, c.terms, m);
        switch (c.cmp) {
        case LinearConstraint::Cmp::LE: out << " <= "; break;
        case LinearConstraint::Cmp::GE: out << " >= "; break;
        case LinearConstraint::Cmp::EQ: out << " = "; break;
        }
        out << c.rhs << '\n';
    }
    return out.str();
}

} // namespace copp
