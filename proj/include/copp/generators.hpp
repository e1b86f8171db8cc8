#pragma once

// Built-in problem generators: gridworld navigation, box-pushing, and a
// battery-limited recycling robot, each with the observer pair (X, C)
// wired to direction-class sensors.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "copp/core.hpp"
#include "copp/problem.hpp"
#include "copp/sensor.hpp"

namespace copp {

struct Cell {
    int r = 0;
    int c = 0;
    friend bool operator==(const Cell &a, const Cell &b) {
        return a.r == b.r && a.c == b.c;
    }
};

namespace detail {

inline std::string rc(const std::string &stem, int r, int c) {
    return stem + "_" + std::to_string(r) + "_" + std::to_string(c);
}

inline std::vector<ActionId> actions_with_prefix(const PlanningDomain &d,
                                                 const std::string &prefix) {
    std::vector<ActionId> ids;
    for (ActionId i = 0; i < d.actions.size(); ++i)
        if (d.actions[i].name.rfind(prefix, 0) == 0)
            ids.push_back(i);
    return ids;
}

inline SensorRule class_rule(const PlanningDomain &d,
                             const std::vector<std::string> &prefixes,
                             const std::string &symbol) {
    SensorRule rule;
    for (const std::string &p : prefixes)
        for (ActionId id : actions_with_prefix(d, p))
            rule.actions.push_back(id);
    std::sort(rule.actions.begin(), rule.actions.end());
    rule.emit = symbol;
    return rule;
}

} // namespace detail

// Four-connected grid; an action is named after the cell it leaves.
// X distinguishes vertical from horizontal motion, C distinguishes
// north-east from south-west motion.
inline ProblemFile gen_gridworld(int width, int height, Cell start,
                                 const std::vector<Cell> &goal_cells,
                                 std::size_t true_index, int horizon = 12) {
    if (width < 1 || height < 1)
        throw BoundsError("grid dimensions must be positive");
    auto in_grid = [&](int r, int c) {
        return r >= 0 && r < height && c >= 0 && c < width;
    };
    if (!in_grid(start.r, start.c))
        throw BoundsError("start cell outside grid");
    for (const Cell &g : goal_cells)
        if (!in_grid(g.r, g.c))
            throw BoundsError("goal cell outside grid");
    if (true_index >= goal_cells.size())
        throw BoundsError("true goal index out of range");

    ProblemFile p;
    PlanningDomain &d = p.domain;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            d.add_fluent(detail::rc("at", r, c));

    auto mover = [&](const std::string &dir, int r, int c, int r2, int c2) {
        Action a;
        a.name = detail::rc(dir, r, c);
        a.pre = State({d.fluent_id(detail::rc("at", r, c))});
        a.add = State({d.fluent_id(detail::rc("at", r2, c2))});
        a.del = a.pre;
        d.add_action(std::move(a));
    };
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            if (r > 0)
                mover("up", r, c, r - 1, c);
            if (r < height - 1)
                mover("down", r, c, r + 1, c);
            if (c > 0)
                mover("left", r, c, r, c - 1);
            if (c < width - 1)
                mover("right", r, c, r, c + 1);
        }
    d.set_initial(State({d.fluent_id(detail::rc("at", start.r, start.c))}));

    for (const Cell &g : goal_cells)
        p.goals.goals.push_back(State({d.fluent_id(detail::rc("at", g.r, g.c))}));
    p.goals.true_goal_index = true_index;

    SensorModel x;
    x.observer_id = "X";
    x.rules.push_back(detail::class_rule(d, {"up", "down"}, "vertical"));
    x.rules.push_back(detail::class_rule(d, {"left", "right"}, "horizontal"));
    x.catchall = "none";
    SensorModel c;
    c.observer_id = "C";
    c.rules.push_back(detail::class_rule(d, {"up", "right"}, "north-east"));
    c.rules.push_back(detail::class_rule(d, {"down", "left"}, "south-west"));
    c.catchall = "none";
    p.sensors = {std::move(x), std::move(c)};
    p.horizon_hint = horizon;
    return p;
}

// Agent pushes a single box around a grid. The agent has a heading and can
// turn in place, step forward into a box-free cell, or push the box one
// cell ahead. X hears turns and plain moves; C only tells clockwise
// activity (turn right / move / push) from counter-clockwise (turn left /
// stay).
inline ProblemFile gen_boxpush(int width, int height, Cell agent, Cell box,
                               const std::vector<Cell> &goal_cells,
                               std::size_t true_index, int horizon = 12) {
    if (width < 1 || height < 1)
        throw BoundsError("grid dimensions must be positive");
    auto in_grid = [&](int r, int c) {
        return r >= 0 && r < height && c >= 0 && c < width;
    };
    if (!in_grid(agent.r, agent.c) || !in_grid(box.r, box.c) ||
        agent == box)
        throw BoundsError("agent/box placement invalid");
    for (const Cell &g : goal_cells)
        if (!in_grid(g.r, g.c))
            throw BoundsError("goal cell outside grid");
    if (true_index >= goal_cells.size())
        throw BoundsError("true goal index out of range");

    ProblemFile p;
    PlanningDomain &d = p.domain;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            d.add_fluent(detail::rc("at", r, c));
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            d.add_fluent(detail::rc("box", r, c));
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            d.add_fluent(detail::rc("boxfree", r, c));
    const char *dirs = "nesw";
    const int dr[] = {-1, 0, 1, 0};
    const int dc[] = {0, 1, 0, -1};
    for (int k = 0; k < 4; ++k)
        d.add_fluent(std::string("facing_") + dirs[k]);

    auto facing = [&](int k) {
        return d.fluent_id(std::string("facing_") + dirs[k]);
    };
    for (int k = 0; k < 4; ++k) {
        Action tl;
        tl.name = std::string("turnleft_") + dirs[k];
        tl.pre = State({facing(k)});
        tl.add = State({facing((k + 3) % 4)});
        tl.del = tl.pre;
        d.add_action(std::move(tl));
        Action tr;
        tr.name = std::string("turnright_") + dirs[k];
        tr.pre = State({facing(k)});
        tr.add = State({facing((k + 1) % 4)});
        tr.del = tr.pre;
        d.add_action(std::move(tr));
    }
    {
        Action stay;
        stay.name = "stay";
        d.add_action(std::move(stay));
    }
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int k = 0; k < 4; ++k) {
                int r1 = r + dr[k], c1 = c + dc[k];
                if (!in_grid(r1, c1))
                    continue;
                Action mv;
                mv.name = detail::rc("move", r, c) + "_" + dirs[k];
                mv.pre = State({d.fluent_id(detail::rc("at", r, c)), facing(k),
                                d.fluent_id(detail::rc("boxfree", r1, c1))});
                mv.add = State({d.fluent_id(detail::rc("at", r1, c1))});
                mv.del = State({d.fluent_id(detail::rc("at", r, c))});
                d.add_action(std::move(mv));
                int r2 = r1 + dr[k], c2 = c1 + dc[k];
                if (!in_grid(r2, c2))
                    continue;
                Action push;
                push.name = detail::rc("push", r, c) + "_" + dirs[k];
                push.pre = State({d.fluent_id(detail::rc("at", r, c)), facing(k),
                                  d.fluent_id(detail::rc("box", r1, c1)),
                                  d.fluent_id(detail::rc("boxfree", r2, c2))});
                push.add = State({d.fluent_id(detail::rc("at", r1, c1)),
                                  d.fluent_id(detail::rc("box", r2, c2)),
                                  d.fluent_id(detail::rc("boxfree", r1, c1))});
                push.del = State({d.fluent_id(detail::rc("at", r, c)),
                                  d.fluent_id(detail::rc("box", r1, c1)),
                                  d.fluent_id(detail::rc("boxfree", r2, c2))});
                d.add_action(std::move(push));
            }

    std::vector<FluentId> init{d.fluent_id(detail::rc("at", agent.r, agent.c)),
                               d.fluent_id(detail::rc("box", box.r, box.c)),
                               facing(0)};
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            if (!(Cell{r, c} == box))
                init.push_back(d.fluent_id(detail::rc("boxfree", r, c)));
    d.set_initial(State(std::move(init)));

    for (const Cell &g : goal_cells)
        p.goals.goals.push_back(
            State({d.fluent_id(detail::rc("box", g.r, g.c))}));
    p.goals.true_goal_index = true_index;

    SensorModel x;
    x.observer_id = "X";
    x.rules.push_back(detail::class_rule(d, {"turnleft", "turnright"}, "turn"));
    x.rules.push_back(detail::class_rule(d, {"move"}, "move"));
    x.catchall = "none";
    SensorModel c;
    c.observer_id = "C";
    c.rules.push_back(
        detail::class_rule(d, {"turnright", "move", "push"}, "clockwise"));
    c.rules.push_back(
        detail::class_rule(d, {"turnleft", "stay"}, "counter-clockwise"));
    c.catchall = "none";
    p.sensors = {std::move(x), std::move(c)};
    p.horizon_hint = horizon;
    return p;
}

// A robot collects cans on a grid under a battery budget; every move, pick,
// and drop costs one charge and a charge action refills the battery. X
// hears motion axes, gripper use and charging; C hears diagonal motion
// classes plus {pick, charge} vs {drop, stay}.
inline ProblemFile gen_recycling(int width, int height, Cell start,
                                 const std::vector<Cell> &can_cells,
                                 const std::vector<Cell> &goal_cells,
                                 std::size_t true_index, int battery_levels,
                                 int horizon = 10) {
    if (width < 1 || height < 1)
        throw BoundsError("grid dimensions must be positive");
    if (battery_levels < 1)
        throw BoundsError("battery needs at least one level");
    auto in_grid = [&](int r, int c) {
        return r >= 0 && r < height && c >= 0 && c < width;
    };
    if (!in_grid(start.r, start.c))
        throw BoundsError("start cell outside grid");
    for (const Cell &g : can_cells)
        if (!in_grid(g.r, g.c))
            throw BoundsError("can cell outside grid");
    for (const Cell &g : goal_cells)
        if (!in_grid(g.r, g.c))
            throw BoundsError("goal cell outside grid");
    if (true_index >= goal_cells.size())
        throw BoundsError("true goal index out of range");

    ProblemFile p;
    PlanningDomain &d = p.domain;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            d.add_fluent(detail::rc("at", r, c));
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            d.add_fluent(detail::rc("can", r, c));
    d.add_fluent("holding");
    d.add_fluent("handempty");
    for (int k = 0; k < battery_levels; ++k)
        d.add_fluent("battery_" + std::to_string(k));
    auto battery = [&](int k) {
        return d.fluent_id("battery_" + std::to_string(k));
    };

    auto mover = [&](const std::string &dir, int r, int c, int r2, int c2,
                     int k) {
        Action a;
        a.name = detail::rc(dir, r, c) + "_" + std::to_string(k);
        a.pre = State({d.fluent_id(detail::rc("at", r, c)), battery(k)});
        a.add = State({d.fluent_id(detail::rc("at", r2, c2)), battery(k - 1)});
        a.del = a.pre;
        d.add_action(std::move(a));
    };
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int k = 1; k < battery_levels; ++k) {
                if (r > 0)
                    mover("up", r, c, r - 1, c, k);
                if (r < height - 1)
                    mover("down", r, c, r + 1, c, k);
                if (c > 0)
                    mover("left", r, c, r, c - 1, k);
                if (c < width - 1)
                    mover("right", r, c, r, c + 1, k);
            }
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int k = 1; k < battery_levels; ++k) {
                Action pick;
                pick.name = detail::rc("pick", r, c) + "_" + std::to_string(k);
                pick.pre = State({d.fluent_id(detail::rc("at", r, c)),
                                  d.fluent_id(detail::rc("can", r, c)),
                                  d.fluent_id("handempty"), battery(k)});
                pick.add = State({d.fluent_id("holding"), battery(k - 1)});
                pick.del = State({d.fluent_id(detail::rc("can", r, c)),
                                  d.fluent_id("handempty"), battery(k)});
                d.add_action(std::move(pick));
                Action drop;
                drop.name = detail::rc("drop", r, c) + "_" + std::to_string(k);
                drop.pre = State({d.fluent_id(detail::rc("at", r, c)),
                                  d.fluent_id("holding"), battery(k)});
                drop.add = State({d.fluent_id(detail::rc("can", r, c)),
                                  d.fluent_id("handempty"), battery(k - 1)});
                drop.del = State({d.fluent_id("holding"), battery(k)});
                d.add_action(std::move(drop));
            }
    for (int k = 0; k + 1 < battery_levels; ++k) {
        Action ch;
        ch.name = "charge_" + std::to_string(k);
        ch.pre = State({battery(k)});
        ch.add = State({battery(battery_levels - 1)});
        ch.del = ch.pre;
        d.add_action(std::move(ch));
    }
    {
        Action stay;
        stay.name = "stay";
        d.add_action(std::move(stay));
    }

    std::vector<FluentId> init{d.fluent_id(detail::rc("at", start.r, start.c)),
                               d.fluent_id("handempty"),
                               battery(battery_levels - 1)};
    for (const Cell &cc : can_cells)
        init.push_back(d.fluent_id(detail::rc("can", cc.r, cc.c)));
    d.set_initial(State(std::move(init)));

    for (const Cell &g : goal_cells)
        p.goals.goals.push_back(
            State({d.fluent_id(detail::rc("can", g.r, g.c))}));
    p.goals.true_goal_index = true_index;

    SensorModel x;
    x.observer_id = "X";
    x.rules.push_back(detail::class_rule(d, {"left", "right"}, "horizontal"));
    x.rules.push_back(detail::class_rule(d, {"up", "down"}, "vertical"));
    x.rules.push_back(detail::class_rule(d, {"pick", "drop"}, "using-gripper"));
    x.rules.push_back(detail::class_rule(d, {"charge"}, "charging"));
    x.catchall = "none";
    SensorModel c;
    c.observer_id = "C";
    c.rules.push_back(detail::class_rule(d, {"up", "right"}, "north-east"));
    c.rules.push_back(detail::class_rule(d, {"down", "left"}, "south-west"));
    c.rules.push_back(detail::class_rule(d, {"pick", "charge"}, "picking"));
    c.rules.push_back(detail::class_rule(d, {"drop", "stay"}, "dropping"));
    c.catchall = "none";
    p.sensors = {std::move(x), std::move(c)};
    p.horizon_hint = horizon;
    return p;
}

// Random gridworld instances: start and goal cells drawn uniformly without
// repetition, true goal uniform among the goals. Deterministic for a seed.
inline std::vector<ProblemFile>
gen_gridworld_suite(int width, int height, std::size_t count,
                    std::size_t goals_per_instance, std::uint32_t seed,
                    int horizon = 12) {
    if (goals_per_instance == 0 ||
        goals_per_instance + 1 > static_cast<std::size_t>(width) *
                                     static_cast<std::size_t>(height))
        throw BoundsError("grid too small for requested goal count");
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> row(0, height - 1);
    std::uniform_int_distribution<int> col(0, width - 1);
    std::vector<ProblemFile> suite;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<Cell> cells;
        while (cells.size() < goals_per_instance + 1) {
            Cell cand{row(rng), col(rng)};
            bool dup = false;
            for (const Cell &c : cells)
                dup = dup || c == cand;
            if (!dup)
                cells.push_back(cand);
        }
        Cell start = cells.front();
        std::vector<Cell> goals(cells.begin() + 1, cells.end());
        std::uniform_int_distribution<std::size_t> pick(0, goals.size() - 1);
        std::size_t true_index = pick(rng);
        suite.push_back(
            gen_gridworld(width, height, start, goals, true_index, horizon));
    }
    return suite;
}

} // namespace copp
