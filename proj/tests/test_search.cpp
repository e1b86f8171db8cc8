#include <gtest/gtest.h>

#include <algorithm>

#include "copp/generators.hpp"
#include "copp/search.hpp"
#include "oracles.hpp"

using namespace copp;

namespace {

ProblemFile grid33() {
    return gen_gridworld(3, 3, {1, 1}, {{0, 0}, {0, 2}, {2, 0}}, 0, 6);
}

State cell(const ProblemFile &p, int r, int c) {
    return State({p.domain.fluent_id("at_" + std::to_string(r) + "_" +
                                     std::to_string(c))});
}

} // namespace

TEST(Heuristic, GridCostsAreManhattan) {
    ProblemFile p = grid33();
    AdditiveHeuristic h(p.domain);
    EXPECT_DOUBLE_EQ(h.cost(p.domain.initial, cell(p, 0, 0)), 2.0);
    EXPECT_DOUBLE_EQ(h.cost(p.domain.initial, cell(p, 1, 1)), 0.0);
    EXPECT_DOUBLE_EQ(h.cost(cell(p, 0, 0), cell(p, 2, 2)), 4.0);
    // queries from one source share a single fixpoint pass
    h.cost(p.domain.initial, cell(p, 2, 0));
    EXPECT_EQ(h.cache_size(), 2u);
}

TEST(Heuristic, UnreachableGoalIsInfiniteButClamped) {
    PlanningDomain d;
    FluentId a = d.add_fluent("a");
    d.add_fluent("b");
    FluentId c = d.add_fluent("c");
    Action mk;
    mk.name = "mk";
    mk.pre = State({a});
    mk.add = State({d.fluent_id("b")});
    d.add_action(std::move(mk));
    d.set_initial(State({a}));

    AdditiveHeuristic h(d);
    EXPECT_EQ(h.cost(d.initial, State({c})), kInfiniteCost);
    EXPECT_DOUBLE_EQ(h.clamped_cost(d.initial, State({c})), kCostSentinel);
}

TEST(GoalSpec, DefaultsFillFromReachability) {
    ProblemFile p = grid33();
    AdditiveHeuristic h(p.domain);

    GoalSpec two_x;
    two_x.at_least_x = 2;
    GoalSpec r = resolve_goal_spec(p, two_x, h);
    EXPECT_EQ(r.at_most_c, 3u);  // unset cap resolves to |goals|
    // both decoys cost 2 from the start; ties keep goal order
    EXPECT_EQ(r.decoys_x, (std::vector<std::size_t>{1}));
    EXPECT_TRUE(r.targets_c.empty());

    GoalSpec pin_c;
    pin_c.at_most_c = 1;
    r = resolve_goal_spec(p, pin_c, h);
    EXPECT_TRUE(r.decoys_x.empty());
    EXPECT_EQ(r.targets_c, (std::vector<std::size_t>{1, 2}));
}

TEST(GoalSpec, RejectsBadBounds) {
    ProblemFile p = grid33();
    AdditiveHeuristic h(p.domain);
    for (std::size_t bad : {std::size_t{0}, std::size_t{4}}) {
        GoalSpec s;
        s.at_least_x = bad;
        EXPECT_THROW(resolve_goal_spec(p, s, h), BoundsError);
    }
    GoalSpec s;
    s.at_most_c = 4;
    EXPECT_THROW(resolve_goal_spec(p, s, h), BoundsError);
    GoalSpec decoy;
    decoy.decoys_x = {5};
    EXPECT_THROW(resolve_goal_spec(p, decoy, h), BoundsError);
    GoalSpec target;
    target.targets_c = {0};  // the true goal itself
    EXPECT_THROW(resolve_goal_spec(p, target, h), BoundsError);
}

TEST(SubsetHelpers, ObfuscationPicksClosestStatePerDecoy) {
    ProblemFile p = grid33();
    AdditiveHeuristic h(p.domain);
    std::vector<State> belief{cell(p, 0, 1), cell(p, 2, 1)};
    std::vector<const State *> decoys{&p.goals.goals[1], &p.goals.goals[2]};

    // room for both: each decoy is one step from its own belief state
    auto [v2, s2] = detail::best_obfuscation_subset(h, belief, decoys, 2);
    EXPECT_DOUBLE_EQ(v2, 1.0);
    EXPECT_EQ(s2.size(), 2u);

    // one slot: whichever state is kept leaves the other decoy 3 away
    auto [v1, s1] = detail::best_obfuscation_subset(h, belief, decoys, 1);
    EXPECT_DOUBLE_EQ(v1, 3.0);
    EXPECT_EQ(s1.size(), 1u);

    EXPECT_DOUBLE_EQ(detail::best_obfuscation_subset(h, belief, {}, 2).first,
                     0.0);
    EXPECT_DOUBLE_EQ(detail::best_obfuscation_subset(h, {}, decoys, 2).first,
                     kCostSentinel);
}

TEST(SubsetHelpers, LegibilityKeepsStatesFarFromTargets) {
    ProblemFile p = grid33();
    AdditiveHeuristic h(p.domain);
    std::vector<State> belief{cell(p, 0, 1), cell(p, 2, 1), cell(p, 1, 1)};
    std::vector<const State *> targets{&p.goals.goals[1]};  // (0,2)

    auto [v, subset] = detail::best_legibility_subset(h, belief, targets, 2);
    EXPECT_DOUBLE_EQ(v, 2.0);  // kept (2,1) at 3 and (1,1) at 2
    ASSERT_EQ(subset.size(), 2u);
    EXPECT_TRUE(std::find(subset.begin(), subset.end(), cell(p, 2, 1)) !=
                subset.end());
    EXPECT_TRUE(std::find(subset.begin(), subset.end(), cell(p, 1, 1)) !=
                subset.end());
}

TEST(GoalTest, ChecksExactBeliefCardinalities) {
    ProblemFile p = grid33();
    auto belief_over = [&](std::vector<State> states) {
        Belief b;
        b.states = std::move(states);
        b.normalize();
        return b;
    };
    Belief bx = belief_over({cell(p, 0, 0), cell(p, 0, 2), cell(p, 2, 0)});
    Belief bc = belief_over({cell(p, 0, 0), cell(p, 1, 1)});

    GoalSpec phi;
    phi.at_least_x = 3;
    phi.at_most_c = 1;
    EXPECT_TRUE(goal_test(cell(p, 0, 0), bx, bc, p, phi));
    EXPECT_FALSE(goal_test(cell(p, 1, 1), bx, bc, p, phi));  // not at goal
    phi.at_most_c = 0;  // vacuous cap
    EXPECT_TRUE(goal_test(cell(p, 0, 0), bx, bx, p, phi));
    phi.at_least_x = 3;
    Belief two = belief_over({cell(p, 0, 0), cell(p, 0, 2)});
    EXPECT_FALSE(goal_test(cell(p, 0, 0), two, bc, p, phi));
}

TEST(PlanSearch, SolvesAndSurvivesIndependentReplay) {
    ProblemFile p = grid33();
    GoalSpec phi;
    phi.at_least_x = 3;
    phi.at_most_c = 1;
    SearchResult res = plan_search(p, phi);
    ASSERT_EQ(res.status, SearchStatus::Solved);
    EXPECT_EQ(res.delta_used, 1u);  // each delta pass is already complete
    EXPECT_GT(res.expansions, 0u);

    std::vector<std::optional<ActionId>> steps;
    for (ActionId a : res.plan.steps)
        steps.emplace_back(a);
    oracle::RefTrace ref = oracle::ref_run(p.domain, p.sensors, steps);
    EXPECT_TRUE(ref.states.back().count(p.domain.fluent_id("at_0_0")));
    auto gx = oracle::ref_possible_goals(ref.beliefs[0].back(), p.goals);
    auto gc = oracle::ref_possible_goals(ref.beliefs[1].back(), p.goals);
    EXPECT_GE(gx.size(), 3u);
    EXPECT_LE(gc.size(), 1u);
    EXPECT_EQ(res.goals_x, gx.size());
    EXPECT_EQ(res.goals_c, gc.size());
}

TEST(PlanSearch, ProvesExhaustionFromParityMismatch) {
    // X counts vertical and horizontal moves, so every belief state shares
    // the true path's displacement parity on both axes. Goals whose
    // displacement parity differs can never be jointly possible.
    ProblemFile p = gen_gridworld(3, 3, {1, 1}, {{0, 0}, {0, 1}, {1, 0}}, 0, 6);
    GoalSpec phi;
    phi.at_least_x = 2;
    SearchResult res = plan_search(p, phi);
    EXPECT_EQ(res.status, SearchStatus::Exhausted);
    EXPECT_EQ(res.delta_used, 0u);  // no delta produced a plan
}

TEST(PlanSearch, ReportsLimitWhenStarved) {
    ProblemFile p = gen_gridworld(7, 7, {3, 3}, {{1, 2}, {5, 4}, {3, 0}}, 1);
    GoalSpec phi;
    phi.at_least_x = 3;
    phi.at_most_c = 1;
    SearchConfig cfg;
    cfg.node_limit = 1;
    SearchResult res = plan_search(p, phi, cfg);
    EXPECT_EQ(res.status, SearchStatus::LimitReached);
}

TEST(PlanSearch, ValidatesDelta) {
    GoalSpec phi;
    SearchConfig cfg;
    cfg.delta_max = 0;
    EXPECT_THROW(plan_search(grid33(), phi, cfg), BoundsError);
}

TEST(Baseline, HeadsStraightForTheTrueGoal) {
    ProblemFile p = grid33();
    SearchResult res = baseline_gbfs(p);
    ASSERT_EQ(res.status, SearchStatus::Solved);
    EXPECT_EQ(res.plan.steps.size(), 2u);
    EXPECT_TRUE(
        satisfies(res.trace.states.back(), p.goals.true_goal()));
    // the baseline ignores observers but still reports what they learn
    BeliefTrace replay = run_trace(p.domain, p.sensors, res.plan);
    EXPECT_EQ(res.goals_x,
              possible_goals(replay.observer("X").beliefs.back(),
                             p.goals).size());
    EXPECT_EQ(res.goals_c,
              possible_goals(replay.observer("C").beliefs.back(),
                             p.goals).size());
}
