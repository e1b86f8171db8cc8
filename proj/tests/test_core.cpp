#include <gtest/gtest.h>

#include "copp/core.hpp"

using namespace copp;

namespace {

// two-step chain: a -> b -> c
PlanningDomain chain() {
    PlanningDomain d;
    FluentId a = d.add_fluent("a"), b = d.add_fluent("b"),
             c = d.add_fluent("c");
    Action s1{"step1", State{{a}}, State{{b}}, State{{a}}, 1.0};
    Action s2{"step2", State{{b}}, State{{c}}, State{{b}}, 2.5};
    d.add_action(s1);
    d.add_action(s2);
    State init;
    init.fluents = {a};
    d.set_initial(init);
    return d;
}

} // namespace

TEST(State, NormalizeSortsAndDeduplicates) {
    State s;
    s.fluents = {3, 1, 3, 0, 1};
    s.normalize();
    EXPECT_EQ(s.fluents, (std::vector<FluentId>{0, 1, 3}));
    EXPECT_TRUE(s.contains(3));
    EXPECT_FALSE(s.contains(2));
}

TEST(State, SubsetAndOrdering) {
    State small, big;
    small.fluents = {1, 4};
    big.fluents = {0, 1, 2, 4};
    EXPECT_TRUE(small.subset_of(big));
    EXPECT_FALSE(big.subset_of(small));
    EXPECT_TRUE(State{}.subset_of(small));
    EXPECT_LT((State{{0, 1}}), (State{{0, 2}}));
}

TEST(Domain, FluentRegistrationIsIdempotent) {
    PlanningDomain d;
    FluentId a1 = d.add_fluent("a");
    FluentId a2 = d.add_fluent("a");
    EXPECT_EQ(a1, a2);
    EXPECT_EQ(d.num_fluents(), 1u);
    EXPECT_EQ(d.fluent_name(a1), "a");
    EXPECT_THROW(d.fluent_id("missing"), DomainMismatchError);
}

TEST(Domain, RejectsMalformedActions) {
    PlanningDomain d;
    FluentId a = d.add_fluent("a"), b = d.add_fluent("b");
    d.add_action({"ok", State{{a}}, State{{b}}, State{{a}}, 1.0});
    // duplicate name
    EXPECT_THROW(d.add_action({"ok", State{}, State{}, State{}, 1.0}),
                 DomainMismatchError);
    // add and del overlap
    EXPECT_THROW(d.add_action({"clash", State{}, State{{b}}, State{{b}}, 1.0}),
                 DomainMismatchError);
    // negative cost
    EXPECT_THROW(d.add_action({"neg", State{}, State{{b}}, State{}, -1.0}),
                 DomainMismatchError);
    // fluent outside the universe
    EXPECT_THROW(d.add_action({"out", State{{99}}, State{}, State{}, 1.0}),
                 DomainMismatchError);
}

TEST(Apply, FollowsAddAndDeleteLists) {
    PlanningDomain d = chain();
    State s0 = d.initial;
    const Action &s1 = d.action(d.action_id("step1"));
    ASSERT_TRUE(applicable(d, s0, s1));
    State s = apply(d, s0, s1);
    EXPECT_EQ(s, State{{d.fluent_id("b")}});
    EXPECT_FALSE(applicable(d, s, s1));
    EXPECT_THROW(apply(d, s, s1), InapplicableActionError);
}

TEST(Simulate, ReportsFailingStepIndex) {
    PlanningDomain d = chain();
    Plan good{{d.action_id("step1"), d.action_id("step2")}};
    std::vector<State> traj = simulate(d, good);
    ASSERT_EQ(traj.size(), 3u);
    EXPECT_EQ(traj[2], State{{d.fluent_id("c")}});

    Plan bad{{d.action_id("step2")}};  // needs b, initial has only a
    try {
        simulate(d, bad);
        FAIL() << "expected InapplicableActionError";
    } catch (const InapplicableActionError &e) {
        EXPECT_EQ(e.step, 0u);
    }
}

TEST(Plan, CostSumsActionCosts) {
    PlanningDomain d = chain();
    Plan plan{{d.action_id("step1"), d.action_id("step2")}};
    EXPECT_DOUBLE_EQ(plan_cost(d, plan), 3.5);
}

TEST(Goals, TrueGoalAccessorAndSatisfaction) {
    PlanningDomain d = chain();
    CandidateGoalSet gs;
    gs.goals = {State{{d.fluent_id("b")}}, State{{d.fluent_id("c")}}};
    gs.true_goal_index = 1;
    EXPECT_EQ(gs.true_goal(), State{{d.fluent_id("c")}});

    State end;
    end.fluents = {d.fluent_id("a"), d.fluent_id("c")};
    EXPECT_TRUE(satisfies(end, gs.true_goal()));
    EXPECT_FALSE(satisfies(end, gs.goals[0]));
    EXPECT_TRUE(satisfies(end, State{}));  // empty goal holds everywhere
}
