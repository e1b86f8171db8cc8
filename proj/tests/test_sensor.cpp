#include <gtest/gtest.h>

#include "copp/generators.hpp"
#include "copp/sensor.hpp"

#include "oracles.hpp"

using namespace copp;

namespace {

// 3x3 grid, start centre, goals at the three free corners' stand-ins
ProblemFile grid33() {
    return gen_gridworld(3, 3, {1, 1}, {{0, 0}, {0, 2}, {2, 0}}, 0, 6);
}

State cell(const ProblemFile &p, int r, int c) {
    return State{{p.domain.fluent_id("at_" + std::to_string(r) + "_" +
                                     std::to_string(c))}};
}

} // namespace

TEST(SensorModel, FirstMatchingRuleWins) {
    PlanningDomain d;
    FluentId f = d.add_fluent("f");
    FluentId g = d.add_fluent("g");
    ActionId a = d.add_action({"go", State{}, State{{f}}, State{}, 1.0});
    d.set_initial(State{});

    SensorModel m;
    m.observer_id = "X";
    m.rules.push_back({{a}, State{{g}}, "special"});
    m.rules.push_back({{a}, State{}, "plain"});
    m.catchall = "none";

    EXPECT_EQ(m.model_symbol(a, State{{f}}), "plain");
    EXPECT_EQ(m.model_symbol(a, State{{f, g}}), "special");
}

TEST(SensorModel, CatchallAndIncompleteness) {
    PlanningDomain d;
    FluentId f = d.add_fluent("f");
    ActionId a = d.add_action({"go", State{}, State{{f}}, State{}, 1.0});
    ActionId b = d.add_action({"other", State{}, State{}, State{{f}}, 1.0});
    d.set_initial(State{});

    SensorModel m;
    m.observer_id = "X";
    m.rules.push_back({{a}, State{}, "go-sym"});
    m.catchall = "rest";
    EXPECT_EQ(m.model_symbol(b, State{}), "rest");

    m.catchall.clear();
    EXPECT_THROW(m.model_symbol(b, State{}), IncompleteSensorError);
}

TEST(SensorModel, EmissionOverridesOnlyAffectEmission) {
    PlanningDomain d;
    FluentId f = d.add_fluent("f");
    ActionId a = d.add_action({"go", State{}, State{{f}}, State{}, 1.0});
    d.set_initial(State{});

    SensorModel m;
    m.observer_id = "X";
    m.rules.push_back({{a}, State{}, "honest"});
    m.catchall = "none";
    m.emission_overrides.push_back({{a}, State{}, "spoofed"});

    EXPECT_EQ(m.model_symbol(a, State{{f}}), "honest");
    EXPECT_EQ(m.emitted_symbol(a, State{{f}}), "spoofed");
    EXPECT_TRUE(m.has_overrides());
}

TEST(BeliefUpdate, GridStepMatchesHandComputation) {
    ProblemFile p = grid33();
    const SensorModel &x = p.sensor("X");
    Belief b0;
    b0.states = {p.domain.initial};

    // "vertical" from the centre: up or down
    Belief b1 = belief_update(p.domain, x, b0, "vertical");
    ASSERT_EQ(b1.size(), 2u);
    EXPECT_TRUE(b1.contains(cell(p, 0, 1)));
    EXPECT_TRUE(b1.contains(cell(p, 2, 1)));

    // then "horizontal": the four corners
    Belief b2 = belief_update(p.domain, x, b1, "horizontal");
    ASSERT_EQ(b2.size(), 4u);
    for (auto [r, c] : {std::pair{0, 0}, {0, 2}, {2, 0}, {2, 2}})
        EXPECT_TRUE(b2.contains(cell(p, r, c)));

    // a symbol nothing can produce empties the belief and stays legal
    Belief b3 = belief_update(p.domain, x, b2, "warp");
    EXPECT_TRUE(b3.empty());
    EXPECT_EQ(b3.time, b2.time + 1);
}

TEST(RunTrace, TwoStepGridTraceMatchesHandComputation) {
    ProblemFile p = grid33();
    Plan plan{{p.domain.action_id("up_1_1"), p.domain.action_id("left_0_1")}};
    BeliefTrace tr = run_trace(p.domain, p.sensors, plan);

    ASSERT_EQ(tr.horizon(), 2u);
    EXPECT_EQ(tr.states[2], cell(p, 0, 0));

    const ObserverTrace &x = tr.observer("X");
    EXPECT_EQ(x.observations, (std::vector<ObservationSymbol>{
                                  "vertical", "horizontal"}));
    EXPECT_EQ(x.beliefs[2].size(), 4u);

    const ObserverTrace &c = tr.observer("C");
    EXPECT_EQ(c.observations, (std::vector<ObservationSymbol>{
                                  "north-east", "south-west"}));
    // {(0,0), (1,1), (2,2)}: one NE step then one SW step
    ASSERT_EQ(c.beliefs[2].size(), 3u);
    EXPECT_TRUE(c.beliefs[2].contains(cell(p, 0, 0)));
    EXPECT_TRUE(c.beliefs[2].contains(cell(p, 1, 1)));
    EXPECT_TRUE(c.beliefs[2].contains(cell(p, 2, 2)));

    // goal sets: all three corners stay open for X, only g1 for C
    EXPECT_EQ(possible_goals(x.beliefs[2], p.goals),
              (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(possible_goals(c.beliefs[2], p.goals),
              (std::vector<std::size_t>{0}));
}

TEST(RunTrace, PaddingSlotsFreezeEverything) {
    ProblemFile p = grid33();
    std::vector<std::optional<ActionId>> steps{
        p.domain.action_id("up_1_1"), std::nullopt,
        p.domain.action_id("left_0_1")};
    BeliefTrace tr = run_trace_steps(p.domain, p.sensors, steps);

    EXPECT_EQ(tr.states[1], tr.states[2]);
    const ObserverTrace &x = tr.observer("X");
    EXPECT_EQ(x.observations[1], "");
    EXPECT_EQ(x.beliefs[1].states, x.beliefs[2].states);

    // final beliefs identical to the unpadded plan's
    Plan plan{{p.domain.action_id("up_1_1"), p.domain.action_id("left_0_1")}};
    BeliefTrace plain = run_trace(p.domain, p.sensors, plan);
    EXPECT_EQ(x.beliefs[3].states,
              plain.observer("X").beliefs[2].states);
}

TEST(RunTrace, AgreesWithReferenceOnRandomInputs) {
    std::mt19937 rng(7);
    ProblemFile p = grid33();
    for (int round = 0; round < 25; ++round) {
        std::vector<SensorModel> sensors{
            oracle::random_sensor(p.domain, rng, "X"),
            oracle::random_sensor(p.domain, rng, "C")};
        Plan plan = oracle::random_plan(p.domain, rng, 8);
        std::vector<std::optional<ActionId>> steps;
        for (ActionId a : plan.steps)
            steps.emplace_back(a);
        if (round % 3 == 0 && !steps.empty())
            steps.insert(steps.begin() + static_cast<long>(steps.size() / 2),
                         std::nullopt);

        BeliefTrace got = run_trace_steps(p.domain, sensors, steps);
        oracle::RefTrace want = oracle::ref_run(p.domain, sensors, steps);
        ASSERT_EQ(got.states.size(), want.states.size());
        for (std::size_t t = 0; t < got.states.size(); ++t)
            EXPECT_EQ(oracle::to_set(got.states[t]), want.states[t]);
        for (std::size_t i = 0; i < sensors.size(); ++i)
            for (std::size_t t = 0; t < got.states.size(); ++t) {
                std::set<oracle::FluentSet> have;
                for (const State &s : got.observers[i].beliefs[t].states)
                    have.insert(oracle::to_set(s));
                EXPECT_EQ(have, want.beliefs[i][t])
                    << "round " << round << " observer " << i << " t " << t;
            }
    }
}

TEST(FormatTrace, LineOrientedExport) {
    ProblemFile p = grid33();
    Plan plan{{p.domain.action_id("up_1_1")}};
    BeliefTrace tr = run_trace(p.domain, p.sensors, plan);
    std::string text = format_trace(tr, p.goals);
    EXPECT_EQ(text,
              "0 X - 1 -\n"
              "0 C - 1 -\n"
              "1 X vertical 2 -\n"
              "1 C north-east 2 -\n");
}

TEST(ValidateSensor, RejectsBrokenModels) {
    ProblemFile p = grid33();
    SensorModel ok = p.sensor("X");
    EXPECT_NO_THROW(validate_sensor(p.domain, ok));

    SensorModel no_catchall = ok;
    no_catchall.catchall.clear();
    EXPECT_THROW(validate_sensor(p.domain, no_catchall), Error);

    SensorModel contradictory = ok;
    SensorRule dup = contradictory.rules[0];
    dup.emit = "different";
    contradictory.rules.push_back(dup);
    EXPECT_THROW(validate_sensor(p.domain, contradictory), Error);
}
