#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <map>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "flipchain/flip_chain.hpp"
#include "flipchain/initializer.hpp"
#include "flipchain/instances.hpp"

using namespace flipchain;

namespace {

using State = std::vector<DistrictIndex>;

State state_of(const Partition& p) { return {p.assignment().begin(), p.assignment().end()}; }

ChainConfig plain_config(std::uint64_t steps, std::uint64_t seed) {
    ChainConfig c;
    c.constraints = {Constraint::contiguity, Constraint::non_vanishing};
    c.acceptance = Acceptance::always;
    c.steps = steps;
    c.seed = seed;
    c.diagnostics_cadence = 0;
    return c;
}

double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i)
        stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

} // namespace

TEST(ProposeFlip, UniformOverTwoByTwoColumnPairs) {
    const auto g = fixture::grid(2, 2, {0, 1});
    const auto p = Partition::from_assignment(g, {0, 1, 0, 1});
    ASSERT_EQ(p.boundary_pairs().size(), 4u);
    std::map<std::pair<NodeIndex, DistrictIndex>, double> counts;
    Rng rng(2024);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const auto m = propose_flip(p, rng);
        EXPECT_EQ(m.donor, p.district_of(m.node));
        counts[{m.node, m.recipient}] += 1;
    }
    ASSERT_EQ(counts.size(), 4u);
    std::vector<double> observed, expected;
    for (const auto& [pair, n] : counts) {
        EXPECT_NEAR(n / draws, 0.25, 0.01);
        observed.push_back(n);
        expected.push_back(draws / 4.0);
    }
    EXPECT_GT(chi_square_p(observed, expected), 0.01);
}

TEST(ProposeFlip, TwoSingletons) {
    const auto g = fixture::grid(1, 2, {0, 1});
    const auto p = Partition::from_assignment(g, {0, 1});
    Rng rng(1);
    int first = 0;
    for (int i = 0; i < 20000; ++i) first += propose_flip(p, rng).node == 0;
    EXPECT_NEAR(first / 20000.0, 0.5, 0.02);
}

TEST(ProposeFlip, EmptyBoundary) {
    const auto g = fixture::grid(2, 2, {0});
    const auto p = Partition::from_assignment(g, {0, 0, 0, 0});
    Rng rng(0);
    EXPECT_THROW(propose_flip(p, rng), EmptyBoundaryError);
}

TEST(Presets, MatchModelTable) {
    using C = Constraint;
    const auto baa = model_preset(Model::baa);
    EXPECT_EQ(baa.constraints, (ConstraintSet{C::contiguity, C::non_vanishing, C::single_center, C::compactness, C::balance}));
    EXPECT_EQ(baa.acceptance, Acceptance::always);
    const auto bcaa = model_preset(Model::bcaa);
    EXPECT_EQ(bcaa.constraints,
              (ConstraintSet{C::contiguity, C::non_vanishing, C::single_center, C::compactness, C::dispersion}));
    EXPECT_EQ(bcaa.acceptance, Acceptance::always);
    const auto aio = model_preset(Model::aio);
    EXPECT_EQ(aio.constraints, (ConstraintSet{C::contiguity, C::non_vanishing, C::single_center, C::compactness}));
    EXPECT_EQ(aio.acceptance, Acceptance::accept_improving);
    EXPECT_EQ(parse_model("BCAA"), Model::bcaa);
    EXPECT_THROW(parse_model("MH"), std::invalid_argument);
}

TEST(Step, ContiguityRejectionLeavesStateUnchanged) {
    const auto g = fixture::grid(1, 4, {0, 3});
    const auto initial = Partition::from_assignment(g, {0, 1, 1, 1});
    FlipChain chain(initial, plain_config(100, 0));
    int rejected = 0;
    for (int i = 0; i < 200; ++i) {
        const auto before = chain.partition();
        const auto out = chain.step();
        if (!out.accepted()) {
            EXPECT_EQ(chain.partition(), before);
            ++rejected;
        }
    }
    EXPECT_GT(rejected, 0);
}

TEST(Step, CutVertexIsRejectedForContiguity) {
    // 3x3 grid; district 1 = {0, 1, 2, 5}. Node 1 borders district 0 (via 4)
    // and is the only link between 0 and {2, 5}.
    const auto g = fixture::grid(3, 3, {2, 3});
    const auto p = Partition::from_assignment(g, {1, 1, 1, 0, 0, 1, 0, 0, 0});
    const auto v = first_violation(p, {1, 1, 0}, ConstraintContext{}, ConstraintSet{Constraint::contiguity}, ScoreWeights());
    EXPECT_EQ(v, Constraint::contiguity);
    EXPECT_EQ(reject_reason(*v), RejectReason::contiguity);
}

TEST(Step, AioRejectsWorseningMoves) {
    const auto g = make_grid_instance(5, 5, 3, 4);
    auto config = model_preset(Model::aio);
    config.seed = 11;
    FlipChain chain(init_distance(g), config);
    bool saw_not_improving = false;
    double j = chain.current_dispersion();
    for (int i = 0; i < 2000 && !chain.frozen(); ++i) {
        const auto out = chain.step();
        if (out.accepted()) {
            EXPECT_LT(chain.current_dispersion(), j);
            j = chain.current_dispersion();
        } else if (out.rejection == RejectReason::not_improving) {
            saw_not_improving = true;
        }
    }
    EXPECT_TRUE(saw_not_improving);
}

TEST(RunChain, ZeroStepsReturnsInitial) {
    const auto g = make_grid_instance(4, 4, 2, 9);
    const auto initial = init_distance(g);
    auto config = model_preset(Model::baa);
    config.steps = 0;
    const auto r = run_chain(initial, config);
    EXPECT_EQ(r.best_plan, initial);
    EXPECT_EQ(r.final_plan, initial);
    EXPECT_EQ(r.accepted_count, 0u);
    EXPECT_EQ(r.proposed_count, 0u);
    EXPECT_NEAR(r.best_scores.dispersion, dispersion(initial, ScoreWeights()), 1e-12);
    ASSERT_TRUE(r.trace);
    EXPECT_EQ(r.trace->samples().size(), 1u);
}

TEST(RunChain, Deterministic) {
    const auto g = make_grid_instance(6, 6, 3, 5);
    auto config = model_preset(Model::bcaa);
    config.steps = 5000;
    config.seed = 77;
    config.diagnostics_cadence = 500;
    const auto a = run_chain(init_distance(g), config);
    const auto b = run_chain(init_distance(g), config);
    EXPECT_EQ(a.best_plan, b.best_plan);
    EXPECT_EQ(a.final_plan, b.final_plan);
    EXPECT_EQ(a.accepted_count, b.accepted_count);
    EXPECT_EQ(a.proposed_count, 5000u);
    EXPECT_EQ(*a.trace, *b.trace);
    EXPECT_EQ(a.seed, 77u);
}

TEST(RunChain, BaaKeepsImbalanceAtMostInitial) {
    const auto g = make_grid_instance(6, 6, 3, 21);
    auto config = model_preset(Model::baa);
    config.seed = 3;
    const auto initial = init_distance(g);
    const double imb0 = imbalance(initial);
    FlipChain chain(initial, config);
    std::vector<DistrictIndex> centers_district;
    for (auto c : g.centers()) centers_district.push_back(initial.district_of(c));
    int accepted = 0;
    for (int i = 0; i < 10000; ++i) {
        if (!chain.step().accepted()) continue;
        ++accepted;
        const auto& p = chain.partition();
        EXPECT_LE(imbalance(p), imb0);
        EXPECT_TRUE(oracle::valid_plan(g, state_of(p)));
        for (std::size_t d = 0; d < g.centers().size(); ++d) EXPECT_EQ(p.district_of(g.centers()[d]), centers_district[d]);
    }
    EXPECT_GT(accepted, 0);
}

TEST(RunChain, BcaaKeepsDispersionAtMostInitial) {
    const auto g = make_grid_instance(6, 6, 3, 22);
    auto config = model_preset(Model::bcaa);
    config.seed = 4;
    const auto initial = init_distance(g);
    const double j0 = dispersion(initial, ScoreWeights());
    FlipChain chain(initial, config);
    for (int i = 0; i < 10000; ++i) {
        if (!chain.step().accepted()) continue;
        EXPECT_LE(dispersion(chain.partition(), ScoreWeights()), j0);
        EXPECT_TRUE(plan_violations(chain.partition()).ok());
    }
}

TEST(RunChain, BestPlanIsMinimumOverBookkeptStates) {
    const auto g = make_grid_instance(5, 5, 2, 13);
    auto config = model_preset(Model::baa);
    config.seed = 8;
    config.steps = 3000;
    const auto initial = init_distance(g);
    FlipChain chain(initial, config);
    double prev = dispersion(initial, ScoreWeights());
    double best = prev;
    for (std::uint64_t i = 0; i < config.steps; ++i) {
        if (!chain.step().accepted()) continue;
        const double j = dispersion(chain.partition(), ScoreWeights());
        if (j <= prev) best = std::min(best, j);
        prev = j;
    }
    FlipChain replay(initial, config);
    const auto r = replay.run();
    EXPECT_NEAR(r.best_scores.dispersion, best, 1e-12);
    EXPECT_NEAR(dispersion(r.best_plan, ScoreWeights()), best, 1e-12);
}

TEST(RunChain, InvalidInitialPlan) {
    const auto g = fixture::grid(1, 4, {0, 3});
    auto config = model_preset(Model::baa);
    EXPECT_THROW(FlipChain(Partition::from_assignment(g, {0, 1, 0, 1}), config), InvalidInitialPlanError);
    EXPECT_THROW(FlipChain(Partition::from_assignment(g, {0, 0, 0, 0}), config), InvalidInitialPlanError);
}

TEST(StallGuard, FrozenChainFastForwards) {
    // AIO on a tiny instance reaches a local optimum quickly.
    const auto g = make_grid_instance(3, 3, 2, 1);
    auto config = model_preset(Model::aio);
    config.steps = 5000;
    config.max_consecutive_rejections = 200;
    config.diagnostics_cadence = 1000;
    const auto r = run_chain(init_distance(g), config);
    ASSERT_TRUE(r.frozen_at.has_value());
    EXPECT_EQ(r.proposed_count, 5000u);
    EXPECT_EQ(r.trace->samples().size(), 6u);
}

TEST(StallGuard, ThrowsWhenMovesRemainAdmissible) {
    const auto g = fixture::grid(3, 3, {0, 8});
    auto config = plain_config(10000, 2);
    config.max_consecutive_rejections = 1;
    FlipChain chain(Partition::from_assignment(g, fixture::column_bands(3, 3, 2)), config);
    EXPECT_THROW(
        {
            for (int i = 0; i < 10000; ++i) chain.step();
        },
        ChainStalledError);
}

TEST(Reversibility, DetailedBalanceOnTwoByThree) {
    const auto g = fixture::grid(2, 3, {0, 5});
    const auto states = oracle::contiguous_two_partitions(g);
    std::map<State, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = i;
    const auto n = states.size();
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pairs = oracle::boundary_pairs(g, states[i]);
        pi[i] = static_cast<double>(pairs.size());
        for (const auto& [u, j] : pairs) {
            auto next = states[i];
            next[u] = j;
            const auto it = index.find(next);
            // Inadmissible proposals stay put.
            P[i][it == index.end() ? i : it->second] += 1.0 / pi[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(P[i][k] * pi[i], P[k][i] * pi[k], 1e-12);
}

TEST(Stationary, FrequenciesTrackBoundaryPairCounts) {
    const auto g = fixture::grid(2, 3, {0, 5});
    const auto states = oracle::contiguous_two_partitions(g);
    std::map<State, double> expected;
    double total = 0.0;
    for (const auto& s : states) total += (expected[s] = static_cast<double>(oracle::boundary_pairs(g, s).size()));
    const std::uint64_t steps = 400000;
    FlipChain chain(Partition::from_assignment(g, states.front()), plain_config(steps, 99));
    std::map<State, double> seen;
    for (std::uint64_t i = 0; i < steps; ++i) {
        chain.step();
        seen[state_of(chain.partition())] += 1.0;
    }
    EXPECT_EQ(seen.size(), states.size());
    for (const auto& [s, w] : expected) EXPECT_NEAR(seen[s] / steps, w / total, 0.05 * w / total);
}

TEST(RunTrials, SeedsAndJobsIndependent) {
    const auto g = make_grid_instance(5, 5, 3, 6);
    auto config = model_preset(Model::baa);
    config.steps = 2000;
    config.seed = 100;
    auto make = [&](std::size_t) { return init_distance(g); };
    const auto serial = run_trials(make, config, 4, 1);
    const auto parallel = run_trials(make, config, 4, 4);
    ASSERT_EQ(serial.size(), 4u);
    for (std::size_t t = 0; t < 4; ++t) {
        EXPECT_EQ(serial[t].seed, 100 + t);
        EXPECT_EQ(serial[t].final_plan, parallel[t].final_plan);
        EXPECT_EQ(*serial[t].trace, *parallel[t].trace);
    }
    auto single = config;
    single.seed = 102;
    EXPECT_EQ(run_chain(init_distance(g), single).final_plan, serial[2].final_plan);
}
