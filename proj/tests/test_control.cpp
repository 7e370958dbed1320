#include "filterstab/bounds.hpp"
#include "filterstab/evaluation.hpp"
#include "filterstab/robustness.hpp"
#include "filterstab/value_iteration.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace filterstab;
using filterstab::testing::canonical_model;
using filterstab::testing::fixture;
using filterstab::testing::frozen_model;
using filterstab::testing::random_model;

namespace {

PomdpModel with_cost(const PomdpModel& m, const Matrix& cost) {
    ModelData d = m.data();
    d.cost = cost;
    return PomdpModel(d);
}

// Identity dynamics, perfect channel, cost 0 in state 0 and 1 in state 1.
PomdpModel frozen_observed_model() {
    ModelData d = frozen_model().data();
    d.observation = identity_matrix(2);
    return PomdpModel(d);
}

std::shared_ptr<const BeliefPolicy> solve(const PomdpModel& m, std::size_t k = 40) {
    return std::make_shared<const BeliefPolicy>(value_iteration_discounted(m, k));
}

} // namespace

TEST(ValueIteration, ZeroCost) {
    const auto m = with_cost(canonical_model(), Matrix(2, 2));
    const auto p = value_iteration_discounted(m, 10);
    for (double v : p.values())
        EXPECT_EQ(v, 0.0);
}

TEST(ValueIteration, StateIndependentCost) {
    const auto m = with_cost(canonical_model(), Matrix::from_rows({{0.7, 0.2}, {0.7, 0.2}}));
    const auto p = value_iteration_discounted(m, 20);
    for (std::size_t i = 0; i < p.grid().size(); ++i) {
        EXPECT_NEAR(p.value_at(i), 0.2 / (1.0 - 0.9), 1e-7);
        EXPECT_EQ(p.action_at(i), 1u);
    }
}

TEST(ValueIteration, ValuesWithinRange) {
    std::mt19937_64 rng(4);
    const auto m = random_model(rng, 3, 2, 2, 0.8);
    const auto p = value_iteration_discounted(m, 8);
    for (double v : p.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, m.cost_sup() / (1.0 - m.discount()) + 1e-9);
    }
    EXPECT_EQ(p.actions().size(), p.grid().size());
}

TEST(ValueIteration, ResidualContractsByDiscount) {
    const auto m = canonical_model();
    const auto p = value_iteration_discounted(m, 40);
    const auto& r = p.residuals();
    ASSERT_GT(r.size(), 10u);
    EXPECT_LT(r.back(), 1e-9);
    for (std::size_t i = 1; i < r.size(); ++i)
        EXPECT_LE(r[i], m.discount() * r[i - 1] + 1e-14);
}

TEST(ValueIteration, GridRefinementAgrees) {
    const auto m = canonical_model();
    const auto coarse = value_iteration_discounted(m, 40);
    const auto fine = value_iteration_discounted(m, 80);
    EXPECT_LE(grid_slack(coarse, fine), 0.05 * m.cost_sup() / (1.0 - m.discount()));
}

TEST(ValueIteration, NonConvergenceReported) {
    try {
        value_iteration_discounted(canonical_model(), 10, {1e-9, 5});
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.sweeps(), 5u);
        EXPECT_GT(e.residual(), 1e-9);
    }
}

TEST(ValueIteration, GuessesTheLikelyState) {
    const auto p = value_iteration_discounted(canonical_model(), 40);
    EXPECT_EQ(p.action_for(std::vector<double>{0.95, 0.05}), 0u);
    EXPECT_EQ(p.action_for(std::vector<double>{0.05, 0.95}), 1u);
}

TEST(EvaluateDiscounted, ConstantCost) {
    const auto m = with_cost(canonical_model(), Matrix(2, 2, 1.0));
    const Belief mu = Belief::uniform(2);
    const HistoryHashPolicy policy(2, 3);
    const double tol = default_truncation_tolerance(m);
    const auto exact = evaluate_cost_discounted(m, mu, policy, EnumerateCost{12});
    EXPECT_NEAR(exact.value + exact.truncation_bound, 10.0, 1e-12);
    const auto mc = evaluate_cost_discounted(m, mu, policy, MonteCarloCost{0, 200, 1});
    EXPECT_NEAR(mc.value, 10.0, tol + 1e-12);
    EXPECT_LE(mc.truncation_bound, tol);
}

TEST(EvaluateDiscounted, SingleStageWhenDiscountZero) {
    const auto m = canonical_model(0.0);
    const Belief mu = Belief::from_probabilities({0.6, 0.4});
    const HistoryHashPolicy policy(2, 5);
    auto c = policy.start();
    const ActionIndex u0 = c->clone()->act(0), u1 = c->clone()->act(1);
    double expected = 0.0;
    for (StateIndex x = 0; x < 2; ++x)
        expected += mu[x] * (m.observation()(x, 0) * m.cost()(x, u0) +
                             m.observation()(x, 1) * m.cost()(x, u1));
    const auto r = evaluate_cost_discounted(m, mu, policy, EnumerateCost{});
    EXPECT_EQ(r.horizon, 1u);
    EXPECT_EQ(r.truncation_bound, 0.0);
    EXPECT_NEAR(r.value, expected, 1e-15);
}

TEST(EvaluateDiscounted, MonteCarloMatchesEnumeration) {
    const auto m = canonical_model();
    const Belief mu = Belief::from_probabilities({0.7, 0.3});
    const Belief nu = Belief::from_probabilities({0.2, 0.8});
    const auto table = solve(m);
    const auto exact = evaluate_cost_discounted(m, mu, nu, table, EnumerateCost{14});
    const auto mc = evaluate_cost_discounted(m, mu, nu, table, MonteCarloCost{14, 100000, 7});
    EXPECT_LE(std::abs(exact.value - mc.value), 3.0 * mc.std_error);
}

TEST(EvaluateDiscounted, Guards) {
    const auto m = canonical_model();
    EXPECT_THROW(evaluate_cost_discounted(m, Belief::uniform(2), FixedActionPolicy(0),
                                          EnumerateCost{40}),
                 EnumerationLimitError);
    EXPECT_THROW(evaluate_cost_discounted(m, Belief::uniform(2), Belief::point_mass(2, 0), solve(m),
                                          EnumerateCost{4}),
                 AbsoluteContinuityError);
}

TEST(DiscountedHorizon, TruncationTolerance) {
    const auto m = canonical_model();
    const double tol = default_truncation_tolerance(m);
    const std::size_t h = discounted_horizon(m, tol);
    EXPECT_LE(truncation_bound(m, h), tol);
    EXPECT_GT(truncation_bound(m, h - 1), tol);
}

TEST(EvaluateAverage, ConstantCostIsExact) {
    const auto m = with_cost(canonical_model(), Matrix(2, 2, 1.0));
    const auto r = evaluate_cost_average(m, Belief::uniform(2), HistoryHashPolicy(2, 1), 100, 300, 2);
    EXPECT_EQ(r.value, 1.0);
    EXPECT_EQ(r.convergence_gap, 0.0);
}

TEST(EvaluateAverage, UniformMixingForgetsThePrior) {
    const auto m = load_model(fixture("uniform_mixing.json"));
    const auto table = solve(m.with_discount(0.99));
    const Belief mu = Belief::from_probabilities({0.95, 0.05});
    const Belief nu = Belief::from_probabilities({0.05, 0.95});
    const BeliefFeedbackPolicy policy(m, table, nu);
    const auto a = evaluate_cost_average(m, mu, policy, 2000, 10000, 3);
    const auto b = evaluate_cost_average(m, nu, policy, 2000, 10000, 3);
    EXPECT_LE(std::abs(a.value - b.value), 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST(EvaluateAverage, HorizonSelfConsistency) {
    const auto m = canonical_model();
    const auto table = solve(m.with_discount(0.999));
    const Belief mu = Belief::from_probabilities({0.6, 0.4});
    const BeliefFeedbackPolicy policy(m, table, mu);
    const auto a = evaluate_cost_average(m, mu, policy, 2000, 2000, 1);
    const auto b = evaluate_cost_average(m, mu, policy, 4000, 2000, 2);
    EXPECT_LE(std::abs(a.value - b.value), 0.01 * m.cost_sup());
}

TEST(Bounds, Continuity) {
    const auto m = canonical_model();
    const Belief mu = Belief::from_probabilities({0.7, 0.3});
    const Belief nu = Belief::from_probabilities({0.4, 0.6});
    EXPECT_EQ(bound_continuity_discounted(m, mu, mu), 0.0);
    EXPECT_NEAR(bound_continuity_discounted(m, mu, nu), 12.0, 1e-12);
    EXPECT_NEAR(bound_continuity_discounted(m, Belief::point_mass(2, 0), Belief::point_mass(2, 1)),
                40.0, 1e-12);
    EXPECT_EQ(bound_continuity_average(m, mu, mu), 0.0);
    EXPECT_NEAR(bound_continuity_average(m, Belief::point_mass(2, 0), Belief::point_mass(2, 1)),
                4.0, 1e-15);
    const auto m3 = with_cost(m, Matrix::from_rows({{3.0, 0.0}, {0.0, 1.0}}));
    const Belief p = Belief::from_probabilities({0.5, 0.5});
    const Belief q = Belief::from_probabilities({0.75, 0.25});
    EXPECT_NEAR(bound_continuity_average(m3, p, q), 3.0, 1e-15);
}

TEST(SpanSeminorm, StateIndependentCostIsZero) {
    const auto m = with_cost(canonical_model(), Matrix::from_rows({{0.3, 0.5}, {0.3, 0.5}}));
    const auto table = value_iteration_discounted(m, 20);
    const auto priors = table.grid().points();
    EXPECT_NEAR(span_seminorm(m, table, Criterion::discounted, priors), 0.0, 1e-8);
}

TEST(SpanSeminorm, FrozenPointMasses) {
    const auto m = frozen_observed_model();
    const auto table = value_iteration_discounted(m, 10);
    const std::vector<Belief> priors{Belief::point_mass(2, 0), Belief::point_mass(2, 1)};
    EXPECT_NEAR(span_seminorm(m, table, Criterion::discounted, priors), 10.0, 1e-7);
}

TEST(SpanSeminorm, MonotoneInGridRefinement) {
    const auto m = canonical_model();
    const auto table = value_iteration_discounted(m, 40);
    const auto coarse = BeliefGrid(2, 40).points();
    const auto fine = BeliefGrid(2, 80).points();
    EXPECT_LE(span_seminorm(m, table, Criterion::discounted, coarse),
              span_seminorm(m, table, Criterion::discounted, fine) + 1e-12);
}

TEST(PriorIndependent, CanonicalClosedForm) {
    const auto r = bound_prior_independent(0.85, 0.9, 1.0, 0.0);
    EXPECT_TRUE(r.closed_form);
    EXPECT_NEAR(r.rho, 1.0, 1e-15);
    EXPECT_NEAR(r.n_star, 14.272, 1e-3);
    const double f14 = prior_independent_objective(0.85, 0.9, 1.0, 14);
    const double f15 = prior_independent_objective(0.85, 0.9, 1.0, 15);
    EXPECT_NEAR(r.bound, 10.0 * (1.0 - std::max(f14, f15)), 1e-12);
    double best = -1e300;
    for (int n = 0; n <= 200; ++n)
        best = std::max(best, prior_independent_objective(0.85, 0.9, 1.0, n));
    EXPECT_EQ(r.f_max, best);
}

TEST(PriorIndependent, DegenerateRhoFallsBackToSearch) {
    const auto r = bound_prior_independent(0.85, 0.9, 1.0, 1.0 / (1.0 - 0.9));
    EXPECT_FALSE(r.closed_form);
    EXPECT_TRUE(std::isnan(r.n_star));
    EXPECT_EQ(r.rho, 0.0);
    EXPECT_LE(r.f_max, 0.0);
    EXPECT_GE(r.bound, r.trivial);
    EXPECT_LE(r.bound, r.trivial + 4.0 * r.trivial * std::pow(0.85 * 0.9, r.n));
    EXPECT_TRUE(r.clamped);
    EXPECT_EQ(r.effective, r.trivial);
}

TEST(PriorIndependent, RangeAndDomain) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double alpha = 0.99 * unit(rng), beta = 0.01 + 0.98 * unit(rng);
        const double c = 0.1 + unit(rng);
        const double span = unit(rng) * c / (1 - beta);
        const auto r = bound_prior_independent(alpha, beta, c, span);
        EXPECT_GE(r.bound, 0.0);
        EXPECT_LE(r.bound, 5.0 * c / (1.0 - beta));
    }
    EXPECT_THROW(bound_prior_independent(1.0, 0.9, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(bound_prior_independent(0.5, 1.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(bound_prior_independent(0.5, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(PriorIndependent, AlphaZeroUsesSearch) {
    const auto r = bound_prior_independent(0.0, 0.9, 1.0, 0.0);
    EXPECT_FALSE(r.closed_form);
    EXPECT_EQ(r.n, 1u);
    EXPECT_NEAR(r.f_max, 0.9, 1e-15);
}

TEST(Robustness, EqualPriorsGiveZeroGap) {
    const auto m = canonical_model();
    const Belief mu = Belief::from_probabilities({0.6, 0.4});
    RobustnessSettings s;
    s.samples = 2000;
    s.decomposition_max = 6;
    const auto r = robustness_gap(m, mu, mu, s);
    EXPECT_EQ(r.measured_gap.value, 0.0);
    EXPECT_EQ(r.measured_gap.std_error, 0.0);
    EXPECT_EQ(r.continuity_bound, 0.0);
    for (const auto& d : r.decomposition) {
        EXPECT_EQ(d.transient.value, 0.0);
        EXPECT_EQ(d.strategic.value, 0.0);
        EXPECT_EQ(d.approximation.value + d.transient.value + d.strategic.value, d.total.value);
    }
}

TEST(Robustness, CanonicalFixtureRespectsBounds) {
    const auto m = canonical_model();
    const Belief mu = Belief::from_probabilities({0.9, 0.1});
    const Belief nu = Belief::from_probabilities({0.15, 0.85});
    RobustnessSettings s;
    s.samples = 20000;
    const auto r = robustness_gap(m, mu, nu, s);
    const double se = r.measured_gap.std_error;
    EXPECT_GE(r.measured_gap.value, -(2.0 * se + r.grid_slack));
    ASSERT_TRUE(r.prior_independent.has_value());
    const double bound = std::min(r.continuity_bound, r.prior_independent->bound);
    EXPECT_LE(r.measured_gap.value, bound + 3.0 * se);
    EXPECT_GE(r.prior_independent->bound, 0.0);
    EXPECT_GE(r.span_estimate, 0.0);
}

TEST(Robustness, DecompositionBaseCaseAndIdentity) {
    const auto m = canonical_model();
    const Belief mu = Belief::from_probabilities({0.9, 0.1});
    const Belief nu = Belief::from_probabilities({0.2, 0.8});
    RobustnessSettings s;
    s.samples = 20000;
    s.decomposition_max = 10;
    const auto r = robustness_gap(m, mu, nu, s);
    const auto& d0 = r.decomposition.at(0);
    EXPECT_EQ(d0.transient.value, 0.0);
    EXPECT_EQ(d0.strategic.value, 0.0);
    EXPECT_LE(std::abs(d0.approximation.value - r.measured_gap.value),
              3.0 * d0.residual.std_error + r.grid_slack);
    for (const auto& d : r.decomposition)
        EXPECT_LE(std::abs(d.residual.value), 3.0 * d.residual.std_error + r.grid_slack)
            << "n=" << d.n;
}

TEST(Robustness, AverageCriterionHasNoDecomposition) {
    const auto m = load_model(fixture("uniform_mixing.json"));
    RobustnessSettings s;
    s.criterion = Criterion::average;
    s.samples = 1000;
    s.horizon = 200;
    s.average_discount = 0.99;
    const auto r = robustness_gap(m, Belief::from_probabilities({0.9, 0.1}),
                                  Belief::from_probabilities({0.1, 0.9}), s);
    EXPECT_TRUE(r.decomposition.empty());
    EXPECT_FALSE(r.prior_independent.has_value());
    EXPECT_NEAR(r.continuity_bound, 2.0 * 1.6, 1e-12);
}

TEST(Criterion, Parse) {
    EXPECT_EQ(parse_criterion("average"), Criterion::average);
    EXPECT_EQ(to_string(Criterion::discounted), "discounted");
    EXPECT_THROW(parse_criterion("mean"), ParseError);
}
