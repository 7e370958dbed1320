#include "filterstab/linprog.hpp"
#include "filterstab/observability.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace filterstab;
using filterstab::testing::canonical_model;
using filterstab::testing::frozen_model;
using filterstab::testing::random_kernel;

namespace {

PomdpModel with_channel(const Matrix& q) {
    ModelData d;
    d.num_states = q.rows();
    d.num_obs = q.cols();
    d.num_actions = 1;
    d.discount = 0.5;
    d.transition = {identity_matrix(q.rows())};
    d.observation = q;
    d.cost = Matrix(q.rows(), 1);
    return PomdpModel(d);
}

} // namespace

TEST(LinearProgram, SmallOptimum) {
    // min -x - y  s.t.  x + s1 = 2, y + s2 = 3  →  -5.
    StandardFormLp lp;
    lp.a = Matrix::from_rows({{1, 0, 1, 0}, {0, 1, 0, 1}});
    lp.b = {2, 3};
    lp.c = {-1, -1, 0, 0};
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.objective, -5.0, 1e-12);
    EXPECT_NEAR(s.x[0], 2.0, 1e-12);
    EXPECT_NEAR(s.x[1], 3.0, 1e-12);
}

TEST(LinearProgram, Infeasible) {
    StandardFormLp lp;
    lp.a = Matrix::from_rows({{1, 1}});
    lp.b = {-1};
    lp.c = {1, 1};
    EXPECT_EQ(solve_lp(lp).status, LpStatus::infeasible);
}

TEST(LinearProgram, Unbounded) {
    StandardFormLp lp;
    lp.a = Matrix::from_rows({{1, -1}});
    lp.b = {1};
    lp.c = {-1, 0};
    EXPECT_EQ(solve_lp(lp).status, LpStatus::unbounded);
}

TEST(Observability, PerfectChannel) {
    const auto r = observability_report(with_channel(identity_matrix(3)));
    EXPECT_EQ(r.rank_Q, 3u);
    EXPECT_TRUE(r.observable);
    EXPECT_LE(r.worst_residual, 1e-12);
}

TEST(Observability, UninformativeChannel) {
    const auto r = observability_report(frozen_model());
    EXPECT_EQ(r.rank_Q, 1u);
    EXPECT_FALSE(r.observable);
    EXPECT_GT(r.worst_residual, 1e-9);
}

TEST(Observability, CanonicalChannel) {
    const auto r = observability_report(canonical_model());
    EXPECT_EQ(r.rank_Q, 2u);
    EXPECT_TRUE(r.observable);
    EXPECT_LE(r.worst_residual, 1e-9);
}

TEST(ApproximateG, UninformativeChannelHandExample) {
    const std::vector<double> f{1.0, -1.0};
    const auto fit = approximate_g(frozen_model(), f, 1e-9);
    EXPECT_NEAR(fit.residual, 1.0, 1e-12);
    EXPECT_FALSE(fit.success);
}

TEST(ApproximateG, ConstantFunctionIsExact) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10; ++i) {
        const auto m = with_channel(random_kernel(rng, 3, 2 + i % 3, 0.3));
        const std::vector<double> f(3, 0.7);
        const auto fit = approximate_g(m, f, 1e-9);
        EXPECT_LE(fit.residual, 1e-12);
        // g need not be unique; Qg must reproduce f.
        const Matrix& q = m.observation();
        for (std::size_t x = 0; x < 3; ++x) {
            double qg = 0.0;
            for (std::size_t y = 0; y < q.cols(); ++y)
                qg += q(x, y) * fit.g[y];
            EXPECT_NEAR(qg, 0.7, 1e-9);
        }
    }
}

TEST(ApproximateG, FullRankSolvesExactly) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const auto m = with_channel(random_kernel(rng, 3, 3 + i % 2));
        std::vector<double> f(3);
        for (auto& v : f)
            v = unit(rng);
        const auto fit = approximate_g(m, f, 1e-9);
        EXPECT_TRUE(fit.success);
        EXPECT_LE(fit.residual, 1e-9);
    }
}

TEST(Observability, RankMatchesIndicatorResiduals) {
    std::mt19937_64 rng(10);
    for (int i = 0; i < 30; ++i) {
        Matrix q = random_kernel(rng, 3, 2 + i % 3);
        if (i % 3 == 0)
            for (std::size_t y = 0; y < q.cols(); ++y)
                q(2, y) = q(0, y); // duplicate row
        const auto r = observability_report(with_channel(q));
        EXPECT_EQ(r.observable, r.worst_residual <= 1e-9) << "channel " << i;
        EXPECT_LE(r.rank_Q, std::min<std::size_t>(3, q.cols()));
    }
}
