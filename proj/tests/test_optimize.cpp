#include <cmath>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "superrad/optimize.hpp"

using namespace superrad;

TEST(NelderMead, MinimizesRosenbrockInsideBox) {
    const auto rosen = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    NelderMeadOptions opt;
    opt.budget = 2000;
    opt.f_tol = 1e-14;
    const auto r = nelder_mead(rosen, {-1.2, 1.0}, {-2.0, -2.0}, {2.0, 2.0}, opt);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-4);
    EXPECT_NEAR(r.x[1], 1.0, 1e-4);
    EXPECT_LE(r.evaluations, opt.budget);
}

TEST(NelderMead, ActiveBoundIsRespected) {
    const auto f = [](const std::vector<double>& x) { return (x[0] - 5.0) * (x[0] - 5.0); };
    const auto r = nelder_mead(f, {0.5}, {0.0}, {1.0});
    EXPECT_NEAR(r.x[0], 1.0, 1e-7);
}

TEST(NelderMead, BudgetIsHonoured) {
    int calls = 0;
    const auto f = [&](const std::vector<double>& x) {
        ++calls;
        return std::sin(10 * x[0]) + std::cos(7 * x[1]) + x[2] * x[2];
    };
    NelderMeadOptions opt;
    opt.budget = 37;
    const auto r = nelder_mead(f, {0.1, 0.2, 0.3}, {-1, -1, -1}, {1, 1, 1}, opt);
    EXPECT_EQ(calls, r.evaluations);
    EXPECT_LE(r.evaluations, 37);
}

TEST(NelderMead, RejectsBadInput) {
    const auto f = [](const std::vector<double>&) { return 0.0; };
    EXPECT_THROW(nelder_mead(f, {0.0}, {1.0}, {0.0}), DomainError);
    EXPECT_THROW(nelder_mead(f, {0.0, 0.0}, {0.0}, {1.0}), DomainError);
}

TEST(PrescribedStack, EndsAtTheNthCoherenceZero) {
    const double b_total = 2.0, gamma = 1e-3;
    const auto s = prescribed_stack(3, b_total, gamma);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_NEAR(s.total_b(), b_total, 1e-12);
    EXPECT_NEAR(coherence_step({b_total, gamma}, s.t_p), 0.0, 1e-9);
    EXPECT_NEAR(coherence_step({s.slice_b[0], gamma}, s.t_p), 0.0, 1e-9);
    EXPECT_NEAR(coherence_step({s.slice_b[0] + s.slice_b[1], gamma}, s.t_p), 0.0, 1e-9);
}

TEST(OptimizeStack, RecoversJ1ZeroRuleForOneSlice) {
    const auto r = optimize_stack(1, 1.0, 1e-4, 60);
    const double j = boost::math::cyl_bessel_j_zero(1.0, 1);
    EXPECT_NEAR(r.best_stack.t_p * r.best_stack.slice_b[0], 0.25 * j * j, 1e-2 * 3.6705);
    EXPECT_GE(r.best_metrics.peak_intensity_gain, r.baseline_gain);
    EXPECT_LE(r.evaluations, 60);
}

TEST(OptimizeStack, NeverWorseThanBaselineAndMonotoneInBudget) {
    const double b_total = 25.87 / 3.67;
    const auto small = optimize_stack(3, b_total, 0.01, 50);
    const auto large = optimize_stack(3, b_total, 0.01, 100);
    EXPECT_GE(small.best_metrics.peak_intensity_gain, small.baseline_gain);
    EXPECT_GE(large.best_metrics.peak_intensity_gain, small.best_metrics.peak_intensity_gain);
    EXPECT_NEAR(large.best_stack.total_b(), b_total, 1e-12);
    // the finite-gamma optimum stays close to the prescription
    EXPECT_NEAR(large.best_metrics.peak_intensity_gain, large.baseline_gain, 0.05);
}

TEST(OptimizeStack, Deterministic) {
    const auto a = optimize_stack(2, 3.0, 0.01, 60);
    const auto b = optimize_stack(2, 3.0, 0.01, 60);
    EXPECT_EQ(a.best_stack.slice_b, b.best_stack.slice_b);
    EXPECT_EQ(a.best_stack.t_p, b.best_stack.t_p);
    EXPECT_EQ(a.best_metrics.peak_intensity_gain, b.best_metrics.peak_intensity_gain);
}

TEST(OptimizeStack, ArgumentChecks) {
    EXPECT_THROW(optimize_stack(0, 1.0, 0.01, 100), DomainError);
    EXPECT_THROW(optimize_stack(9, 1.0, 0.01, 100), DomainError);
    EXPECT_THROW(optimize_stack(2, 1.0, 0.01, 10), DomainError);
}
