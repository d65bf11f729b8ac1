#include <gtest/gtest.h>

#include <cmath>

#include "wormsim/quadrature.hpp"

using wormsim::quadrature::integrate;

TEST(Quadrature, PolynomialsAreExactOnOnePanel) {
    // K15 integrates degree 22 exactly.
    const auto r = integrate([](double x) { return std::pow(x, 10) - 3.0 * x * x; }, -1.0, 2.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, (std::pow(2.0, 11) + 1.0) / 11.0 - (8.0 + 1.0), 1e-12);
    EXPECT_EQ(r.intervals, 1u);
}

TEST(Quadrature, ReversedBoundsFlipSign) {
    auto f = [](double x) { return std::exp(x); };
    EXPECT_NEAR(integrate(f, 1.0, 0.0).value, -(std::exp(1.0) - 1.0), 1e-14);
    EXPECT_EQ(integrate(f, 0.5, 0.5).value, 0.0);
}

TEST(Quadrature, AdaptsToPeakedIntegrand) {
    // Lorentzian of width 1e-4: integral over [-1, 1] is 2 atan(1e4).
    const double w = 1e-4;
    const auto r = integrate([w](double x) { return w / (x * x + w * w); }, -1.0, 1.0, {1e-12, 0.0, 4000});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0 * std::atan(1.0 / w), 1e-10);
    EXPECT_GT(r.intervals, 1u);
}

TEST(Quadrature, EndpointInverseSqrtConvergesSlowlyButCorrectly) {
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-8, 0.0, 4000});
    EXPECT_NEAR(r.value, 2.0, 1e-7);
}

TEST(Quadrature, ReportsNonConvergenceWhenBudgetTooSmall) {
    const auto r = integrate([](double x) { return std::sin(200.0 * x); }, 0.0, 10.0, {1e-14, 0.0, 2});
    EXPECT_FALSE(r.converged);
}
