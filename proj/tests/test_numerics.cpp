#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fadekit/numerics.hpp"

namespace fn = fadekit::numerics;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST(Integrate, ExponentialOnHalfLine) {
    const auto r = fn::integrate([](double x) { return std::exp(-x); }, 0.0, inf);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_GE(r.error, 0.0);
}

TEST(Integrate, InverseSquareRootEndpointSingularity) {
    const auto r = fn::integrate([](double x) { return std::exp(-x) / std::sqrt(x); }, 0.0, inf);
    EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi), 1e-9 * std::sqrt(std::numbers::pi));
}

TEST(Integrate, PolynomialIsExactOnOneSegment) {
    // The 15-point Kronrod rule integrates degree-22 polynomials exactly.
    const auto r = fn::integrate([](double x) { return std::pow(x, 20) + 3.0 * x; }, -1.0, 2.0);
    const double exact = (std::pow(2.0, 21) + 1.0) / 21.0 + 1.5 * (4.0 - 1.0);
    EXPECT_NEAR(r.value, exact, 1e-13 * exact);
}

TEST(Integrate, WholeLineGaussian) {
    const auto r = fn::integrate([](double x) { return std::exp(-0.5 * x * x); }, -inf, inf);
    EXPECT_NEAR(r.value, std::sqrt(2.0 * std::numbers::pi), 1e-10);
}

TEST(Integrate, LeftHalfLine) {
    const auto r = fn::integrate([](double x) { return std::exp(2.0 * x); }, -inf, 1.0);
    EXPECT_NEAR(r.value, 0.5 * std::exp(2.0), 1e-10);
}

TEST(Integrate, ReversedBoundsNegate) {
    auto f = [](double x) { return std::cos(x); };
    EXPECT_NEAR(fn::integrate(f, 1.0, 0.0).value, -std::sin(1.0), 1e-13);
}

TEST(Integrate, Linearity) {
    auto f = [](double x) { return std::exp(-x) * std::sin(3.0 * x); };
    auto g = [](double x) { return 1.0 / (1.0 + x * x); };
    const fn::QuadSpec spec;
    const double a = 2.5;
    const double b = -0.75;
    const double lhs = fn::integrate([&](double x) { return a * f(x) + b * g(x); }, 0.0, inf).value;
    const double rhs = a * fn::integrate(f, 0.0, inf).value + b * fn::integrate(g, 0.0, inf).value;
    EXPECT_NEAR(lhs, rhs, 10.0 * spec.rel_tol * std::abs(rhs));
}

TEST(Integrate, NonFiniteIntegrandThrows) {
    auto f = [](double x) { return x > 0.3 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
    EXPECT_THROW(fn::integrate(f, 0.0, 1.0), fadekit::NonFiniteError);
}

TEST(Integrate, SubdivisionBudgetExhaustedThrows) {
    fn::QuadSpec spec;
    spec.max_subdivisions = 1;
    auto f = [](double x) { return std::sin(200.0 * x) * std::sin(200.0 * x); };
    EXPECT_THROW(fn::integrate(f, 0.0, 3.0, spec), fadekit::ConvergenceError);
}

TEST(Integrate, InvalidSpecRejected) {
    fn::QuadSpec spec;
    spec.rel_tol = 0.0;
    EXPECT_THROW(fn::integrate([](double) { return 1.0; }, 0.0, 1.0, spec), fadekit::DomainError);
}

TEST(Integrate, BreakpointsAndLogScale) {
    const double pts[] = {0.0, 1.0, 5.0, inf};
    auto f = [](double x) { return x * x * std::exp(-x); };
    EXPECT_NEAR(fn::integrate_over(f, pts).value, 2.0, 1e-11);

    // Gamma(0.3) as an integral over t = ln x.
    const double pivots[] = {1.0};
    const auto r = fn::integrate_log_scale([](double x) { return std::pow(x, -0.7) * std::exp(-x); },
                                           0.0, inf, pivots);
    EXPECT_NEAR(r.value, std::tgamma(0.3), 1e-9 * std::tgamma(0.3));
}

TEST(CompensatedSum, RecoversSmallAddends) {
    fn::CompensatedSum s;
    s += 1.0;
    for (int i = 0; i < 1000; ++i) s += 1e-16;
    s += -1.0;
    EXPECT_NEAR(s.value(), 1e-13, 1e-20);
}

TEST(FixedPoint, ConstantMap) {
    const auto r = fn::fixed_point([](double) { return 0.5; }, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.value, 0.5);
}

TEST(FixedPoint, IdentityReturnsStart) {
    const auto r = fn::fixed_point([](double x) { return x; }, 0.37, 1e-12);
    EXPECT_DOUBLE_EQ(r.value, 0.37);
    EXPECT_EQ(r.iterations, 0);
}

TEST(FixedPoint, OscillatingMapIsDamped) {
    // Plain iteration of 1 - x cycles forever; damping reaches 1/2.
    const auto r = fn::fixed_point([](double x) { return 1.0 - x; }, 0.1, 1e-12);
    EXPECT_NEAR(r.value, 0.5, 1e-12);
}

TEST(FixedPoint, StaysInUnitIntervalForSelfMaps) {
    auto xi = [](double x) { return 0.5 * (1.0 + std::cos(3.0 * x)); };
    for (double x0 : {0.0, 0.25, 0.5, 1.0}) {
        const auto r = fn::fixed_point(xi, x0, 1e-12);
        EXPECT_GE(r.value, 0.0);
        EXPECT_LE(r.value, 1.0);
        EXPECT_LE(std::abs(xi(r.value) - r.value), 1e-12);
    }
}

TEST(FixedPoint, DampingRecoversAfterOvershoot) {
    // The first two full steps land where xi explodes and must be halved;
    // once inside the contraction region the step has to grow back to 1,
    // otherwise the 0.1-slope map needs about a hundred damped iterations.
    auto xi = [](double x) { return x < 0.1 ? 3.0 : x <= 1.0 ? 0.5 + 0.1 * (x - 0.5) : 10.0 * x; };
    const auto r = fn::fixed_point(xi, 0.0, 1e-12);
    EXPECT_NEAR(r.value, 0.5, 1e-11);
    EXPECT_LT(r.iterations, 25);
}

TEST(FixedPoint, NoFixedPointThrows) {
    EXPECT_THROW(fn::fixed_point([](double x) { return x + 0.1; }, 0.0, 1e-10),
                 fadekit::ConvergenceError);
}
