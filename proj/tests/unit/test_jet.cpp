#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "beampinn/jet.hpp"

using beampinn::Jet;

namespace {

std::vector<double> coeffs(const Jet& j) { return {j.coeffs().begin(), j.coeffs().end()}; }

void expect_coeffs(const Jet& j, std::vector<double> want, double tol = 1e-15) {
    ASSERT_EQ(j.order() + 1, static_cast<int>(want.size()));
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(j[static_cast<int>(k)], want[k], tol) << "k=" << k;
}

Jet jet(std::vector<double> c) { return Jet::from_coeffs(c); }

}  // namespace

TEST(JetConstant, ZeroHigherCoefficients) {
    EXPECT_EQ(coeffs(Jet::constant(3.0, 2)), (std::vector<double>{3.0, 0.0, 0.0}));
    EXPECT_EQ(coeffs(Jet::constant(0.0, 4)), (std::vector<double>{0, 0, 0, 0, 0}));
    EXPECT_EQ(coeffs(Jet::constant(-1.5, 0)), (std::vector<double>{-1.5}));
}

TEST(JetConstant, RejectsUnsupportedOrders) {
    EXPECT_THROW(Jet::constant(1.0, 3), std::invalid_argument);
    EXPECT_THROW(Jet::constant(1.0, 5), std::invalid_argument);
    EXPECT_THROW(Jet::constant(1.0, -1), std::invalid_argument);
}

TEST(JetSeed, IdentityExpansion) {
    EXPECT_EQ(coeffs(Jet::seed(0.5, 4)), (std::vector<double>{0.5, 1, 0, 0, 0}));
    EXPECT_EQ(coeffs(Jet::seed(0.0, 2)), (std::vector<double>{0.0, 1, 0}));
    EXPECT_EQ(coeffs(Jet::seed(10.0, 1)), (std::vector<double>{10.0, 1}));
    EXPECT_THROW(Jet::seed(1.0, 0), std::invalid_argument);
}

TEST(JetArith, CauchyProductAndSums) {
    expect_coeffs(jet({1, 1, 0, 0, 0}) * jet({2, 0, 1, 0, 0}), {2, 2, 1, 1, 0}, 0.0);
    expect_coeffs(jet({1, 1, 0}) + jet({0, 0, 1}), {1, 1, 1}, 0.0);
    expect_coeffs(jet({1, 1, 0, 0, 0}) * jet({1, 1, 0, 0, 0}), {1, 2, 1, 0, 0}, 0.0);
    expect_coeffs(jet({1, 2, 3}) - jet({1, 1, 1}), {0, 1, 2}, 0.0);
    expect_coeffs(2.5 * jet({1, -2, 4}), {2.5, -5, 10}, 0.0);
    expect_coeffs(-jet({1, -2}), {-1, 2}, 0.0);
}

TEST(JetArith, OrderMismatchThrows) {
    EXPECT_THROW(jet({1, 1}) + jet({1, 1, 0}), std::invalid_argument);
    EXPECT_THROW(jet({1, 1}) * jet({1, 1, 0, 0, 0}), std::invalid_argument);
    EXPECT_THROW(jet({1, 1, 0, 0}), std::invalid_argument);  // order 3
}

TEST(JetUnary, MaclaurinSeries) {
    expect_coeffs(tanh(Jet::seed(0.0, 4)), {0, 1, 0, -1.0 / 3.0, 0});
    expect_coeffs(sin(Jet::seed(std::numbers::pi / 2, 4)), {1, 0, -0.5, 0, 1.0 / 24.0});
    expect_coeffs(cos(Jet::seed(0.0, 4)), {1, 0, -0.5, 0, 1.0 / 24.0});
    expect_coeffs(sin(Jet::seed(0.0, 4)), {0, 1, 0, -1.0 / 6.0, 0});
}

TEST(JetUnary, TanhMatchesCentralDifferences) {
    // d/du tanh(u) at u = 0 with step 1e-3; tanh'''(0) = -2.
    const double h = 1e-3;
    auto f = [](double u) { return std::tanh(u); };
    const double d1 = (f(h) - f(-h)) / (2 * h);
    const double d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h);
    const Jet j = tanh(Jet::seed(0.0, 4));
    EXPECT_NEAR(j.derivative(1), d1, 1e-6);
    EXPECT_NEAR(j.derivative(3), d3, 1e-4);
}

TEST(JetUnary, SeriesHelpersAreConsistent) {
    const Jet a = jet({0.3, -0.7, 0.2, 0.05, -0.1});
    const auto t = beampinn::tanh_series(a);
    const Jet one = Jet::constant(1.0, 4);
    const Jet slope = one - t.value * t.value;
    for (int k = 0; k <= 4; ++k) EXPECT_NEAR(t.slope[k], slope[k], 1e-15);
    const auto sc = beampinn::sin_cos_series(a);
    const Jet pyth = sc.sin * sc.sin + sc.cos * sc.cos;
    expect_coeffs(pyth, {1, 0, 0, 0, 0}, 1e-15);
}

TEST(JetUnary, CompositionMatchesFiniteDifferences) {
    // f(u) = sin(u) * tanh(2u) + cos(u^2), all derivatives up to 4 at a random point.
    auto f = [](long double u) { return std::sin(u) * std::tanh(2 * u) + std::cos(u * u); };
    const double u0 = 0.37;
    const Jet u = Jet::seed(u0, 4);
    const Jet j = sin(u) * tanh(2.0 * u) + cos(u * u);
    const long double h = 1e-2L;
    auto st = [&](long double hh) {
        return (f(u0 + 2 * hh) - 4 * f(u0 + hh) + 6 * f(u0) - 4 * f(u0 - hh) + f(u0 - 2 * hh)) / (hh * hh * hh * hh);
    };
    const long double r0 = (4 * st(h / 2) - st(h)) / 3;
    const long double r1 = (4 * st(h / 4) - st(h / 2)) / 3;
    const double d4 = static_cast<double>((16 * r1 - r0) / 15);
    EXPECT_NEAR(j.derivative(4), d4, 1e-6 * std::max(1.0, std::fabs(d4)));
    const double d1 = static_cast<double>((f(u0 + 1e-5L) - f(u0 - 1e-5L)) / 2e-5L);
    EXPECT_NEAR(j.derivative(1), d1, 1e-8);
}

TEST(JetUnary, LowerOrdersArePrefixes) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int i = 0; i < 50; ++i) {
        const double u0 = d(rng);
        const Jet j4 = tanh(sin(Jet::seed(u0, 4)) * 1.7);
        const Jet j2 = tanh(sin(Jet::seed(u0, 2)) * 1.7);
        const Jet j1 = tanh(sin(Jet::seed(u0, 1)) * 1.7);
        for (int k = 0; k <= 2; ++k) EXPECT_EQ(j4[k], j2[k]);
        for (int k = 0; k <= 1; ++k) EXPECT_EQ(j4[k], j1[k]);
    }
}

TEST(JetDerivative, FactorialScaling) {
    const Jet j = jet({1, 2, 3, 4, 5});
    EXPECT_EQ(j.derivative(0), 1.0);
    EXPECT_EQ(j.derivative(2), 6.0);
    EXPECT_EQ(j.derivative(4), 120.0);
    EXPECT_THROW((void)jet({1, 2}).derivative(2), std::out_of_range);
}

TEST(SinPi, ExactZerosAndValues) {
    for (int n = -20; n <= 20; ++n) EXPECT_EQ(beampinn::sin_pi(static_cast<double>(n)), 0.0);
    for (int n = -20; n <= 20; ++n) EXPECT_EQ(beampinn::cos_pi(n + 0.5), 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-7, 7);
    for (int i = 0; i < 1000; ++i) {
        const double u = d(rng);
        EXPECT_NEAR(beampinn::sin_pi(u), std::sin(std::numbers::pi * u), 1e-14);
        EXPECT_NEAR(beampinn::cos_pi(u), std::cos(std::numbers::pi * u), 1e-14);
    }
}
