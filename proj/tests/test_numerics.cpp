#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "scalediff/parallel.hpp"
#include "scalediff/quadrature.hpp"
#include "scalediff/random.hpp"
#include "scalediff/stats.hpp"

using namespace scalediff;

TEST(Quadrature, Basic) {
    auto r = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi), 1e-13);
    auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-10, 1e-10, 4000});
    EXPECT_NEAR(s.value, 2.0, 1e-8);
    auto c = integrate_panels([](double x) { return std::complex<double>(std::cos(x), std::sin(x)); }, {0.0, 1.0, 3.0});
    EXPECT_NEAR(c.value.real(), std::sin(3.0), 1e-13);
    EXPECT_NEAR(c.value.imag(), 1.0 - std::cos(3.0), 1e-13);
}

TEST(Quadrature, BudgetExhaustion) {
    auto r = integrate([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0, {1e-15, 1e-15, 5});
    EXPECT_FALSE(r.converged);
    EXPECT_THROW(require_converged(r, "oscillatory"), NumericError);
}

TEST(Quadrature, GaussLegendre) {
    for (int n : {1, 4, 10, 17}) {
        const GaussRule g = gauss_legendre(n);
        double w = 0.0, m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            w += g.w[i];
            m2 += g.w[i] * g.x[i] * g.x[i];
        }
        EXPECT_NEAR(w, 2.0, 1e-14);
        if (n >= 2) {
            EXPECT_NEAR(m2, 2.0 / 3.0, 1e-14);
        }
    }
    const CompositeRule r = composite_rule({0.0, 0.5, 2.0}, 8);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * r.x[i] * r.x[i] * r.x[i];
    EXPECT_NEAR(s, 4.0, 1e-13);
}

TEST(Random, StreamsAreReproducibleAndDistinct) {
    RandomStream a(1, 0), b(1, 0), c(1, 1), d(2, 0);
    bool differ_c = false, differ_d = false;
    for (int i = 0; i < 16; ++i) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 1.0);
        differ_c = differ_c || x != c.uniform();
        differ_d = differ_d || x != d.uniform();
    }
    EXPECT_TRUE(differ_c);
    EXPECT_TRUE(differ_d);
}

TEST(Stats, MeanAndKs) {
    const MeanSE m = mean_se({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
    EXPECT_THROW(mean_se({}), std::domain_error);

    RandomStream rng(8, 0);
    std::vector<double> u(20000), v(20000);
    for (auto& x : u) x = rng.uniform();
    for (auto& x : v) x = rng.uniform();
    EXPECT_GT(ks_one_sample(u, [](double x) { return x; }).p_value, 1e-3);
    EXPECT_GT(ks_two_sample(u, v).p_value, 1e-3);
    std::vector<double> w(u);
    for (auto& x : w) x = x * x;
    EXPECT_LT(ks_two_sample(u, w).p_value, 1e-10);
    // Kolmogorov survival function at a tabulated point
    EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 2e-4);
}

TEST(Stats, Fits) {
    const LinearFit f = linear_fit({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
    EXPECT_DOUBLE_EQ(f.slope, 2.0);
    EXPECT_DOUBLE_EQ(f.intercept, 1.0);
    EXPECT_NEAR(loglog_slope({1.0, 10.0, 100.0}, {2.0, 0.2, 0.02}), -1.0, 1e-14);
    EXPECT_THROW(linear_fit({1.0}, {1.0}), std::invalid_argument);
}

TEST(Parallel, CoversEveryIndexOnce) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
}
