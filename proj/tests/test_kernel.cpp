#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "scalediff/invariants.hpp"
#include "scalediff/stats.hpp"

using namespace scalediff;

TEST(Kernel, FrozenValues) {
    // mpmath, 30 digits
    struct Case {
        double nu, t, x, xp, value;
    };
    const Case cases[] = {
        {2.0, 1.0, 0.0, 0.0, 0.3280019486668764664},     {1.0, 0.5, 1.0, -1.0, 0.089141413115138143452},
        {2.0, 1.0, 0.7, 1.3, 0.26176752213383372334},    {2.0, 0.3, -0.9, 1.1, 0.10663715093090917783},
        {0.5, 2.0, 3.0, 2.5, 0.3218697241678164274},     {3.0, 1e-3, 2.0, 2.01, 23.93531019903443717},
        {1.0, 0.01, 2.0, 2.0, 5.6403511657196560552},
    };
    for (const auto& c : cases)
        EXPECT_NEAR(phi(NuParam(c.nu), c.t, c.x, c.xp) / c.value, 1.0, 1e-11) << c.nu << ' ' << c.t << ' ' << c.x << ' ' << c.xp;
    EXPECT_NEAR(phi(NuParam(2.0), 1.0, 0.0, 0.0), 1.0 / NuParam(2.0).n_nu, 1e-14);
}

TEST(Kernel, SmallTimeForm) {
    // |xx'|^{nu/4} (1 + sgn(xx')) / (2 sqrt(2 pi t)) exp(-(|x|^c - |x'|^c)^2 / (2 t c^2))
    const NuParam p(1.0);
    const double t = 0.01, x = 2.0, xp = 2.0;
    const double d = std::pow(x, p.c) - std::pow(xp, p.c);
    const double approx = std::pow(x * xp, p.nu / 4.0) * 2.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi * t)) *
                          std::exp(-d * d / (2.0 * t * p.c * p.c));
    EXPECT_NEAR(phi(p, t, x, xp) / approx, 1.0, 0.01);
}

TEST(Kernel, SymmetryAndRange) {
    for (double nu : {0.5, 2.0, 3.0}) {
        const NuParam p(nu);
        for (double t : {1e-6, 0.1, 1.0, 1e6}) {
            for (double x : {-1e3, -1.2, 0.0, 0.3, 5.0}) {
                for (double xp : {-0.4, 0.0, 2.0, 1e3}) {
                    const double a = phi(p, t, x, xp), b = phi(p, t, xp, x);
                    ASSERT_TRUE(std::isfinite(a));
                    EXPECT_GE(a, 0.0);
                    EXPECT_NEAR(a, b, 1e-13 * std::max(1.0, a));
                }
            }
        }
    }
    EXPECT_THROW(phi(NuParam(2.0), 0.0, 1.0, 1.0), std::domain_error);
}

TEST(Kernel, GaussianLimit) {
    const NuParam p(1e-8);
    EXPECT_LT(gaussian_gap(p, 1.0, 5.0, 41), 1e-6);
    EXPECT_LT(gaussian_gap(p, 0.1, 5.0, 41), 1e-6);
}

TEST(Kernel, MassAndSemigroup) {
    for (double nu : {0.5, 2.0}) {
        const NuParam p(nu);
        EXPECT_NEAR(kernel_mass(p, 1.0, 0.0), 1.0, 1e-10);
        EXPECT_NEAR(kernel_mass(p, 0.3, -1.2), 1.0, 1e-10);
        EXPECT_NEAR(chapman_kolmogorov_residual(p, 0.4, 0.7, 0.5, -0.8), 0.0, 1e-10);
    }
}

TEST(Kernel, SpectralRepresentation) {
    const NuParam p2(2.0), p1(1.0);
    EXPECT_NEAR(phi_spectral(p2, 1.0, 0.0, 0.0), phi(p2, 1.0, 0.0, 0.0), 1e-8);
    EXPECT_NEAR(phi_spectral(p1, 0.5, 1.0, -1.0), phi(p1, 0.5, 1.0, -1.0), 1e-8);
}

TEST(Kernel, ScaleInvariance) {
    const NuParam p(2.0);
    const auto pts = random_kernel_points(10, 7);
    EXPECT_LT(scale_invariance_residual(p, 10.0, pts), 1e-12);
}

TEST(KernelTable, Properties) {
    for (double nu : {0.5, 2.0}) {
        const NuParam p(nu);
        const KernelTable t = build_kernel_table(p, 1.0, 0.0);
        EXPECT_LE(t.cdf.front(), 1e-8);
        EXPECT_GE(t.cdf.back(), 1.0 - 1e-8);
        for (std::size_t i = 1; i < t.cdf.size(); ++i) ASSERT_GE(t.cdf[i], t.cdf[i - 1]);
        EXPECT_NEAR(t.raw_mass, 1.0, 1e-6);
        EXPECT_NEAR(table_cdf(t, 0.0), 0.5, 1e-9);
        EXPECT_NEAR(table_quantile(t, 0.5), 0.0, 1e-9);
        const double s = KernelTable::sigma(p, 1.0);
        EXPECT_LE(t.grid.front(), -8.0 * s + 1e-12);
        EXPECT_GE(t.grid.back(), 8.0 * s - 1e-12);
    }
    const KernelTable off = build_kernel_table(NuParam(2.0), 0.5, 1.4);
    const double so = KernelTable::sigma(NuParam(2.0), 0.5);
    EXPECT_LE(off.grid.front(), 1.4 - 8.0 * so + 1e-12);
    EXPECT_GE(off.grid.back(), 1.4 + 8.0 * so - 1e-12);
    EXPECT_NEAR(off.raw_mass, 1.0, 1e-6);
}

TEST(KernelTable, SamplingMatchesLaw) {
    const NuParam p(2.0);
    const KernelTable t = build_kernel_table(p, 1.0, 0.0);
    RandomStream a(5, 0), b(5, 0);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_from_table(t, a), sample_from_table(t, b));

    RandomStream rng(11, 0);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_from_table(t, rng);
    const MeanSE m = mean_se(xs);
    EXPECT_LT(std::fabs(m.mean), 3.0 * m.se);
    // s = 4|x|^{nu+2}/(nu+2)^2 ~ Gamma(delta/2, scale 2t), delta = 2/(nu+2)
    const double delta = 2.0 / (p.nu + 2.0);
    std::vector<double> s(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) s[i] = 4.0 * std::pow(std::fabs(xs[i]), p.nu + 2.0) / std::pow(p.nu + 2.0, 2);
    const MeanSE ms = mean_se(s);
    EXPECT_LT(std::fabs(ms.mean - delta), 3.0 * ms.se);
    std::vector<double> pos(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) pos[i] = xs[i] > 0.0 ? 1.0 : 0.0;
    const MeanSE mp = mean_se(pos);
    EXPECT_LT(std::fabs(mp.mean - 0.5), 3.0 * mp.se);
}
