#include <gtest/gtest.h>

#include <cmath>

#include "scalediff/invariants.hpp"
#include "scalediff/transform.hpp"

using namespace scalediff;

TEST(Gcf, EstimateEdgeCases) {
    const NuParam p(2.0);
    const std::vector<double> xs{-1.0, 0.3, 2.5, 0.0};
    const CFEstimate a = gcf_estimate(p, xs, 0.0);
    EXPECT_EQ(a.mean, ComplexValue(1.0, 0.0));
    EXPECT_EQ(a.se_re, 0.0);
    EXPECT_EQ(a.se_im, 0.0);
    const CFEstimate b = gcf_estimate(p, std::vector<double>(10, 0.0), 1.7);
    EXPECT_EQ(b.mean, ComplexValue(1.0, 0.0));
    EXPECT_THROW(gcf_estimate(p, {}, 1.0), std::domain_error);
}

TEST(Gcf, Target) {
    const NuParam p2(2.0), p1(1.0);
    EXPECT_EQ(gcf_target(p2, 3.3, 0.0, 0.0), ComplexValue(1.0, 0.0));
    EXPECT_NEAR(gcf_target(p2, 1.0, 1.0, 0.0).real(), 0.6065306597126334, 1e-15);
    const ComplexValue e12{-0.88342788324531431197, 1.5053382281109545553};
    const ComplexValue t = gcf_target(p1, 2.0, 0.25, 1.0);
    EXPECT_NEAR(t.real(), std::exp(-1.0) * e12.real(), 1e-12);
    EXPECT_NEAR(t.imag(), std::exp(-1.0) * e12.imag(), 1e-12);
    EXPECT_THROW(gcf_target(p1, 1.0, -1.0, 0.0), std::domain_error);
}

TEST(Transform, HeatKernelAtOrigin) {
    const NuParam p(2.0);
    const double t = 1.0;
    TestFunction g;
    g.hi = std::pow(p.c * std::sqrt(80.0 * t), 1.0 / p.c);
    g.lo = -g.hi;
    g.f = [&](double x) { return phi(p, t, 0.0, x); };
    for (double q : {0.0, 0.5, 1.0, 1.6}) {
        const ComplexValue v = forward_transform_at(p, g, q);
        EXPECT_NEAR(v.real(), std::exp(-0.5 * t * std::pow(q, p.nu + 2.0)), 1e-9) << q;
        EXPECT_NEAR(v.imag(), 0.0, 1e-12) << q;
    }
}

TEST(Transform, EvenFunctionHasRealTransform) {
    const NuParam p(1.0);
    const TestFunction g = smooth_bump(0.0, 0.5, 0.4);
    for (const auto& v : forward_transform(p, g, {0.3, 2.0, 7.0})) EXPECT_NEAR(v.imag(), 0.0, 1e-12);
    EXPECT_GT(weighted_l1_norm(p, g), 0.0);
}

TEST(Transform, RoundTripAndPlancherel) {
    const NuParam p(2.0);
    const TestFunction g = bessel_bump(p, 0.05, 0.8, 0.1, 0.4, 0.8, 0.5);
    const double q_max = spectral_cutoff(p, g, 1e-8);
    const CompositeRule rule = spectral_rule(p, q_max, g.hi, 10);
    const auto gt = forward_transform(p, g, rule.x);
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double x = g.lo + (g.hi - g.lo) * i / 40.0;
        worst = std::max(worst, std::fabs(inverse_transform_at(p, rule, gt, x) - g.f(x)));
    }
    EXPECT_LT(worst, 1e-6);
    const PlancherelReport r = plancherel_residual(p, g, g, rule);
    EXPECT_LT(r.residual, 1e-6);
}

TEST(Transform, OrthogonalBumps) {
    const NuParam p(1.0);
    const TestFunction g = smooth_bump(0.0, 0.3, 0.2), h = smooth_bump(1.2, 0.2, 0.2);
    const double q_max = spectral_cutoff(p, g, 1e-9);
    const PlancherelReport r = plancherel_residual(p, g, h, spectral_rule(p, q_max, 1.6, 10));
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_LT(r.residual, 1e-6);
}

TEST(Transform, ClassicalParsevalLimit) {
    const NuParam p(1e-6);
    EXPECT_NEAR(4.0 * p.u_nu * p.u_nu, 2.0 * std::numbers::pi, 1e-5);
    const TestFunction g = smooth_bump(0.2, 0.3, 0.3);
    const double q_max = spectral_cutoff(p, g, 1e-9);
    EXPECT_LT(plancherel_residual(p, g, g, spectral_rule(p, q_max, 0.8, 10)).residual, 1e-6);
}

TEST(Transform, RiemannLebesgueTail) {
    const NuParam p(2.0);
    const TailProfile t = riemann_lebesgue_profile(p, c2_bump(0.1, 0.1, 0.7), 1.0, 100.0);
    ASSERT_FALSE(t.block_max.empty());
    EXPECT_TRUE(t.decreasing);
    EXPECT_LT(t.magnitude.back(), t.magnitude.front());
}

TEST(Transform, BadInputs) {
    const NuParam p(2.0);
    EXPECT_THROW(bessel_bump(p, 0.5, 0.2, 0.1, 0.2, 0.3, 0.1), std::invalid_argument);
    EXPECT_THROW(riemann_lebesgue_profile(p, smooth_bump(0, 1, 1), 2.0, 1.0), std::invalid_argument);
}
