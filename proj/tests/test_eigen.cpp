#include <gtest/gtest.h>

#include <cmath>

#include "scalediff/invariants.hpp"

using namespace scalediff;

namespace {

void expect_complex_near(ComplexValue a, ComplexValue b, double tol) {
    EXPECT_NEAR(a.real(), b.real(), tol);
    EXPECT_NEAR(a.imag(), b.imag(), tol);
}

}  // namespace

TEST(NuParam, Constants) {
    // mpmath, 30 digits
    const double u[] = {1.2878993168540690872, 1.2818466760204237865, 1.2668246481154910764};
    const double n[] = {2.9485533819551185086, 3.048762374932151685, 3.0432280768428900288};
    for (int k = 0; k < 3; ++k) {
        const NuParam p(k + 1.0);
        EXPECT_NEAR(p.u_nu / u[k], 1.0, 1e-12);
        EXPECT_NEAR(p.n_nu / n[k], 1.0, 1e-12);
        EXPECT_GT(p.beta, 0.5);
        EXPECT_LT(p.beta, 1.0);
        EXPECT_GT(p.char_exp, 0.0);
        EXPECT_LT(p.char_exp, 0.5);
    }
    EXPECT_THROW(NuParam(0.0), std::domain_error);
    EXPECT_THROW(NuParam(-1.0), std::domain_error);
    EXPECT_THROW(NuParam(std::nan("")), std::domain_error);
}

TEST(Eigenfunction, FrozenValues) {
    expect_complex_near(e_nu(NuParam(2.0), 1.0), {0.75619240703588265372, 0.47570037710899577311}, 1e-12);
    expect_complex_near(e_nu(NuParam(3.0), -1.4), {0.017679711985980235565, -1.2760331531116214022}, 1e-12);
    expect_complex_near(e_nu(NuParam(1.0), 2.0), {-0.88342788324531431197, 1.5053382281109545553}, 1e-12);
}

TEST(Eigenfunction, Identities) {
    const NuParam p2(2.0), p1(1.0), p3(3.0);
    expect_complex_near(e_nu(p2, 0.0), {1.0, 0.0}, 0.0);
    for (double x : {-3.0, 0.4, 7.0}) expect_complex_near(e_q(p2, 0.0, x), {1.0, 0.0}, 0.0);
    expect_complex_near(e_q(p1, 2.0, 0.5), e_nu(p1, 1.0), 1e-15);
    expect_complex_near(e_q(p2, -1.0, 1.0), std::conj(e_q(p2, 1.0, 1.0)), 1e-15);
    expect_complex_near(f_q(p2, 0.3, 0.0), {1.0, 0.0}, 0.0);
    expect_complex_near(f_q(p2, 1.0, 1.0), e_q(p2, 1.0, 1.0), 1e-15);
    // |-16|^{1/(nu+1)} = 2 at nu = 3
    expect_complex_near(f_q(p3, 0.7, -16.0), e_q(p3, 0.7, -2.0), 1e-14);
    expect_complex_near(f_q(p3, 0.7, -16.0), {0.017679711985980235565, -1.2760331531116214022}, 1e-12);
}

TEST(Eigenfunction, SmallNuIsExponential) {
    const NuParam p(1e-8);
    for (double x : {-5.0, -1.0, 0.3, 2.0, 9.0}) {
        const ComplexValue e = e_nu(p, x);
        EXPECT_NEAR(e.real(), std::cos(x), 1e-6) << x;
        EXPECT_NEAR(e.imag(), std::sin(x), 1e-6) << x;
    }
}

TEST(Eigenfunction, MinusOneMatchesAwayFromZero) {
    for (double nu : {0.5, 2.0}) {
        const NuParam p(nu);
        for (double x : {-4.0, -0.7, 0.05, 1.3, 6.0}) expect_complex_near(e_nu_minus_one(p, x), e_nu(p, x) - 1.0, 1e-13);
        // Re(e - 1) = -|x|^{nu+2}/(nu+2) + O(|x|^{2nu+4}), kept to full relative precision
        const double x = 1e-4;
        EXPECT_NEAR(e_nu_minus_one(p, x).real() / (-std::pow(x, nu + 2.0) / (nu + 2.0)), 1.0, 1e-10) << nu;
    }
}

TEST(Eigenfunction, SeriesAsymptoticContinuity) {
    SpecFunAccuracy series;
    series.series_switch = 100.0;
    for (double nu : {0.5, 1.0, 2.0, 3.0}) {
        const NuParam p(nu);
        for (double z : {15.5, 20.0}) {
            const double x = std::pow(p.c * z, 1.0 / p.c);
            const ComplexValue a = e_nu(p, x, series), b = e_nu(p, x);
            EXPECT_LT(std::abs(a - b), 1e-11 * std::abs(b)) << nu << ' ' << z;
        }
    }
}

TEST(Eigenfunction, GeneratorEquation) {
    for (double nu : {0.5, 1.0, 2.0, 3.0}) {
        const NuParam p(nu);
        const EigenCheck c = eigen_check(p, {-1.5, 0.5, 2.0}, {-2.0, -0.3, 0.6, 1.7}, {1e-2, 5e-3, 1e-4});
        EXPECT_LT(c.max_residual.back(), 1e-6) << nu;
        EXPECT_GT(c.order.front(), 2.0) << nu;
    }
    EXPECT_THROW(generator_fd(NuParam(2.0), 1.0, 0.001, 0.01), std::domain_error);
}
