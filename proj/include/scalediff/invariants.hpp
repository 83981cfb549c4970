#pragma once

// Analytic identities checked numerically: eigenfunction equation, kernel
// mass and semigroup property, spectral representation, scaling, and the
// nu -> 0 Gaussian limit.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "scalediff/eigen.hpp"
#include "scalediff/kernel.hpp"
#include "scalediff/quadrature.hpp"

namespace scalediff {

// (L e_q)(x) by 5-point differences applied to e(qx) - 1, with
// L u = (a u'' + a' u') / 2, a = |x|^{-nu}. The series/asymptotic switch is
// held fixed across the stencil.
inline ComplexValue generator_fd(const NuParam& p, double q, double x, double h) {
    if (!(h > 0.0) || !(std::fabs(x) > 2.0 * h)) throw std::domain_error("generator_fd: need |x| > 2h > 0");
    const double za = std::pow(std::fabs(q) * (std::fabs(x) - 2.0 * h), p.c) / p.c;
    const double zb = std::pow(std::fabs(q) * (std::fabs(x) + 2.0 * h), p.c) / p.c;
    SpecFunAccuracy acc;
    if (za <= acc.series_switch && zb > acc.series_switch) acc.series_switch = zb + 1.0;
    ComplexValue u[5];
    for (int k = 0; k < 5; ++k) u[k] = e_nu_minus_one(p, q * (x + (k - 2) * h), acc);
    const ComplexValue d1 = (u[0] - 8.0 * u[1] + 8.0 * u[3] - u[4]) / (12.0 * h);
    const ComplexValue d2 = (-u[0] + 16.0 * u[1] - 30.0 * u[2] + 16.0 * u[3] - u[4]) / (12.0 * h * h);
    const double ax = std::fabs(x);
    const double a = std::pow(ax, -p.nu);
    const double ap = -p.nu * std::pow(ax, -p.nu - 1.0) * (x > 0.0 ? 1.0 : -1.0);
    return 0.5 * (a * d2 + ap * d1);
}

// |L e_q + lambda e_q| with lambda = |q|^{nu+2} / 2.
inline double eigen_residual(const NuParam& p, double q, double x, double h) {
    const double lambda = 0.5 * std::pow(std::fabs(q), p.nu + 2.0);
    return std::abs(generator_fd(p, q, x, h) + lambda * e_q(p, q, x));
}

struct EigenCheck {
    std::vector<double> h;
    std::vector<double> max_residual;  // over the (q, x) grid, per h
    std::vector<double> max_relative;  // residual / (lambda |e_q|)
    std::vector<double> order;         // log(r_i / r_{i+1}) / log(h_i / h_{i+1})
};

inline EigenCheck eigen_check(const NuParam& p, const std::vector<double>& qs, const std::vector<double>& xs,
                              const std::vector<double>& hs) {
    EigenCheck c;
    c.h = hs;
    for (double h : hs) {
        double m = 0.0, mr = 0.0;
        for (double q : qs) {
            const double lambda = 0.5 * std::pow(std::fabs(q), p.nu + 2.0);
            for (double x : xs) {
                const double r = eigen_residual(p, q, x, h);
                m = std::max(m, r);
                mr = std::max(mr, r / (lambda * std::abs(e_q(p, q, x))));
            }
        }
        c.max_residual.push_back(m);
        c.max_relative.push_back(mr);
    }
    for (std::size_t i = 0; i + 1 < hs.size(); ++i)
        c.order.push_back(std::log(c.max_residual[i] / c.max_residual[i + 1]) / std::log(hs[i] / hs[i + 1]));
    return c;
}

// |x| = lo (hi/lo)^{i/(n-1)}, both signs.
inline std::vector<double> symmetric_log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        const double v = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        g.push_back(-v);
        g.push_back(v);
    }
    std::sort(g.begin(), g.end());
    return g;
}

namespace detail {

// Beyond this radius phi_t(x, .) is below e^{-40} of its peak scale.
inline double kernel_radius(const NuParam& p, double t, double x) {
    return std::pow(std::pow(std::fabs(x), p.c) + p.c * std::sqrt(80.0 * t), 1.0 / p.c);
}

}  // namespace detail

inline double kernel_mass(const NuParam& p, double t, double x, QuadratureSpec spec = {1e-12, 1e-12, 4000}) {
    const double R = detail::kernel_radius(p, t, x);
    std::vector<double> b{-R, 0.0, R};
    if (x != 0.0) b.push_back(x);
    std::sort(b.begin(), b.end());
    auto r = integrate_panels([&](double y) { return phi(p, t, x, y); }, b, spec);
    require_converged(r, "kernel_mass");
    return r.value;
}

// int phi_s(x, y) phi_t(y, x') dy - phi_{s+t}(x, x')
inline double chapman_kolmogorov_residual(const NuParam& p, double s, double t, double x, double xp,
                                          QuadratureSpec spec = {1e-12, 1e-12, 4000}) {
    const double R = std::max(detail::kernel_radius(p, s, x), detail::kernel_radius(p, t, xp));
    std::vector<double> b{-R, 0.0, R};
    if (x != 0.0) b.push_back(x);
    if (xp != 0.0 && xp != x) b.push_back(xp);
    std::sort(b.begin(), b.end());
    auto r = integrate_panels([&](double y) { return phi(p, s, x, y) * phi(p, t, y, xp); }, b, spec);
    require_converged(r, "chapman_kolmogorov_residual");
    return r.value - phi(p, s + t, x, xp);
}

struct KernelPoint {
    double t, x, xp;
};

// Uniform draws t in [t_lo, t_hi], x, x' in [-x_max, x_max].
inline std::vector<KernelPoint> random_kernel_points(std::size_t n, std::uint64_t seed, double t_lo = 0.2,
                                                     double t_hi = 2.0, double x_max = 2.0) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> ut(t_lo, t_hi), ux(-x_max, x_max);
    std::vector<KernelPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = ut(g), x = ux(g), xp = ux(g);
        pts.push_back({t, x, xp});
    }
    return pts;
}

// max |phi_spectral - phi| over the points.
inline double spectral_gap(const NuParam& p, const std::vector<KernelPoint>& pts) {
    double m = 0.0;
    for (const auto& k : pts) m = std::max(m, std::fabs(phi_spectral(p, k.t, k.x, k.xp) - phi(p, k.t, k.x, k.xp)));
    return m;
}

// max relative gap between l phi(N t, l x, l x') and phi(t, x, x'), l = N^{1/(nu+2)}.
inline double scale_invariance_residual(const NuParam& p, double N, const std::vector<KernelPoint>& pts) {
    const double l = std::pow(N, p.char_exp);
    double m = 0.0;
    for (const auto& k : pts) {
        const double a = phi(p, k.t, k.x, k.xp);
        const double b = l * phi(p, N * k.t, l * k.x, l * k.xp);
        m = std::max(m, std::fabs(b - a) / a);
    }
    return m;
}

inline double gaussian_kernel(double t, double x, double xp) {
    const double d = x - xp;
    return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

// sup |phi - Gaussian| over an n x n grid on [-x_max, x_max]^2.
inline double gaussian_gap(const NuParam& p, double t, double x_max = 5.0, int n = 101) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -x_max + 2.0 * x_max * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double xp = -x_max + 2.0 * x_max * j / (n - 1);
            m = std::max(m, std::fabs(phi(p, t, x, xp) - gaussian_kernel(t, x, xp)));
        }
    }
    return m;
}

}  // namespace scalediff
