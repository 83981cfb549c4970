#pragma once

// Generalized characteristic functions and the transform pair
//   g~(q) = int conj(e(qx)) g(x) dx,     g(x) = (1/4u^2) int e(qx) g~(q) dq.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "scalediff/eigen.hpp"
#include "scalediff/errors.hpp"
#include "scalediff/parallel.hpp"
#include "scalediff/quadrature.hpp"

namespace scalediff {

struct CFEstimate {
    double q = 0.0;
    ComplexValue mean{};
    double se_re = 0.0;
    double se_im = 0.0;
    std::size_t n = 0;
};

inline CFEstimate gcf_estimate(const NuParam& p, const std::vector<double>& samples, double q) {
    if (samples.empty()) throw std::domain_error("gcf_estimate: empty sample");
    CFEstimate r;
    r.q = q;
    r.n = samples.size();
    const double n = static_cast<double>(r.n);
    double sr = 0, si = 0, srr = 0, sii = 0;
    for (double x : samples) {
        const ComplexValue v = e_nu(p, q * x);
        sr += v.real();
        si += v.imag();
        srr += v.real() * v.real();
        sii += v.imag() * v.imag();
    }
    r.mean = {sr / n, si / n};
    if (r.n > 1) {
        r.se_re = std::sqrt(std::max(0.0, srr / n - r.mean.real() * r.mean.real()) / (n - 1.0));
        r.se_im = std::sqrt(std::max(0.0, sii / n - r.mean.imag() * r.mean.imag()) / (n - 1.0));
    }
    return r;
}

inline ComplexValue gcf_target(const NuParam& p, double q, double t, double x0) {
    if (!(t >= 0.0)) throw std::domain_error("gcf_target: t must be >= 0");
    return std::exp(-0.5 * t * std::pow(std::fabs(q), p.nu + 2.0)) * e_nu(p, q * x0);
}

// A real test function with compact support [lo, hi]; `breaks` lists points
// where it is not smooth.
struct TestFunction {
    std::function<double(double)> f;
    double lo = -1.0;
    double hi = 1.0;
    std::vector<double> breaks;
};

namespace detail {

// Points where the phase |q x|^c / c crosses multiples of pi, inside (a, b),
// plus the series/asymptotic switch of e_nu (a ~1e-12 jump).
inline void phase_breaks(const NuParam& p, double q, double a, double b, std::vector<double>& out) {
    if (q == 0.0) return;
    const double aq = std::fabs(q);
    const double xs = std::pow(p.c * SpecFunAccuracy{}.series_switch, 1.0 / p.c) / aq;
    for (double x : {xs, -xs})
        if (x > a && x < b) out.push_back(x);
    const double xm = std::max(std::fabs(a), std::fabs(b));
    const long kmax = static_cast<long>(std::pow(aq * xm, p.c) / p.c / std::numbers::pi);
    for (long k = 1; k <= kmax; ++k) {
        const double x = std::pow(p.c * k * std::numbers::pi, 1.0 / p.c) / aq;
        if (x > a && x < b) out.push_back(x);
        if (-x > a && -x < b) out.push_back(-x);
    }
}

inline std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace detail

inline ComplexValue forward_transform_at(const NuParam& p, const TestFunction& g, double q,
                                         const QuadratureSpec& spec = {1e-15, 1e-11, 4000, true}) {
    std::vector<double> br{g.lo, g.hi};
    if (g.lo < 0.0 && g.hi > 0.0) br.push_back(0.0);
    for (double b : g.breaks)
        if (b > g.lo && b < g.hi) br.push_back(b);
    detail::phase_breaks(p, q, g.lo, g.hi, br);
    br = detail::sorted_unique(std::move(br));
    auto integrand = [&](double x) { return std::conj(e_nu(p, q * x)) * g.f(x); };
    auto r = integrate_panels(integrand, br, spec);
    require_converged(r, "forward_transform");
    return r.value;
}

inline std::vector<ComplexValue> forward_transform(const NuParam& p, const TestFunction& g,
                                                   const std::vector<double>& q_grid, unsigned workers = 1,
                                                   const QuadratureSpec& spec = {1e-15, 1e-11, 4000, true}) {
    std::vector<ComplexValue> out(q_grid.size());
    parallel_for(q_grid.size(), workers, [&](std::size_t i) { out[i] = forward_transform_at(p, g, q_grid[i], spec); }, 1);
    return out;
}

// Numerical check that g is in L^1(dm), dm = (1 + |x|^{nu/4}) dx; returns the weighted norm.
inline double weighted_l1_norm(const NuParam& p, const TestFunction& g) {
    std::vector<double> br{g.lo, g.hi};
    if (g.lo < 0.0 && g.hi > 0.0) br.push_back(0.0);
    for (double b : g.breaks)
        if (b > g.lo && b < g.hi) br.push_back(b);
    br = detail::sorted_unique(std::move(br));
    auto r = integrate_panels([&](double x) { return std::fabs(g.f(x)) * (1.0 + std::pow(std::fabs(x), 0.25 * p.nu)); },
                              br, {1e-12, 1e-10, 4000});
    if (!std::isfinite(r.value)) throw NumericError("test function is not in L1(dm)");
    return r.value;
}

// Quadrature rule on [0, q_max] for q-integrals against e(qx) with |x| <= x_extent:
// graded panels near 0, then panels at phase increments of pi.
inline CompositeRule spectral_rule(const NuParam& p, double q_max, double x_extent, int order = 16) {
    std::vector<double> br{0.0, q_max};
    const double q1 = std::pow(p.c * std::numbers::pi, 1.0 / p.c) / x_extent;
    for (int k = 0; k < 24; ++k) {
        const double q = std::min(q1, q_max) * std::pow(0.5, k);
        br.push_back(q);
    }
    detail::phase_breaks(p, x_extent, 0.0, q_max, br);
    br = detail::sorted_unique(std::move(br));
    return composite_rule(br, order);
}

// Smallest q on a geometric grid beyond which |g~| stays below tol |g~(0)|
// for three consecutive grid points.
inline double spectral_cutoff(const NuParam& p, const TestFunction& g, double tol = 1e-11, double q_start = 1.0,
                              double q_limit = 1e3) {
    const double g0 = std::abs(forward_transform_at(p, g, 0.0));
    if (!(g0 > 0.0)) throw NumericError("spectral_cutoff: g~(0) vanishes");
    int below = 0;
    for (double q = q_start; q <= q_limit; q *= 1.15) {
        below = std::abs(forward_transform_at(p, g, q)) <= tol * g0 ? below + 1 : 0;
        if (below == 3) return q;
    }
    throw NumericError("spectral_cutoff: |g~| has not decayed by q_limit");
}

// g(x) = (1/4u^2) 2 Re int_0^qmax e(qx) g~(q) dq for real g.
inline double inverse_transform_at(const NuParam& p, const CompositeRule& rule, const std::vector<ComplexValue>& gt,
                                   double x) {
    double s = 0.0;
    for (std::size_t j = 0; j < rule.x.size(); ++j) s += rule.w[j] * std::real(e_nu(p, rule.x[j] * x) * gt[j]);
    return 2.0 * s / (4.0 * p.u_nu * p.u_nu);
}

struct PlancherelReport {
    double lhs = 0.0;  // int g h dx
    double rhs = 0.0;  // (1/4u^2) int conj(g~) h~ dq
    double norm = 0.0;  // ||g|| ||h||
    double residual = 0.0;
};

// |int g h - (1/4u^2) int conj(g~) h~| / (||g|| ||h||) for real g, h.
inline PlancherelReport plancherel_residual(const NuParam& p, const TestFunction& g, const TestFunction& h,
                                            const CompositeRule& rule, unsigned workers = 1) {
    auto l2 = [&](const TestFunction& a, const TestFunction& b) {
        std::vector<double> br{std::min(a.lo, b.lo), std::max(a.hi, b.hi), 0.0};
        for (double v : a.breaks) br.push_back(v);
        for (double v : b.breaks) br.push_back(v);
        for (double v : {a.lo, a.hi, b.lo, b.hi}) br.push_back(v);
        br = detail::sorted_unique(std::move(br));
        auto r = integrate_panels(
            [&](double x) {
                const double fa = (x >= a.lo && x <= a.hi) ? a.f(x) : 0.0;
                const double fb = (x >= b.lo && x <= b.hi) ? b.f(x) : 0.0;
                return fa * fb;
            },
            br, {1e-14, 1e-13, 4000});
        require_converged(r, "plancherel inner product");
        return r.value;
    };
    PlancherelReport rep;
    rep.lhs = l2(g, h);
    rep.norm = std::sqrt(l2(g, g) * l2(h, h));
    const auto gt = forward_transform(p, g, rule.x, workers);
    const auto ht = forward_transform(p, h, rule.x, workers);
    double s = 0.0;
    for (std::size_t j = 0; j < rule.x.size(); ++j) s += rule.w[j] * std::real(std::conj(gt[j]) * ht[j]);
    rep.rhs = 2.0 * s / (4.0 * p.u_nu * p.u_nu);
    rep.residual = std::fabs(rep.lhs - rep.rhs) / rep.norm;
    return rep;
}

namespace detail {
inline double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}
}  // namespace detail

// C-infinity bump: 1 on |x - center| <= flat, 0 beyond flat + ramp.
inline TestFunction smooth_bump(double center, double flat, double ramp) {
    TestFunction g;
    g.lo = center - flat - ramp;
    g.hi = center + flat + ramp;
    g.breaks = {center - flat, center + flat};
    g.f = [=](double x) { return 1.0 - detail::smooth_step((std::fabs(x - center) - flat) / ramp); };
    return g;
}

// Test function built in b = |x|^c / c: an even part equal to 1 for b <= b1
// and 0 for b >= b2, plus `odd_amp` sign(x) times a bump rising on [o1, o2]
// and falling on [o2, o3]. Its transform decays uniformly in |q|^c.
inline TestFunction bessel_bump(const NuParam& p, double b1, double b2, double o1, double o2, double o3,
                                double odd_amp) {
    if (!(0.0 < b1 && b1 < b2) || !(0.0 < o1 && o1 < o2 && o2 < o3 && o3 <= b2))
        throw std::invalid_argument("bessel_bump: need 0 < b1 < b2 and 0 < o1 < o2 < o3 <= b2");
    auto to_x = [&](double b) { return std::pow(p.c * b, 1.0 / p.c); };
    TestFunction g;
    g.hi = to_x(b2);
    g.lo = -g.hi;
    for (double b : {b1, o1, o2, o3}) {
        g.breaks.push_back(to_x(b));
        g.breaks.push_back(-to_x(b));
    }
    const double c = p.c;
    g.f = [=](double x) {
        const double b = std::pow(std::fabs(x), c) / c;
        const double even = 1.0 - detail::smooth_step((b - b1) / (b2 - b1));
        double odd = 0.0;
        if (b > o1 && b < o3)
            odd = b < o2 ? detail::smooth_step((b - o1) / (o2 - o1)) : 1.0 - detail::smooth_step((b - o2) / (o3 - o2));
        return even + odd_amp * (x > 0.0 ? odd : -odd);
    };
    return g;
}

// C^2 bump built from the quintic smootherstep, same layout as smooth_bump.
inline TestFunction c2_bump(double center, double flat, double ramp) {
    TestFunction g;
    g.lo = center - flat - ramp;
    g.hi = center + flat + ramp;
    g.breaks = {center - flat, center + flat};
    g.f = [=](double x) {
        const double s = std::clamp((std::fabs(x - center) - flat) / ramp, 0.0, 1.0);
        return 1.0 - s * s * s * (s * (6.0 * s - 15.0) + 10.0);
    };
    return g;
}

// Maxima of |g~(q)| / (1 + q^{nu/4}) over consecutive blocks of a log-spaced
// q grid on [q_lo, q_hi].
struct TailProfile {
    std::vector<double> q;
    std::vector<double> magnitude;  // |g~(q)|
    std::vector<double> weighted;   // |g~(q)| / (1 + q^{nu/4})
    std::vector<double> block_max;
    bool decreasing = false;
};

inline TailProfile riemann_lebesgue_profile(const NuParam& p, const TestFunction& g, double q_lo = 1.0,
                                            double q_hi = 1e3, int per_decade = 8, int block = 4,
                                            unsigned workers = 1) {
    if (!(q_lo > 0.0 && q_hi > q_lo) || per_decade < 1 || block < 1)
        throw std::invalid_argument("riemann_lebesgue_profile: bad grid");
    TailProfile t;
    const int n = static_cast<int>(std::lround(std::log10(q_hi / q_lo) * per_decade));
    for (int i = 0; i <= n; ++i) t.q.push_back(q_lo * std::pow(q_hi / q_lo, static_cast<double>(i) / n));
    const auto gt = forward_transform(p, g, t.q, workers);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        t.magnitude.push_back(std::abs(gt[i]));
        t.weighted.push_back(t.magnitude.back() / (1.0 + std::pow(t.q[i], 0.25 * p.nu)));
    }
    for (std::size_t i = 0; i < t.weighted.size(); i += block) {
        double m = 0.0;
        for (std::size_t j = i; j < std::min(t.weighted.size(), i + block); ++j) m = std::max(m, t.weighted[j]);
        t.block_max.push_back(m);
    }
    t.decreasing = true;
    for (std::size_t i = 1; i < t.block_max.size(); ++i)
        if (!(t.block_max[i] < t.block_max[i - 1])) t.decreasing = false;
    return t;
}

}  // namespace scalediff
