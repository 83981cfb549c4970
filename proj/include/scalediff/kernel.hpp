#pragma once

// Transition density of the scale-invariant diffusion
//
//   phi_t(x, x') = |x x'|^{(nu+1)/2} / (t (nu+2)) exp(-(|x|^{nu+2} + |x'|^{nu+2}) / (2 t c^2))
//                  [I_{-beta}(z) + sgn(x x') I_beta(z)],   z = |x x'|^c / (t c^2),
//
// evaluated in log space, its spectral form, and inverse-CDF tables.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <vector>

#include "scalediff/eigen.hpp"
#include "scalediff/errors.hpp"
#include "scalediff/quadrature.hpp"
#include "scalediff/random.hpp"
#include "scalediff/specfun.hpp"

namespace scalediff {

namespace detail {

// log( z^beta [I_{-beta}(z) + s I_beta(z)] ) - z,  s in {-1, +1}.
inline double log_bracket(double beta, double z, int s) {
    constexpr double kSeriesSwitch = 15.0;
    if (z == 0.0) return beta * std::numbers::ln2 - log_gamma(1.0 - beta);
    if (s > 0 && z <= kSeriesSwitch) {
        const double odd = std::pow(0.5 * z, 2.0 * beta) * bessel_i_reduced(beta, z);
        return beta * std::numbers::ln2 + std::log(bessel_i_reduced(-beta, z) + odd) - z;
    }
    if (s > 0) {
        return beta * std::log(z) +
               std::log(bessel_i_scaled_asymptotic(-beta, z) + bessel_i_scaled_asymptotic(beta, z));
    }
    if (z <= 1.0) {
        const double odd = std::pow(0.5 * z, 2.0 * beta) * bessel_i_reduced(beta, z);
        return beta * std::numbers::ln2 + std::log(bessel_i_reduced(-beta, z) - odd) - z;
    }
    // I_{-beta} - I_beta = (2/pi) sin(beta pi) K_beta
    return beta * std::log(z) + std::log(2.0 / std::numbers::pi * std::sin(beta * std::numbers::pi)) +
           std::log(bessel_k_scaled(beta, z)) - 2.0 * z;
}

}  // namespace detail

inline double log_phi(const NuParam& p, double t, double x, double xp) {
    if (!(t > 0.0)) throw std::domain_error("phi: t must be > 0");
    const double a = std::pow(std::fabs(x), p.c);
    const double b = std::pow(std::fabs(xp), p.c);
    const double tc2 = t * p.c * p.c;
    const double z = a * b / tc2;
    const int s = (x * xp < 0.0) ? -1 : 1;
    const double d = a - b;
    return -std::log(t * (p.nu + 2.0)) + p.beta * std::log(tc2) + detail::log_bracket(p.beta, z, s) -
           d * d / (2.0 * tc2);
}

inline double phi(const NuParam& p, double t, double x, double xp) { return std::exp(log_phi(p, t, x, xp)); }

// (1 / 4u^2) int e^{-t|q|^{nu+2}/2} e(qx) conj(e(qx')) dq over the real line.
inline double phi_spectral(const NuParam& p, double t, double x, double xp, QuadratureSpec quad = {1e-11, 1e-11, 4000},
                           int max_panels = 20000) {
    if (!(t > 0.0)) throw std::domain_error("phi_spectral: t must be > 0");
    const double xmax = std::max({std::fabs(x), std::fabs(xp), 1.0});
    auto envelope = [&](double q) {
        return std::exp(-0.5 * t * std::pow(q, p.nu + 2.0)) * (1.0 + std::pow(q * xmax, 0.5 * p.nu));
    };
    double qmax = 1.0;
    while (envelope(qmax) > 1e-3 * quad.abs_tol) qmax *= 1.25;
    // Panels end at phase increments of pi in |q xmax|^c / c.
    std::vector<double> breaks{0.0};
    for (int k = 1;; ++k) {
        const double q = std::pow(p.c * k * std::numbers::pi, 1.0 / p.c) / xmax;
        if (q >= qmax) break;
        breaks.push_back(q);
        if (static_cast<int>(breaks.size()) > max_panels) {
            std::ostringstream os;
            os << "phi_spectral: oscillation estimate exceeds panel budget (" << max_panels << " panels, qmax "
               << qmax << ")";
            throw NumericError(os.str());
        }
    }
    breaks.push_back(qmax);
    const double norm = 2.0 / (4.0 * p.u_nu * p.u_nu);
    auto f = [&](double q) {
        const double w = std::exp(-0.5 * t * std::pow(q, p.nu + 2.0));
        return w * std::real(e_nu(p, q * x) * std::conj(e_nu(p, q * xp)));
    };
    QuadratureSpec per = quad;
    per.abs_tol = quad.abs_tol / norm;
    auto r = integrate_panels(f, breaks, per);
    require_converged(r, "phi_spectral");
    return norm * r.value;
}

// Tabulated CDF of phi_dt(x_source, .) on a strictly increasing grid.
struct KernelTable {
    NuParam p;
    double dt = 0.0;
    double x_source = 0.0;
    std::vector<double> grid;
    std::vector<double> pdf;
    std::vector<double> cdf;
    double raw_mass = 0.0;  // integral before normalization

    // Tail length scale of exp(-|x|^{nu+2} / (2 dt c^2)).
    static double sigma(const NuParam& p, double dt) {
        return std::pow(2.0 * dt, p.char_exp) * std::pow(p.c, 2.0 * p.char_exp);
    }
};

namespace detail {

inline double to_bessel(const NuParam& p, double x) { return std::copysign(std::pow(std::fabs(x), p.c) / p.c, x); }
inline double from_bessel(const NuParam& p, double b) {
    return std::copysign(std::pow(p.c * std::fabs(b), 1.0 / p.c), b);
}

}  // namespace detail

// Table grid: uniform in the signed Bessel coordinate over +-10 diffusive
// widths around the source, an x-uniform panel around 0 and +-8 sigma cover.
inline KernelTable build_kernel_table(const NuParam& p, double dt, double x_source, int resolution = 1024) {
    if (!(dt > 0.0)) throw std::domain_error("build_kernel_table: dt must be > 0");
    if (resolution < 64) throw ConfigError("build_kernel_table: resolution must be >= 64");
    const double lam = std::pow(dt, p.char_exp);
    const double us = x_source / lam;
    const double bs = detail::to_bessel(p, us);
    constexpr double kWindow = 10.0;

    std::vector<double> u;
    u.reserve(resolution + resolution / 4 + 16);
    for (int i = 0; i <= resolution; ++i) {
        const double b = bs - kWindow + 2.0 * kWindow * i / resolution;
        u.push_back(detail::from_bessel(p, b));
    }
    if (std::fabs(bs) < kWindow + 1.0) {
        const double u1 = detail::from_bessel(p, 1.0);
        const int nref = resolution / 8;
        for (int i = -nref; i <= nref; ++i) u.push_back(u1 * i / nref);
    }
    const double s8 = 8.0 * KernelTable::sigma(p, 1.0);
    const double lo = std::min(u.front(), us - s8), hi = std::max(u.back(), us + s8);
    for (int i = 1; i <= 8; ++i) {
        u.push_back(u.front() + (lo - u.front()) * i / 8.0);
        u.push_back(u.back() + (hi - u.back()) * i / 8.0);
    }
    std::sort(u.begin(), u.end());
    std::vector<double> g;
    for (double v : u)
        if (g.empty() || v - g.back() > 1e-13 * std::max(1.0, std::fabs(v))) g.push_back(v);

    KernelTable tbl;
    tbl.p = p;
    tbl.dt = dt;
    tbl.x_source = x_source;
    const std::size_t n = g.size();
    tbl.grid.resize(n);
    tbl.pdf.resize(n);
    tbl.cdf.resize(n);
    auto dens = [&](double v) { return phi(p, 1.0, us, v); };
    double acc = 0.0;
    tbl.cdf[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) tbl.pdf[i] = dens(g[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto r = gk15(dens, g[i], g[i + 1]);
        if (r.error > 1e-12) {
            auto ra = integrate(dens, g[i], g[i + 1], {1e-13, 1e-12, 200});
            r = ra;
        }
        acc += r.value;
        tbl.cdf[i + 1] = acc;
    }
    tbl.raw_mass = acc;
    if (std::fabs(acc - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "build_kernel_table: mass " << acc << " misses 1 by more than 1e-6 (resolution " << resolution << ")";
        throw ConfigError(os.str());
    }
    for (std::size_t i = 0; i < n; ++i) {
        tbl.grid[i] = lam * g[i];
        tbl.pdf[i] /= lam * acc;
        tbl.cdf[i] /= acc;
    }
    return tbl;
}

// Inverse CDF via monotone cubic Hermite interpolation of the CDF with pdf
// slopes, solved by safeguarded Newton.
inline double table_quantile(const KernelTable& tbl, double u) {
    const auto& F = tbl.cdf;
    auto it = std::upper_bound(F.begin(), F.end(), u);
    std::size_t i = (it == F.begin()) ? 0 : static_cast<std::size_t>(it - F.begin()) - 1;
    if (i + 1 >= F.size()) i = F.size() - 2;
    const double h = tbl.grid[i + 1] - tbl.grid[i];
    const double dF = F[i + 1] - F[i];
    if (!(dF > 0.0)) return tbl.grid[i];
    double m0 = tbl.pdf[i] * h / dF, m1 = tbl.pdf[i + 1] * h / dF;
    const double r2 = m0 * m0 + m1 * m1;
    if (r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        m0 *= tau;
        m1 *= tau;
    }
    const double v = std::clamp((u - F[i]) / dF, 0.0, 1.0);
    auto H = [&](double s) {
        const double s2 = s * s, s3 = s2 * s;
        return (3.0 * s2 - 2.0 * s3) + m0 * (s3 - 2.0 * s2 + s) + m1 * (s3 - s2);
    };
    auto dH = [&](double s) { return 6.0 * s * (1.0 - s) + m0 * (3.0 * s * s - 4.0 * s + 1.0) + m1 * (3.0 * s * s - 2.0 * s); };
    double a = 0.0, b = 1.0, s = v;
    for (int it2 = 0; it2 < 60; ++it2) {
        const double r = H(s) - v;
        if (r > 0.0) b = s;
        else a = s;
        const double d = dH(s);
        double next = (d > 0.0) ? s - r / d : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::fabs(next - s) < 1e-14) {
            s = next;
            break;
        }
        s = next;
    }
    return tbl.grid[i] + h * s;
}

inline double sample_from_table(const KernelTable& tbl, RandomStream& rng) { return table_quantile(tbl, rng.uniform()); }

// Piecewise-Hermite CDF of the table at x (consistent with table_quantile).
inline double table_cdf(const KernelTable& tbl, double x) {
    if (x <= tbl.grid.front()) return 0.0;
    if (x >= tbl.grid.back()) return 1.0;
    auto it = std::upper_bound(tbl.grid.begin(), tbl.grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - tbl.grid.begin()) - 1;
    const double h = tbl.grid[i + 1] - tbl.grid[i];
    const double dF = tbl.cdf[i + 1] - tbl.cdf[i];
    if (!(dF > 0.0)) return tbl.cdf[i];
    double m0 = tbl.pdf[i] * h / dF, m1 = tbl.pdf[i + 1] * h / dF;
    const double r2 = m0 * m0 + m1 * m1;
    if (r2 > 9.0) {
        m0 *= 3.0 / std::sqrt(r2);
        m1 *= 3.0 / std::sqrt(r2);
    }
    const double s = (x - tbl.grid[i]) / h, s2 = s * s, s3 = s2 * s;
    return tbl.cdf[i] + dF * ((3.0 * s2 - 2.0 * s3) + m0 * (s3 - 2.0 * s2 + s) + m1 * (s3 - s2));
}

// Unit-time tables keyed by source position on a uniform Bessel-coordinate
// lattice; one step of length dt uses phi_dt(x, y) = phi_1(x/l, y/l)/l with
// l = dt^{1/(nu+2)}. Build-once, read-many under a shared mutex.
class KernelCache {
public:
    explicit KernelCache(NuParam p, double source_spacing = 0.02, int resolution = 1024)
        : p_(p), spacing_(source_spacing), resolution_(resolution) {}

    const NuParam& param() const { return p_; }
    double spacing() const { return spacing_; }

    std::shared_ptr<const KernelTable> table(long node) {
        {
            std::shared_lock lock(mu_);
            auto it = tables_.find(node);
            if (it != tables_.end()) return it->second;
        }
        auto built = std::make_shared<const KernelTable>(
            build_kernel_table(p_, 1.0, detail::from_bessel(p_, spacing_ * node), resolution_));
        std::unique_lock lock(mu_);
        auto [it, inserted] = tables_.emplace(node, built);
        return it->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return tables_.size();
    }

    // One exact-in-law step of length dt from x. The source is placed between
    // two lattice tables and drawn from their linear mixture.
    double step(double x, double dt, RandomStream& rng) {
        const double lam = std::pow(dt, p_.char_exp);
        const double u = std::fabs(x) / lam;
        const double k = std::pow(u, p_.c) / p_.c / spacing_;
        const long lo = static_cast<long>(std::floor(k));
        const double w = k - static_cast<double>(lo);
        const long node = (rng.uniform() < w) ? lo + 1 : lo;
        const double v = sample_from_table(*table(node), rng);
        return (x < 0.0 ? -v : v) * lam;
    }

private:
    NuParam p_;
    double spacing_;
    int resolution_;
    mutable std::shared_mutex mu_;
    std::map<long, std::shared_ptr<const KernelTable>> tables_;
};

}  // namespace scalediff
