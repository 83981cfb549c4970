#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "scalediff/coordinates.hpp"
#include "scalediff/eigen.hpp"
#include "scalediff/errors.hpp"
#include "scalediff/kernel.hpp"
#include "scalediff/models.hpp"
#include "scalediff/parallel.hpp"
#include "scalediff/random.hpp"

namespace scalediff {

enum class ProcessKind { limit, sde, ctrw, besq };

inline const char* to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::limit: return "limit";
        case ProcessKind::sde: return "sde";
        case ProcessKind::ctrw: return "ctrw";
        case ProcessKind::besq: return "besq";
    }
    return "?";
}

// Paths share one time grid; values are row-major (path, time).
struct PathEnsemble {
    NuParam p;
    ProcessKind kind = ProcessKind::limit;
    std::vector<double> times;
    std::size_t n_paths = 0;
    std::vector<double> paths;
    std::uint64_t seed = 0;
    double rescale_N = 1.0;

    // Optional per-(path, time) records; empty when not requested.
    std::vector<std::int64_t> states;  // raw lattice sites (ctrw)
    std::vector<double> compensator;   // int_0^t A(X_r) dr
    std::vector<double> sup_abs;       // sup_{r <= t} |X_r|
    std::vector<double> occupation;    // time with |M_r| <= level up to t

    std::size_t n_times() const { return times.size(); }
    double at(std::size_t path, std::size_t k) const { return paths[path * times.size() + k]; }
    std::vector<double> column(std::size_t k) const {
        std::vector<double> c(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) c[i] = at(i, k);
        return c;
    }
    std::vector<double> column_of(const std::vector<double>& m, std::size_t k) const {
        std::vector<double> c(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) c[i] = m[i * times.size() + k];
        return c;
    }
};

inline void check_time_grid(const std::vector<double>& times) {
    if (times.empty() || times.front() != 0.0) throw ConfigError("time grid must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ConfigError("time grid must be strictly increasing");
}

// Exact squared-Bessel transition of dimension delta over time h.
inline double besq_step(double delta, double s0, double h, RandomStream& rng) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("besq_step: delta must lie in (0, 1)");
    if (!(s0 >= 0.0) || !(h > 0.0)) throw std::domain_error("besq_step: need s0 >= 0, h > 0");
    long long k = 0;
    if (s0 > 0.0) k = std::poisson_distribution<long long>(s0 / (2.0 * h))(rng.engine());
    return std::gamma_distribution<double>(static_cast<double>(k) + 0.5 * delta, 2.0 * h)(rng.engine());
}

// BESQ chain s_t = 4|x_t|^{nu+2}/(nu+2)^2 on a time grid, started at s0.
inline PathEnsemble sample_besq_paths(const NuParam& p, double s0, const std::vector<double>& times,
                                      std::size_t n_paths, std::uint64_t seed, unsigned workers = 1) {
    check_time_grid(times);
    PathEnsemble e;
    e.p = p;
    e.kind = ProcessKind::besq;
    e.times = times;
    e.n_paths = n_paths;
    e.seed = seed;
    e.paths.resize(n_paths * times.size());
    const double delta = 2.0 / (p.nu + 2.0);
    parallel_for(n_paths, workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        double s = s0;
        e.paths[i * times.size()] = s;
        for (std::size_t k = 1; k < times.size(); ++k) {
            s = besq_step(delta, s, times[k] - times[k - 1], rng);
            e.paths[i * times.size() + k] = s;
        }
    });
    return e;
}

// Kernel-chain sampler: each grid step is an exact draw from phi_dt.
inline PathEnsemble sample_limit_paths(const NuParam& p, double x0, const std::vector<double>& times,
                                       std::size_t n_paths, std::uint64_t seed, unsigned workers = 1,
                                       std::shared_ptr<KernelCache> cache = nullptr) {
    check_time_grid(times);
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (!cache) cache = std::make_shared<KernelCache>(p);
    PathEnsemble e;
    e.p = p;
    e.kind = ProcessKind::limit;
    e.times = times;
    e.n_paths = n_paths;
    e.seed = seed;
    e.paths.resize(n_paths * times.size());
    parallel_for(n_paths, workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        double x = x0;
        e.paths[i * times.size()] = x;
        for (std::size_t k = 1; k < times.size(); ++k) {
            x = cache->step(x, times[k] - times[k - 1], rng);
            e.paths[i * times.size() + k] = x;
        }
    });
    return e;
}

// martingale: derivative-free weak order-2 step for dM = b(M) dw with a
// three-point increment; martingale_euler: Euler-Maruyama on M; direct:
// Euler-Maruyama on X with drift D_N'/2.
enum class SdeScheme { martingale, martingale_euler, direct };

struct SdeOptions {
    double steps_per_unit = 1000.0;  // cap on the step: dt <= 1/steps_per_unit
    double eta = 0.5;                // martingale schemes: dt <= eta max(y^2, y_c^2) / Q_N(y)
    SdeScheme scheme = SdeScheme::martingale;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    bool track_sup = false;
    double occupation_level = -1.0;  // record time with |M| <= level when > 0
};

// Largest |d/dx (D_N'/2)| sampled around the core; used for the direct scheme's step check.
inline double direct_drift_lipschitz(const SdeModel& m, double N) {
    const double xc = m.core_scale(N);
    double L = 0.0;
    for (int i = -120; i <= 60; ++i) {
        const double x = xc * std::pow(10.0, i / 40.0);
        const double h = 1e-4 * x;
        const double b1 = 0.5 * m.d_n_prime(N, x + h), b0 = 0.5 * m.d_n_prime(N, x - h);
        L = std::max(L, std::fabs(b1 - b0) / (2.0 * h));
    }
    return L;
}

inline PathEnsemble sample_sde_paths(const SdeModel& m, double N, double x0, const std::vector<double>& times,
                                     std::size_t n_paths, const SdeOptions& opt = {}) {
    check_time_grid(times);
    if (!(N >= 1.0)) throw ConfigError("sample_sde_paths: N must be >= 1");
    if (!(opt.steps_per_unit > 0.0)) throw ConfigError("sample_sde_paths: steps_per_unit must be > 0");
    const double dt_max = 1.0 / opt.steps_per_unit;
    if (opt.scheme == SdeScheme::direct) {
        if (m.nu < 1.0) throw ConfigError("direct scheme requires nu >= 1 (drift singular at 0 otherwise)");
        const double L = direct_drift_lipschitz(m, N);
        if (dt_max * L > 0.5) {
            std::ostringstream os;
            os << "direct scheme unstable: dt * sup|b'| = " << dt_max * L << " > 0.5; raise steps_per_unit above "
               << 2.0 * L;
            throw ConfigError(os.str());
        }
    } else if (!(opt.eta > 0.0)) {
        throw ConfigError("sample_sde_paths: eta must be > 0");
    }
    const ContinuumMap map(m, N);
    const double nu = m.nu;
    const double yc = map.y_n(m.core_scale(N));
    const std::size_t nt = times.size();

    PathEnsemble e;
    e.p = NuParam(nu);
    e.kind = ProcessKind::sde;
    e.times = times;
    e.n_paths = n_paths;
    e.seed = opt.seed;
    e.rescale_N = N;
    e.paths.resize(n_paths * nt);
    if (opt.track_sup) e.sup_abs.resize(n_paths * nt);
    if (opt.occupation_level > 0.0) e.occupation.resize(n_paths * nt);

    parallel_for(n_paths, opt.workers, [&](std::size_t i) {
        RandomStream rng(opt.seed, i);
        double x = x0, y = map.y_n(x0), t = 0.0, sup = std::fabs(x0), occ = 0.0;
        const std::size_t row = i * nt;
        e.paths[row] = x;
        if (opt.track_sup) e.sup_abs[row] = sup;
        if (opt.occupation_level > 0.0) e.occupation[row] = 0.0;
        for (std::size_t k = 1; k < nt; ++k) {
            const double target = times[k];
            while (t < target) {
                double dt;
                if (opt.scheme != SdeScheme::direct) {
                    const double b = (nu + 1.0) / std::sqrt(map.d_n(x));
                    dt = std::min({dt_max, opt.eta * std::max(y * y, yc * yc) / (b * b), target - t});
                    if (opt.occupation_level > 0.0 && std::fabs(y) <= opt.occupation_level) occ += dt;
                    const double sd = std::sqrt(dt);
                    if (opt.scheme == SdeScheme::martingale_euler) {
                        y += b * sd * rng.normal();
                    } else {
                        const double u = rng.uniform();
                        const double dw = u < 1.0 / 6.0 ? -std::sqrt(3.0 * dt) : (u < 2.0 / 6.0 ? std::sqrt(3.0 * dt) : 0.0);
                        const double bp = (nu + 1.0) / std::sqrt(map.d_n(map.w_n(y + b * sd, x)));
                        const double bm = (nu + 1.0) / std::sqrt(map.d_n(map.w_n(y - b * sd, x)));
                        y += 0.25 * (bp + bm + 2.0 * b) * dw + 0.25 * (bp - bm) * (dw * dw - dt) / sd;
                    }
                    x = map.w_n(y, x);
                } else {
                    dt = std::min(dt_max, target - t);
                    if (opt.occupation_level > 0.0 && std::fabs(y) <= opt.occupation_level) occ += dt;
                    x += 0.5 * m.d_n_prime(N, x) * dt + std::sqrt(map.d_n(x) * dt) * rng.normal();
                    if (opt.occupation_level > 0.0) y = map.y_n(x);
                }
                // Land exactly on the grid time despite roundoff in the sum.
                t = (target - t - dt <= 1e-14 * target) ? target : t + dt;
                sup = std::max(sup, std::fabs(x));
            }
            e.paths[row + k] = x;
            if (opt.track_sup) e.sup_abs[row + k] = sup;
            if (opt.occupation_level > 0.0) e.occupation[row + k] = occ;
        }
    });
    return e;
}

struct CtrwOptions {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::uint64_t max_events = 2'000'000'000ULL;  // per path
    bool record_compensator = false;
};

// Event-driven walk. Grid times are in rescaled units; the walk runs to N t
// and is reported as N^{-1/(nu+2)} n.
inline PathEnsemble sample_ctrw_paths(const RateModel& r, double N, std::int64_t n0, const std::vector<double>& times,
                                      std::size_t n_paths, const CtrwOptions& opt = {}) {
    check_time_grid(times);
    if (!(N >= 1.0)) throw ConfigError("sample_ctrw_paths: N must be >= 1");
    const double nu = r.nu;
    const double xs = std::pow(N, -1.0 / (nu + 2.0));
    const std::int64_t n_max =
        std::max<std::int64_t>(1000, static_cast<std::int64_t>(400.0 / xs) + std::llabs(n0));
    // c[n + n_max + 1] = c_n for n in [-n_max-1, n_max]
    std::vector<double> c(static_cast<std::size_t>(2 * n_max + 2));
    for (std::int64_t n = -n_max - 1; n <= n_max; ++n) c[static_cast<std::size_t>(n + n_max + 1)] = r.up(n);
    std::unique_ptr<DiscreteMap> map;
    std::vector<double> ahat;
    if (opt.record_compensator) {
        map = std::make_unique<DiscreteMap>(r, n_max + 1);
        ahat.resize(static_cast<std::size_t>(2 * n_max + 1));
        for (std::int64_t n = -n_max; n <= n_max; ++n) ahat[static_cast<std::size_t>(n + n_max)] = map->a_hat(n);
    }
    const std::size_t nt = times.size();
    PathEnsemble e;
    e.p = NuParam(nu);
    e.kind = ProcessKind::ctrw;
    e.times = times;
    e.n_paths = n_paths;
    e.seed = opt.seed;
    e.rescale_N = N;
    e.paths.resize(n_paths * nt);
    e.states.resize(n_paths * nt);
    if (opt.record_compensator) e.compensator.resize(n_paths * nt);

    parallel_for(n_paths, opt.workers, [&](std::size_t i) {
        RandomStream rng(opt.seed, i);
        std::int64_t n = n0;
        double tau = 0.0, comp = 0.0;
        std::uint64_t events = 0;
        const std::size_t row = i * nt;
        e.states[row] = n;
        e.paths[row] = xs * static_cast<double>(n);
        if (opt.record_compensator) e.compensator[row] = 0.0;
        std::size_t k = 1;
        while (k < nt) {
            if (n <= -n_max || n >= n_max) throw NumericError("sample_ctrw_paths: walk left the tabulated range");
            const double up = c[static_cast<std::size_t>(n + n_max + 1)];
            const double dn = c[static_cast<std::size_t>(n + n_max)];
            const double hold = rng.exponential(up + dn);
            const double a = opt.record_compensator ? ahat[static_cast<std::size_t>(n + n_max)] : 0.0;
            // Record every grid time that falls inside this holding interval.
            while (k < nt && tau + hold >= N * times[k]) {
                if (opt.record_compensator) {
                    e.compensator[row + k] = comp + a * (N * times[k] - tau) / N;
                }
                e.states[row + k] = n;
                e.paths[row + k] = xs * static_cast<double>(n);
                ++k;
            }
            if (k >= nt) break;
            comp += a * hold / N;
            tau += hold;
            n += (rng.uniform() * (up + dn) < up) ? 1 : -1;
            if (++events > opt.max_events) throw NumericError("sample_ctrw_paths: event budget exceeded");
        }
    });
    return e;
}

// X^(N)_t = N^{-1/(nu+2)} X_{N t}: relabel an ensemble sampled at scale 1.
inline PathEnsemble rescale_ensemble(PathEnsemble e, double N) {
    const double s = std::pow(N, -e.p.char_exp);
    for (double& t : e.times) t /= N;
    for (double& x : e.paths) x *= s;
    for (double& x : e.sup_abs) x *= s;
    e.rescale_N *= N;
    return e;
}

}  // namespace scalediff
