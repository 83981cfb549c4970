#pragma once

// Martingale checks on path ensembles, first-passage means and the
// envelope constants of the coordinate maps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "scalediff/coordinates.hpp"
#include "scalediff/errors.hpp"
#include "scalediff/kernel.hpp"
#include "scalediff/parallel.hpp"
#include "scalediff/processes.hpp"
#include "scalediff/random.hpp"
#include "scalediff/stats.hpp"

namespace scalediff {

struct DriftRow {
    double t = 0.0;
    double mean = 0.0;  // E[M_t - M_0]
    double se = 0.0;
    double tstat = 0.0;
    bool degenerate = false;
};

struct DriftReport {
    std::string label;
    std::vector<DriftRow> rows;
    double max_abs_t = 0.0;
    int flagged = 0;      // rows with |t| > threshold
    int degenerate = 0;   // rows with zero sample variance and nonzero mean
    double threshold = 4.0;
    bool pass() const { return flagged == 0 && degenerate == 0; }
};

// t-test of H0: E[M_t - M_0] = 0 at every grid time after the first;
// value(i, k) is the martingale evaluated on path i at grid time k.
inline DriftReport drift_test(const PathEnsemble& e, const std::function<double(std::size_t, std::size_t)>& value,
                              std::string label, double threshold = 4.0, unsigned workers = 1) {
    if (e.n_paths < 1000) throw ConfigError("drift_test: need at least 1000 paths");
    DriftReport r;
    r.label = std::move(label);
    r.threshold = threshold;
    const std::size_t nt = e.n_times();
    std::vector<double> m0(e.n_paths);
    for (std::size_t i = 0; i < e.n_paths; ++i) m0[i] = value(i, 0);
    r.rows.resize(nt > 0 ? nt - 1 : 0);
    parallel_for(r.rows.size(), workers, [&](std::size_t j) {
        const std::size_t k = j + 1;
        std::vector<double> d(e.n_paths);
        for (std::size_t i = 0; i < e.n_paths; ++i) d[i] = value(i, k) - m0[i];
        const MeanSE s = mean_se(d);
        DriftRow row;
        row.t = e.times[k];
        row.mean = s.mean;
        row.se = s.se;
        if (s.se > 0.0) {
            row.tstat = s.mean / s.se;
        } else {
            row.degenerate = s.mean != 0.0;
            row.tstat = 0.0;
        }
        r.rows[j] = row;
    }, 1);
    for (const auto& row : r.rows) {
        r.max_abs_t = std::max(r.max_abs_t, std::fabs(row.tstat));
        if (std::fabs(row.tstat) > threshold) ++r.flagged;
        if (row.degenerate) ++r.degenerate;
    }
    return r;
}

// m_t = Y(x_t) on a limit ensemble; nu_map lets a caller plant a wrong exponent.
inline DriftReport martingale_drift_test(const PathEnsemble& e, double nu_map, double threshold = 4.0) {
    return drift_test(e, [&](std::size_t i, std::size_t k) { return y_limit(nu_map, e.at(i, k)); },
                      "m_t = Y(x_t)", threshold);
}

// M_t = Y_N(X_t) on a rescaled SDE ensemble.
inline DriftReport martingale_drift_test(const PathEnsemble& e, const ContinuumMap& map, double threshold = 4.0) {
    return drift_test(e, [&](std::size_t i, std::size_t k) { return map.y_n(e.at(i, k)); }, "M_t = Y_N(X_t)",
                      threshold);
}

// M_t = Y_N(X_t) on a CTRW ensemble (uses the stored lattice states).
inline DriftReport martingale_drift_test(const PathEnsemble& e, const DiscreteMap& map, double threshold = 4.0) {
    if (e.states.empty()) throw ConfigError("martingale_drift_test: ensemble has no lattice states");
    const double N = e.rescale_N;
    const std::size_t nt = e.n_times();
    return drift_test(e, [&](std::size_t i, std::size_t k) { return map.y_n(N, e.states[i * nt + k]); },
                      "M_t = Y_N(X_t) (walk)", threshold);
}

// |M_t|^{(nu+2)/(nu+1)} - int_0^t A_N(M_r) dr on a CTRW ensemble recorded with its compensator.
inline DriftReport compensated_drift_test(const PathEnsemble& e, const DiscreteMap& map, double threshold = 4.0) {
    if (e.states.empty() || e.compensator.empty())
        throw ConfigError("compensated_drift_test: ensemble needs states and compensator");
    const double N = e.rescale_N, pw = (map.nu() + 2.0) / (map.nu() + 1.0);
    const std::size_t nt = e.n_times();
    return drift_test(e,
                      [&](std::size_t i, std::size_t k) {
                          return std::pow(std::fabs(map.y_n(N, e.states[i * nt + k])), pw) - e.compensator[i * nt + k];
                      },
                      "|M_t|^p - int A_N (walk)", threshold);
}

enum class HittingSampler { besq, kernel_chain };

struct HittingEstimate {
    double target = 0.0;     // 2 a^{nu+2} / (nu+2)
    double mean = 0.0;       // extrapolated 2 T_h - T_4h
    double se = 0.0;
    double mean_fine = 0.0;  // T_h
    double mean_coarse = 0.0;  // T_4h
    double bias_estimate = 0.0;  // |T_h - extrapolated| / target
    double step = 0.0;
    std::size_t n_paths = 0;
    std::size_t unfinished = 0;
    bool bias_flag = false;  // unfinished paths above 0.1% or bias estimate above 2%
};

struct HittingOptions {
    HittingSampler sampler = HittingSampler::besq;
    double step_fraction = 5e-5;  // h = step_fraction * target
    double horizon_factor = 60.0;  // give up at horizon_factor * target
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Mean of inf{t : |x_t| >= a} from 0. The path is monitored on grids h and 4h;
// the first-passage overshoot bias is O(sqrt h), so 2 T_h - T_4h removes it.
inline HittingEstimate hitting_time_mean(const NuParam& p, double a, std::size_t n_paths, const HittingOptions& opt = {}) {
    if (!(a > 0.0)) throw std::domain_error("hitting_time_mean: level must be > 0");
    if (n_paths < 2) throw ConfigError("hitting_time_mean: need >= 2 paths");
    if (!(opt.step_fraction > 0.0 && opt.step_fraction < 0.1)) throw ConfigError("hitting_time_mean: bad step_fraction");
    HittingEstimate est;
    est.target = 2.0 * std::pow(a, p.nu + 2.0) / (p.nu + 2.0);
    est.n_paths = n_paths;
    const double h = opt.step_fraction * est.target;
    est.step = h;
    const double horizon = opt.horizon_factor * est.target;
    const double delta = 2.0 / (p.nu + 2.0);
    const double s_a = 4.0 * std::pow(a, p.nu + 2.0) / ((p.nu + 2.0) * (p.nu + 2.0));
    std::shared_ptr<KernelCache> cache;
    if (opt.sampler == HittingSampler::kernel_chain) cache = std::make_shared<KernelCache>(p);

    std::vector<double> fine(n_paths), coarse(n_paths);
    std::vector<char> done(n_paths, 0);
    parallel_for(n_paths, opt.workers, [&](std::size_t i) {
        RandomStream rng(opt.seed, i);
        double s = 0.0, x = 0.0;
        double tf = -1.0;
        for (std::uint64_t k = 1;; ++k) {
            const double t = static_cast<double>(k) * h;
            if (t > horizon) return;
            bool hit;
            if (opt.sampler == HittingSampler::besq) {
                s = besq_step(delta, s, h, rng);
                hit = s >= s_a;
            } else {
                x = cache->step(x, h, rng);
                hit = std::fabs(x) >= a;
            }
            if (hit && tf < 0.0) tf = t;
            if (hit && k % 4 == 0) {
                fine[i] = tf;
                coarse[i] = t;
                done[i] = 1;
                return;
            }
        }
    });
    std::vector<double> ext, vf, vc;
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (!done[i]) {
            ++est.unfinished;
            continue;
        }
        vf.push_back(fine[i]);
        vc.push_back(coarse[i]);
        ext.push_back(2.0 * fine[i] - coarse[i]);
    }
    if (ext.size() < 2) throw NumericError("hitting_time_mean: no path reached the level before the horizon");
    const MeanSE m = mean_se(ext);
    est.mean = m.mean;
    est.se = m.se;
    est.mean_fine = mean_se(vf).mean;
    est.mean_coarse = mean_se(vc).mean;
    est.bias_estimate = std::fabs(est.mean_fine - est.mean) / est.target;
    est.bias_flag = est.unfinished > n_paths / 1000 || est.bias_estimate > 0.02;
    return est;
}

// Sup-ratios realising the constants C in the envelope inequalities
//   (1) |Y_N - Y| <= C N^{-1/(nu+2)} (N^{-nu/(nu+2)} + |x|^nu)
//   (2) |Q_N - Q| <= C N^{-nu/(nu+2)} [inner] + C N^{-1/(nu+2)} |y|^{(nu-1)/(nu+1)} [outer]
//   (3) A_N >= 1/C
//   (4) |Y| <= C |Y_N|,  |Y_N| <= C (1 + |Y|),  Q_N <= C (1 + Q)
// evaluated on a set of points for one N.
struct EnvelopeConstants {
    double N = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4_y = 0.0, c4_yn = 0.0, c4_q = 0.0;
};

namespace detail {

struct EnvelopePoint {
    double x, y_n, q_n, a_n;
    bool inner;
};

inline void accumulate_envelope(EnvelopeConstants& c, double nu, double N, const EnvelopePoint& pt) {
    const double a1 = std::pow(N, -1.0 / (nu + 2.0)), an = std::pow(N, -nu / (nu + 2.0));
    const double ax = std::fabs(pt.x);
    const double Y = y_limit(nu, pt.x);
    const double Q = q_limit(nu, pt.y_n);
    c.c1 = std::max(c.c1, std::fabs(pt.y_n - Y) / (a1 * (an + std::pow(ax, nu))));
    const double env2 = pt.inner ? an : a1 * std::pow(std::fabs(pt.y_n), (nu - 1.0) / (nu + 1.0));
    c.c2 = std::max(c.c2, std::fabs(pt.q_n - Q) / env2);
    c.c3 = std::max(c.c3, 1.0 / pt.a_n);
    if (pt.x != 0.0) c.c4_y = std::max(c.c4_y, std::fabs(Y) / std::fabs(pt.y_n));
    c.c4_yn = std::max(c.c4_yn, std::fabs(pt.y_n) / (1.0 + std::fabs(Y)));
    c.c4_q = std::max(c.c4_q, pt.q_n / (1.0 + Q));
}

}  // namespace detail

// Diffusion maps on x = N^{-1/(nu+2)} u for u in {0} and +-u_grid.
// Points are taken as y = Y_N(x) so that W_N(y) = x holds exactly.
inline EnvelopeConstants envelope_constants(const ContinuumMap& map, const std::vector<double>& u_grid) {
    const double nu = map.nu(), N = map.N();
    const double xs = std::pow(N, -1.0 / (nu + 2.0));
    const double y_edge = std::pow(N, -(nu + 1.0) / (nu + 2.0));
    EnvelopeConstants c;
    c.N = N;
    std::vector<double> us{0.0};
    for (double u : u_grid) {
        us.push_back(u);
        us.push_back(-u);
    }
    for (double u : us) {
        const double x = xs * u;
        const double yn = map.y_n(x);
        const double d = map.d_n(x);
        detail::EnvelopePoint pt;
        pt.x = x;
        pt.y_n = yn;
        pt.q_n = (nu + 1.0) * (nu + 1.0) / d;
        pt.inner = std::fabs(yn) <= y_edge;
        // A_N at y = 0 is the limit of |y|^{-nu/(nu+1)}/D_N: infinite, so skip the 1/A_N term there.
        pt.a_n = yn == 0.0 ? std::numeric_limits<double>::infinity()
                           : (nu + 2.0) * std::pow(std::fabs(yn), -nu / (nu + 1.0)) / (2.0 * d);
        detail::accumulate_envelope(c, nu, N, pt);
    }
    return c;
}

// Walk maps on the lattice points |n| <= n_span; the inner regime is the single point y = 0.
inline EnvelopeConstants envelope_constants(const DiscreteMap& map, double N, std::int64_t n_span) {
    if (n_span + 1 > map.n_max()) throw ConfigError("envelope_constants: n_span exceeds the tabulated range");
    const double nu = map.nu();
    const double xs = std::pow(N, -1.0 / (nu + 2.0));
    EnvelopeConstants c;
    c.N = N;
    for (std::int64_t n = -n_span; n <= n_span; ++n) {
        detail::EnvelopePoint pt;
        pt.x = xs * static_cast<double>(n);
        pt.y_n = map.y_n(N, n);
        pt.q_n = map.q_n(N, n);
        pt.a_n = map.a_n(n);
        pt.inner = n == 0;
        detail::accumulate_envelope(c, nu, N, pt);
    }
    return c;
}

// max/min of each constant over a list of N. A constant below `exact` at
// every N means the inequality holds with C = 0 (e.g. Y_N = Y); its spread is 1.
inline std::vector<double> envelope_spread(const std::vector<EnvelopeConstants>& rows, double exact = 1e-9) {
    std::vector<double> out;
    auto spread = [&](auto get) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& r : rows) {
            lo = std::min(lo, get(r));
            hi = std::max(hi, get(r));
        }
        if (hi <= exact) out.push_back(1.0);
        else out.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    };
    spread([](const EnvelopeConstants& r) { return r.c1; });
    spread([](const EnvelopeConstants& r) { return r.c2; });
    spread([](const EnvelopeConstants& r) { return r.c3; });
    spread([](const EnvelopeConstants& r) { return r.c4_y; });
    spread([](const EnvelopeConstants& r) { return r.c4_yn; });
    spread([](const EnvelopeConstants& r) { return r.c4_q; });
    return out;
}

inline std::vector<double> default_envelope_grid(int n = 241, double u_lo = 1e-3, double u_hi = 1e4) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(u_lo * std::pow(u_hi / u_lo, static_cast<double>(i) / (n - 1)));
    return g;
}

}  // namespace scalediff
