#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "scalediff/errors.hpp"

namespace scalediff {

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
    bool rel_to_abs = false;  // rel_tol scales int |f| instead of |int f| (oscillatory integrands)
};

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    double resabs = 0.0;  // int |f|, for the roundoff floor
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kGkWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
inline double magnitude(const T& v) {
    return std::abs(v);
}

}  // namespace detail

// One Gauss-Kronrod 7/15 panel. The error is |K15 - G7| rescaled as in
// QUADPACK's qk15: resasc min(1, (200 |K15 - G7| / resasc)^1.5).
template <class F>
auto gk15(F&& f, double a, double b) {
    using T = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fv[15];
    fv[7] = f(c);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * detail::kGkNodes[j];
        fv[j] = f(c - dx);
        fv[14 - j] = f(c + dx);
    }
    T kron = fv[7] * detail::kGkWeights[7];
    T gauss = fv[7] * detail::kGaussWeights[3];
    double abs_sum = detail::magnitude(fv[7]) * detail::kGkWeights[7];
    for (int j = 0; j < 7; ++j) {
        kron += (fv[j] + fv[14 - j]) * detail::kGkWeights[j];
        abs_sum += (detail::magnitude(fv[j]) + detail::magnitude(fv[14 - j])) * detail::kGkWeights[j];
        if (j % 2 == 1) gauss += (fv[j] + fv[14 - j]) * detail::kGaussWeights[j / 2];
    }
    const T mean = kron * 0.5;
    double asc = detail::magnitude(T(fv[7] - mean)) * detail::kGkWeights[7];
    for (int j = 0; j < 7; ++j)
        asc += (detail::magnitude(T(fv[j] - mean)) + detail::magnitude(T(fv[14 - j] - mean))) * detail::kGkWeights[j];
    asc *= std::fabs(h);
    double err = detail::magnitude(T((kron - gauss) * h));
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    QuadratureResult<T> r;
    r.value = kron * h;
    r.error = err;
    r.resabs = abs_sum * std::fabs(h);
    r.intervals = 1;
    r.converged = true;
    return r;
}

namespace detail {
// Error below this multiple of int |f| is treated as converged.
inline constexpr double kRoundoffFloor = 50.0 * 2.220446049250313e-16;
}  // namespace detail

// Globally adaptive bisection on the panel with the largest error, seeded
// with the panels between consecutive breakpoints.
template <class F>
auto integrate_panels(F&& f, const std::vector<double>& breaks, const QuadratureSpec& spec = {}) {
    using T = std::decay_t<decltype(f(0.0))>;
    struct Panel {
        double a, b;
        QuadratureResult<T> r;
        bool operator<(const Panel& o) const { return r.error < o.r.error; }
    };
    QuadratureResult<T> out;
    out.converged = true;
    if (breaks.size() < 2) return out;
    std::vector<Panel> init;
    init.reserve(breaks.size());
    T total{};
    double err = 0.0, resabs = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i] == breaks[i + 1]) continue;
        auto r = gk15(f, breaks[i], breaks[i + 1]);
        total += r.value;
        err += r.error;
        resabs += r.resabs;
        init.push_back({breaks[i], breaks[i + 1], r});
    }
    std::priority_queue<Panel> heap(std::less<Panel>(), std::move(init));
    int n = static_cast<int>(heap.size());
    const int budget = n + spec.max_intervals;
    auto tol = [&](const T& v, double ra) {
        const double scale = spec.rel_to_abs ? ra : detail::magnitude(v);
        return std::max({spec.abs_tol, spec.rel_tol * scale, detail::kRoundoffFloor * ra});
    };
    while (!heap.empty() && err > tol(total, resabs) && n < budget) {
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            heap.push(p);
            break;
        }
        auto left = gk15(f, p.a, m);
        auto right = gk15(f, m, p.b);
        total += left.value + right.value - p.r.value;
        err += left.error + right.error - p.r.error;
        resabs += left.resabs + right.resabs - p.r.resabs;
        heap.push({p.a, m, left});
        heap.push({m, p.b, right});
        ++n;
    }
    // Re-sum to shed the running-update roundoff.
    T sum{};
    double esum = 0.0, asum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().r.value;
        esum += heap.top().r.error;
        asum += heap.top().r.resabs;
        heap.pop();
    }
    out.value = sum;
    out.error = esum;
    out.resabs = asum;
    out.intervals = n;
    out.converged = esum <= tol(sum, asum);
    return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    return integrate_panels(std::forward<F>(f), std::vector<double>{a, b}, spec);
}

template <class T>
void require_converged(const QuadratureResult<T>& r, const std::string& what) {
    if (r.converged) return;
    std::ostringstream os;
    os << what << ": quadrature did not converge (error estimate " << r.error << " after " << r.intervals
       << " panels)";
    throw NumericError(os.str());
}

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};

inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        g.x[i] = -x;
        g.x[n - 1 - i] = x;
        g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

// Composite rule: n-point Gauss-Legendre on each [breaks[i], breaks[i+1]].
struct CompositeRule {
    std::vector<double> x, w;
};

inline CompositeRule composite_rule(const std::vector<double>& breaks, int n) {
    const GaussRule g = gauss_legendre(n);
    CompositeRule r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double c = 0.5 * (breaks[i] + breaks[i + 1]), h = 0.5 * (breaks[i + 1] - breaks[i]);
        for (int j = 0; j < n; ++j) {
            r.x.push_back(c + h * g.x[j]);
            r.w.push_back(h * g.w[j]);
        }
    }
    return r;
}

}  // namespace scalediff
