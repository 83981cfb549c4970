#pragma once

// Martingale coordinates.
//
// Diffusion (rescaled by N):  Y_N(x) = (nu+1) int_0^x da / D_N(a),
//   Q_N(y) = (nu+1)^2 / D_N(W_N(y)),  A_N(y) = (nu+2) |y|^{-nu/(nu+1)} / (2 D_N(W_N(y))),
// so M = Y_N(X) solves dM = sqrt(Q_N(M)) dw and |M|^{(nu+2)/(nu+1)} - int A_N(M) dr
// is a martingale. Walk: Y^(n) = (nu+1) sum_{m=0}^{n-1} 1/(2 c_m), odd in n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "scalediff/errors.hpp"
#include "scalediff/models.hpp"
#include "scalediff/quadrature.hpp"

namespace scalediff {

enum class MapKind { continuum, discrete };

namespace detail {

// x^p for x >= 0, with a multiplication path for small integer p.
inline double pow_nonneg(double x, double p) {
    if (p == std::floor(p) && p >= 0.0 && p <= 8.0) {
        double r = 1.0;
        for (int i = 0; i < static_cast<int>(p); ++i) r *= x;
        return r;
    }
    return std::pow(x, p);
}

}  // namespace detail

inline double y_limit(double nu, double x) { return std::copysign(std::pow(std::fabs(x), nu + 1.0), x); }
inline double w_limit(double nu, double y) { return std::copysign(std::pow(std::fabs(y), 1.0 / (nu + 1.0)), y); }
inline double q_limit(double nu, double y) { return (nu + 1.0) * (nu + 1.0) * std::pow(std::fabs(y), nu / (nu + 1.0)); }

class ContinuumMap {
public:
    ContinuumMap(SdeModel m, double N) : m_(std::move(m)), N_(N) {
        if (!(N >= 1.0)) throw ModelError("ContinuumMap: N must be >= 1");
        eps_ = m_.epsilon * std::pow(N_, -m_.nu / (m_.nu + 2.0));
        h_ = m_.core_scale(N_);
    }

    MapKind kind() const { return MapKind::continuum; }
    const SdeModel& model() const { return m_; }
    double N() const { return N_; }
    double nu() const { return m_.nu; }

    double d_n(double x) const {
        if (m_.kind == SdeKind::power) return 1.0 / (eps_ + detail::pow_nonneg(std::fabs(x), m_.nu));
        return m_.d_n(N_, x);
    }

    double y_n(double x) const {
        const double nu = m_.nu;
        const double ax = std::fabs(x);
        switch (m_.kind) {
            case SdeKind::power:
                return std::copysign(std::pow(ax, nu + 1.0) + (nu + 1.0) * eps_ * ax, x);
            case SdeKind::shifted:
                return std::copysign(std::pow(h_ + ax, nu + 1.0) - std::pow(h_, nu + 1.0), x);
            case SdeKind::custom:
            default: {
                if (ax == 0.0) return 0.0;
                auto f = [&](double a) { return 1.0 / m_.d_n(N_, a); };
                const double sgn = x > 0.0 ? 1.0 : -1.0;
                auto r = integrate([&](double a) { return f(sgn * a); }, 0.0, ax, {1e-14, 1e-13, 2000});
                require_converged(r, "y_n");
                return sgn * (nu + 1.0) * r.value;
            }
        }
    }

    double y_n_prime(double x) const { return (m_.nu + 1.0) / d_n(x); }

    // Inverse of y_n: bracket by doubling, bisection, then Newton polish.
    double w_n(double y, double guess = 0.0) const {
        if (y == 0.0) return 0.0;
        const double ay = std::fabs(y);
        const double s = y > 0.0 ? 1.0 : -1.0;
        if (m_.kind == SdeKind::power) return s * invert_power(ay, guess * s);
        double lo = 0.0, hi = std::max(w_limit(m_.nu, ay), 1e-300);
        while (std::fabs(y_n(hi)) < ay) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) throw ModelError("w_n: Y_N does not reach the target");
        }
        double x = (guess * s > lo && guess * s < hi) ? guess * s : 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double r = std::fabs(y_n(x)) - ay;
            if (r == 0.0) break;
            if (r > 0.0) hi = x;
            else lo = x;
            double nx = x - r / y_n_prime(x);
            if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
            const bool done = std::fabs(nx - x) <= 1e-14 * nx || hi - lo <= 1e-15 * hi;
            x = nx;
            if (done) break;
        }
        return s * x;
    }

    double q_n(double y) const {
        const double nu = m_.nu;
        return (nu + 1.0) * (nu + 1.0) / d_n(w_n(y));
    }

    double a_n(double y) const {
        const double nu = m_.nu;
        return (nu + 2.0) * std::pow(std::fabs(y), -nu / (nu + 1.0)) / (2.0 * d_n(w_n(y)));
    }

    // Check that Y_N is strictly increasing on a sample grid; throws ModelError otherwise.
    void check_monotone(double xmax = 10.0, int n = 400) const {
        double prev = y_n(-xmax);
        for (int i = 1; i <= n; ++i) {
            const double x = -xmax + 2.0 * xmax * i / n;
            const double v = y_n(x);
            if (!(v > prev)) {
                std::ostringstream os;
                os << "Y_N not strictly increasing near x = " << x;
                throw ModelError(os.str());
            }
            prev = v;
        }
    }

private:
    // x^{nu+1} + k x = y on x > 0. Newton on a convex increasing function
    // never leaves (0, inf) and is monotone after the first step.
    double invert_power(double ay, double guess) const {
        const double nu = m_.nu, k = (nu + 1.0) * eps_;
        double x = guess > 0.0 ? guess : std::min(ay / k, std::pow(ay, 1.0 / (nu + 1.0)));
        for (int it = 0; it < 100; ++it) {
            const double xn = detail::pow_nonneg(x, nu);
            const double step = (xn * x + k * x - ay) / ((nu + 1.0) * xn + k);
            x -= step;
            if (std::fabs(step) <= 1e-14 * x) break;
        }
        return x;
    }

    SdeModel m_;
    double N_;
    double eps_ = 0.0;
    double h_ = 0.0;
};

// Walk coordinates with prefix sums tabulated on |n| <= n_max.
class DiscreteMap {
public:
    DiscreteMap(RateModel r, std::int64_t n_max) : r_(std::move(r)), n_max_(n_max) {
        if (n_max < 2) throw ModelError("DiscreteMap: n_max must be >= 2");
        const double k = 0.5 * (r_.nu + 1.0);
        pos_.assign(static_cast<std::size_t>(n_max + 2), 0.0);
        neg_.assign(static_cast<std::size_t>(n_max + 2), 0.0);
        for (std::int64_t n = 1; n <= n_max + 1; ++n) {
            const double cp = r_.up(n - 1), cm = r_.up(-n);
            if (!(cp > 0.0) || !(cm > 0.0)) throw ModelError("DiscreteMap: rates must be positive");
            pos_[n] = pos_[n - 1] + k / cp;
            neg_[n] = neg_[n - 1] + k / cm;
        }
    }

    MapKind kind() const { return MapKind::discrete; }
    const RateModel& rates() const { return r_; }
    std::int64_t n_max() const { return n_max_; }
    double nu() const { return r_.nu; }

    double y_hat(std::int64_t n) const {
        check(n);
        return n >= 0 ? pos_[static_cast<std::size_t>(n)] : -neg_[static_cast<std::size_t>(-n)];
    }

    // Predictable quadratic variation rate of Y^(X) at n.
    double q_hat(std::int64_t n) const {
        const double up = y_hat(n + 1) - y_hat(n), dn = y_hat(n) - y_hat(n - 1);
        return r_.up(n) * up * up + r_.down(n) * dn * dn;
    }

    // L_R |Y^|^{(nu+2)/(nu+1)} at n.
    double a_hat(std::int64_t n) const {
        const double p = (r_.nu + 2.0) / (r_.nu + 1.0);
        const double f0 = std::pow(std::fabs(y_hat(n)), p);
        return r_.down(n) * (std::pow(std::fabs(y_hat(n - 1)), p) - f0) +
               r_.up(n) * (std::pow(std::fabs(y_hat(n + 1)), p) - f0);
    }

    // Generator applied to Y^; identically zero for a harmonic map.
    double generator_on_y(std::int64_t n) const {
        return r_.down(n) * (y_hat(n - 1) - y_hat(n)) + r_.up(n) * (y_hat(n + 1) - y_hat(n));
    }

    // Lattice point n with Y^(n) <= y < Y^(n+1).
    std::int64_t w_hat(double y) const {
        std::int64_t lo = -n_max_, hi = n_max_;
        if (y < y_hat(lo) || y >= y_hat(hi)) throw NumericError("w_hat: argument outside tabulated range");
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (y_hat(mid) <= y) lo = mid;
            else hi = mid;
        }
        return lo;
    }

    // Rescaled maps: x on N^{-1/(nu+2)} Z, y on N^{-(nu+1)/(nu+2)} Y^(Z).
    double y_n(double N, std::int64_t n) const { return std::pow(N, -(r_.nu + 1.0) / (r_.nu + 2.0)) * y_hat(n); }
    double q_n(double N, std::int64_t n) const { return std::pow(N, -r_.nu / (r_.nu + 2.0)) * q_hat(n); }
    double a_n(std::int64_t n) const { return a_hat(n); }

private:
    void check(std::int64_t n) const {
        if (n > n_max_ + 1 || n < -n_max_ - 1) {
            std::ostringstream os;
            os << "DiscreteMap: |n| = " << n << " beyond tabulated range " << n_max_;
            throw NumericError(os.str());
        }
    }

    RateModel r_;
    std::int64_t n_max_;
    std::vector<double> pos_, neg_;
};

}  // namespace scalediff
