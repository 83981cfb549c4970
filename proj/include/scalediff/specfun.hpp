#pragma once

// Real-order special functions for orders in (-1, 1).
//
// J_alpha and e^{-z} I_alpha use the ascending series below
// series_switch and the Hankel large-argument expansion above it.
// e^{z} K_alpha is a trapezoid sum of the cosh integral representation,
// which converges geometrically for every z > 0.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scalediff {

struct SpecFunAccuracy {
    double rel_tol = 1e-12;
    double series_switch = 15.0;
    int max_series_terms = 600;

    void validate() const {
        if (!(rel_tol > 0.0) || !(series_switch > 0.0) || max_series_terms < 1)
            throw std::invalid_argument("SpecFunAccuracy: rel_tol, series_switch must be > 0 and max_series_terms >= 1");
    }
};

namespace detail {

inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline void check_order(double alpha) {
    if (!(alpha > -1.0 && alpha < 1.0))
        throw std::domain_error("Bessel order must lie in (-1, 1), got " + std::to_string(alpha));
}

inline void check_arg(double z) {
    if (!(z >= 0.0)) throw std::domain_error("Bessel argument must be >= 0, got " + std::to_string(z));
}

}  // namespace detail

// log Gamma for x > 0 (Lanczos, g = 7).
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma requires x > 0");
    if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    const double xm = x - 1.0;
    double a = detail::kLanczos[0];
    const double t = xm + 7.5;
    for (int i = 1; i < 9; ++i) a += detail::kLanczos[i] / (xm + i);
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm + 0.5) * std::log(t) - t + std::log(a);
}

inline double gamma(double x) {
    if (!std::isfinite(x)) throw std::domain_error("gamma: non-finite argument");
    if (x <= 0.0 && x == std::floor(x)) throw std::domain_error("gamma: pole at nonpositive integer");
    if (x > 171.6) throw std::range_error("gamma: overflow");
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
    const double xm = x - 1.0;
    double a = detail::kLanczos[0];
    const double t = xm + 7.5;
    for (int i = 1; i < 9; ++i) a += detail::kLanczos[i] / (xm + i);
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, xm + 0.5) * std::exp(-t) * a;
}

namespace detail {

template <class R>
double reduced_series_sum(double alpha, double z, double sign, const SpecFunAccuracy& acc, bool drop_leading) {
    const R w = R(0.25) * R(z) * R(z);
    R term = R(1) / R(gamma(alpha + 1.0));
    R sum = drop_leading ? R(0) : term;
    if (drop_leading && z == 0.0) return 0.0;
    for (int k = 1; k <= acc.max_series_terms; ++k) {
        term *= R(sign) * w / (R(k) * (R(k) + R(alpha)));
        sum += term;
        const R at = term < R(0) ? -term : term;
        const R as = sum < R(0) ? -sum : sum;
        if (at <= R(1e-4 * acc.rel_tol) * as && k > 0.5 * z) return static_cast<double>(sum);
    }
    throw std::runtime_error("bessel series: max_series_terms exhausted");
}

}  // namespace detail

// (z/2)^{-alpha} J_alpha(z) (sign = -1) or (z/2)^{-alpha} I_alpha(z) (sign = +1)
// by the ascending series; entire in z, so finite at z = 0. With
// drop_leading the constant term 1/Gamma(alpha+1) is left out.
// The alternating J sum cancels about e^z / z of its magnitude; above z = 8
// it is summed in quad precision where available.
inline double bessel_reduced_series(double alpha, double z, double sign, const SpecFunAccuracy& acc = {},
                                    bool drop_leading = false) {
#if defined(__SIZEOF_FLOAT128__)
    if (sign < 0.0 && z > 8.0) return detail::reduced_series_sum<__float128>(alpha, z, sign, acc, drop_leading);
#endif
    return detail::reduced_series_sum<long double>(alpha, z, sign, acc, drop_leading);
}

inline double bessel_j_reduced(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    return bessel_reduced_series(alpha, z, -1.0, acc);
}

inline double bessel_i_reduced(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    return bessel_reduced_series(alpha, z, 1.0, acc);
}

inline double bessel_j_series(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    if (z == 0.0) {
        if (alpha == 0.0) return 1.0;
        return alpha > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::pow(0.5 * z, alpha) * bessel_j_reduced(alpha, z, acc);
}

inline double bessel_i_scaled_series(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    if (z == 0.0) {
        if (alpha == 0.0) return 1.0;
        return alpha > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::exp(alpha * std::log(0.5 * z) - z) * bessel_i_reduced(alpha, z, acc);
}

// Hankel expansion; sums terms until they stop shrinking or fall below tol.
inline double bessel_j_asymptotic(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    const double mu = 4.0 * alpha * alpha;
    double p = 1.0, q = 0.0;
    double ak = 1.0, prev = std::numeric_limits<double>::infinity();
    double zk = 1.0;
    for (int k = 1; k <= acc.max_series_terms; ++k) {
        ak *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        zk *= z;
        const double term = ak / zk;
        if (std::fabs(term) > prev) break;
        prev = std::fabs(term);
        const double s = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) p += s * term;
        else q += s * term;
        if (std::fabs(term) <= 1e-4 * acc.rel_tol) break;
    }
    const double omega = z - (0.5 * alpha + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(omega) - q * std::sin(omega));
}

inline double bessel_i_scaled_asymptotic(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    const double mu = 4.0 * alpha * alpha;
    double sum = 1.0, ak = 1.0, zk = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= acc.max_series_terms; ++k) {
        ak *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        zk *= z;
        const double term = ak / zk;
        if (std::fabs(term) > prev) break;
        prev = std::fabs(term);
        sum += (k % 2 == 0 ? term : -term);
        if (std::fabs(term) <= 1e-4 * acc.rel_tol) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

inline double bessel_j(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    detail::check_order(alpha);
    detail::check_arg(z);
    return z <= acc.series_switch ? bessel_j_series(alpha, z, acc) : bessel_j_asymptotic(alpha, z, acc);
}

// e^{-z} I_alpha(z).
inline double bessel_i_scaled(double alpha, double z, const SpecFunAccuracy& acc = {}) {
    detail::check_order(alpha);
    detail::check_arg(z);
    return z <= acc.series_switch ? bessel_i_scaled_series(alpha, z, acc)
                                  : bessel_i_scaled_asymptotic(alpha, z, acc);
}

// e^{z} K_alpha(z) = int_0^inf exp(-z (cosh t - 1)) cosh(alpha t) dt, z > 0.
inline double bessel_k_scaled(double alpha, double z) {
    detail::check_arg(z);
    if (z == 0.0) return std::numeric_limits<double>::infinity();
    const double h = std::min(0.2, 0.5 / std::sqrt(z));
    double sum = 0.5;
    for (int k = 1; k < 100000; ++k) {
        const double t = k * h;
        const double e = z * (std::cosh(t) - 1.0);
        const double term = std::exp(-e) * std::cosh(alpha * t);
        sum += term;
        if (e > 1.0 && term < 1e-18 * sum) break;
    }
    return h * sum;
}

}  // namespace scalediff
