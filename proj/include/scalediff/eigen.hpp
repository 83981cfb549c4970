#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "scalediff/specfun.hpp"

namespace scalediff {

using ComplexValue = std::complex<double>;

// Scaling order nu > 0 and the constants derived from it.
struct NuParam {
    double nu = 0.0;
    double beta = 0.0;      // (nu+1)/(nu+2), Bessel order
    double char_exp = 0.0;  // 1/(nu+2)
    double c = 0.0;         // nu/2 + 1, so the Bessel argument is |x|^c / c
    double u_nu = 0.0;
    double n_nu = 0.0;
    // Prefactors of the reduced-series form of e^{(nu)}.
    double e_re_scale = 0.0;
    double e_im_scale = 0.0;

    NuParam() = default;

    explicit NuParam(double nu_in) : nu(nu_in) {
        if (!(nu > 0.0) || !std::isfinite(nu))
            throw std::domain_error("NuParam: nu must be finite and > 0, got " + std::to_string(nu));
        beta = (nu + 1.0) / (nu + 2.0);
        char_exp = 1.0 / (nu + 2.0);
        c = 0.5 * nu + 1.0;
        const double g = gamma(char_exp);
        u_nu = g * std::pow(nu + 2.0, -beta);
        n_nu = std::pow(2.0, beta) * g * std::pow(nu + 2.0, -nu / (nu + 2.0));
        e_re_scale = g;  // u_nu (2c)^beta = Gamma(1 - beta) = Gamma(char_exp)
        e_im_scale = u_nu * std::pow(2.0 * c, -beta);
    }
};

// e^{(nu)}(x) = u_nu |x|^{(nu+1)/2} [J_{-beta}(z) + i sgn(x) J_beta(z)], z = |x|^c / c.
inline ComplexValue e_nu(const NuParam& p, double x, const SpecFunAccuracy& acc = {}) {
    if (x == 0.0) return {1.0, 0.0};
    const double ax = std::fabs(x);
    const double s = x > 0.0 ? 1.0 : -1.0;
    const double z = std::pow(ax, p.c) / p.c;
    if (z <= acc.series_switch) {
        const double re = p.e_re_scale * bessel_j_reduced(-p.beta, z, acc);
        const double im = s * p.e_im_scale * std::pow(ax, p.nu + 1.0) * bessel_j_reduced(p.beta, z, acc);
        return {re, im};
    }
    const double pref = p.u_nu * std::pow(ax, 0.5 * (p.nu + 1.0));
    return {pref * bessel_j_asymptotic(-p.beta, z, acc), s * pref * bessel_j_asymptotic(p.beta, z, acc)};
}

// e^{(nu)}(x) - 1 without the cancellation near x = 0.
inline ComplexValue e_nu_minus_one(const NuParam& p, double x, const SpecFunAccuracy& acc = {}) {
    if (x == 0.0) return {0.0, 0.0};
    const double ax = std::fabs(x);
    const double z = std::pow(ax, p.c) / p.c;
    if (z <= acc.series_switch) {
        const double re = p.e_re_scale * bessel_reduced_series(-p.beta, z, -1.0, acc, true);
        const double im = (x > 0.0 ? 1.0 : -1.0) * p.e_im_scale * std::pow(ax, p.nu + 1.0) * bessel_j_reduced(p.beta, z, acc);
        return {re, im};
    }
    return e_nu(p, x, acc) - 1.0;
}

inline ComplexValue e_q(const NuParam& p, double q, double x, const SpecFunAccuracy& acc = {}) {
    return e_nu(p, q * x, acc);
}

// f_q(y) = e_q(sgn(y)|y|^{1/(nu+1)}).
inline ComplexValue f_q(const NuParam& p, double q, double y, const SpecFunAccuracy& acc = {}) {
    const double x = std::copysign(std::pow(std::fabs(y), 1.0 / (p.nu + 1.0)), y);
    return e_q(p, q, x, acc);
}

}  // namespace scalediff
