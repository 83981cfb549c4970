#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "scalediff/eigen.hpp"
#include "scalediff/errors.hpp"

namespace scalediff {

enum class SdeKind { power, shifted, custom };

// Diffusion coefficient D for L_D = 1/2 d/dx D(x) d/dx.
//   power:   D(x) = 1 / (epsilon + |x|^nu)
//   shifted: D(x) = 1 / (1 + |x|)^nu
//   custom:  user supplied, assumed even with D ~ |x|^{-nu} at infinity
// Rescaling by N gives D_N(x) = N^{nu/(nu+2)} D(N^{1/(nu+2)} x).
struct SdeModel {
    double nu = 2.0;
    double epsilon = 1.0;
    SdeKind kind = SdeKind::power;
    std::function<double(double)> D;

    static SdeModel power(double nu, double epsilon = 1.0) {
        if (!(nu > 0.0)) throw ModelError("SdeModel: nu must be > 0");
        if (!(epsilon > 0.0)) throw ModelError("SdeModel: epsilon must be > 0");
        SdeModel m;
        m.nu = nu;
        m.epsilon = epsilon;
        m.kind = SdeKind::power;
        m.D = [nu, epsilon](double x) { return 1.0 / (epsilon + std::pow(std::fabs(x), nu)); };
        return m;
    }

    static SdeModel shifted(double nu) {
        if (!(nu > 0.0)) throw ModelError("SdeModel: nu must be > 0");
        SdeModel m;
        m.nu = nu;
        m.epsilon = 0.0;
        m.kind = SdeKind::shifted;
        m.D = [nu](double x) { return std::pow(1.0 + std::fabs(x), -nu); };
        return m;
    }

    static SdeModel custom(double nu, std::function<double(double)> d) {
        if (!(nu > 0.0)) throw ModelError("SdeModel: nu must be > 0");
        SdeModel m;
        m.nu = nu;
        m.epsilon = 0.0;
        m.kind = SdeKind::custom;
        m.D = std::move(d);
        return m;
    }

    // Core length scale N^{-1/(nu+2)} of the rescaled coefficient.
    double core_scale(double N) const { return std::pow(N, -1.0 / (nu + 2.0)); }

    double d_n(double N, double x) const {
        if (kind == SdeKind::power) return 1.0 / (epsilon * std::pow(N, -nu / (nu + 2.0)) + std::pow(std::fabs(x), nu));
        if (kind == SdeKind::shifted) return std::pow(core_scale(N) + std::fabs(x), -nu);
        return std::pow(N, nu / (nu + 2.0)) * D(std::pow(N, 1.0 / (nu + 2.0)) * x);
    }

    // d/dx D_N(x); closed form for the built-in families.
    double d_n_prime(double N, double x) const {
        const double s = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        const double ax = std::fabs(x);
        if (kind == SdeKind::power) {
            const double den = epsilon * std::pow(N, -nu / (nu + 2.0)) + std::pow(ax, nu);
            return -nu * s * std::pow(ax, nu - 1.0) / (den * den);
        }
        if (kind == SdeKind::shifted) return -nu * s * std::pow(core_scale(N) + ax, -nu - 1.0);
        const double h = 1e-6 * std::max(core_scale(N), ax);
        return (d_n(N, x + h) - d_n(N, x - h)) / (2.0 * h);
    }
};

// Nearest-neighbour jump rates on Z with bond symmetry R_n^+ = R_{n+1}^-.
// The model stores the bond rate c_n = R_n^+ of the bond (n, n+1).
struct RateModel {
    double nu = 2.0;
    std::function<double(std::int64_t)> rate_fn;
    std::string correction;

    // c_n = 1 / (|n|^nu + |n+1|^nu); c_0 = c_{-1} = 1.
    static RateModel standard(double nu) {
        if (!(nu > 0.0)) throw ModelError("RateModel: nu must be > 0");
        RateModel r;
        r.nu = nu;
        r.rate_fn = [nu](std::int64_t n) {
            return 1.0 / (std::pow(std::fabs(static_cast<double>(n)), nu) +
                          std::pow(std::fabs(static_cast<double>(n + 1)), nu));
        };
        r.correction = "c_n - 1/(2|n|^nu) = -nu sgn(n)/(4 |n|^{nu+1}) + O(|n|^{-nu-2})";
        return r;
    }

    double up(std::int64_t n) const { return rate_fn(n); }
    double down(std::int64_t n) const { return rate_fn(n - 1); }
};

}  // namespace scalediff
