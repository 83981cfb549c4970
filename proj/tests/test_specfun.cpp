#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "scalediff/specfun.hpp"

using namespace scalediff;

namespace {

struct OracleRow {
    double alpha, z, j, i_scaled, k_scaled;
};

// alpha z J_alpha(z) e^{-z}I_alpha(z) e^{z}K_alpha(z), 30-digit mpmath values.
std::vector<OracleRow> load_oracle() {
    std::ifstream in(SCALEDIFF_TEST_DATA "/bessel_oracle.txt");
    std::vector<OracleRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        OracleRow r{};
        if (ss >> r.alpha >> r.z >> r.j >> r.i_scaled >> r.k_scaled) rows.push_back(r);
    }
    return rows;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST(Gamma, ClassicalValues) {
    EXPECT_NEAR(scalediff::gamma(0.5), std::sqrt(std::numbers::pi), 1e-14);
    EXPECT_NEAR(scalediff::gamma(5.0), 24.0, 1e-12);
    EXPECT_LT(rel(scalediff::gamma(0.25), 3.6256099082219083119), 1e-13);
    EXPECT_LT(rel(scalediff::gamma(-0.5), -2.0 * std::sqrt(std::numbers::pi)), 1e-13);
}

TEST(Gamma, PolesThrow) {
    EXPECT_THROW(scalediff::gamma(0.0), std::domain_error);
    EXPECT_THROW(scalediff::gamma(-2.0), std::domain_error);
}

TEST(Bessel, HalfOrderClosedForms) {
    const double pi = std::numbers::pi;
    EXPECT_NEAR(bessel_j(0.5, pi / 2), 2.0 / pi, 1e-12);
    EXPECT_NEAR(bessel_j(-0.5, pi), -std::sqrt(2.0) / pi, 1e-12);
    // I_{1/2}(z) = sqrt(2/(pi z)) sinh z
    EXPECT_NEAR(bessel_i_scaled(0.5, 2.0), (1.0 - std::exp(-4.0)) / (2.0 * std::sqrt(pi)), 1e-12);
    EXPECT_EQ(bessel_i_scaled(0.3, 0.0), 0.0);
    for (double z : {0.3, 7.0, 14.0, 16.0, 40.0, 200.0}) {
        EXPECT_NEAR(bessel_j(0.5, z), std::sqrt(2.0 / (pi * z)) * std::sin(z), 1e-12) << z;
        EXPECT_NEAR(bessel_j(-0.5, z), std::sqrt(2.0 / (pi * z)) * std::cos(z), 1e-12) << z;
    }
}

TEST(Bessel, FrozenValues) {
    EXPECT_LT(rel(bessel_j(0.75, 7.3), 0.17787435314696110632), 1e-10);
    EXPECT_LT(rel(bessel_i_scaled(-0.75, 50.0), 0.056241132439871836594), 1e-10);
    // leading asymptotic term, first correction is O(1/z)
    EXPECT_NEAR(bessel_i_scaled(-0.75, 50.0) * std::sqrt(2.0 * std::numbers::pi * 50.0), 1.0, 0.01);
}

TEST(Bessel, OracleTable) {
    const auto rows = load_oracle();
    ASSERT_GE(rows.size(), 80u);
    for (const auto& r : rows) {
        // J near its zeros: compare on the scale of its envelope
        const double env = std::min(1.0, std::sqrt(2.0 / (std::numbers::pi * r.z)));
        EXPECT_LT(std::fabs(bessel_j(r.alpha, r.z) - r.j), 1e-11 * std::max(env, std::fabs(r.j)))
            << "J alpha=" << r.alpha << " z=" << r.z;
        EXPECT_LT(rel(bessel_i_scaled(r.alpha, r.z), r.i_scaled), 1e-11) << "I alpha=" << r.alpha << " z=" << r.z;
        if (r.z >= 0.5) {
            EXPECT_LT(rel(bessel_k_scaled(r.alpha, r.z), r.k_scaled), 1e-10) << "K alpha=" << r.alpha << " z=" << r.z;
        }
    }
}

TEST(Bessel, BranchesAgreeAtSwitch) {
    for (double a : {-0.8, -0.25, 0.4, 0.9}) {
        for (double z : {14.0, 15.0, 18.0}) {
            const double s = bessel_i_scaled_series(a, z), as = bessel_i_scaled_asymptotic(a, z);
            EXPECT_LT(rel(s, as), 1e-11) << a << ' ' << z;
            EXPECT_NEAR(bessel_j_series(a, z), bessel_j_asymptotic(a, z), 1e-11) << a << ' ' << z;
        }
    }
}

TEST(Bessel, Wronskian) {
    // I_{-a} - I_a = (2/pi) sin(a pi) K_a
    for (double a : {0.2, 0.6, 0.75}) {
        for (double z : {0.7, 3.0, 12.0, 40.0}) {
            const double lhs = bessel_i_scaled(-a, z) - bessel_i_scaled(a, z);
            const double rhs = 2.0 / std::numbers::pi * std::sin(a * std::numbers::pi) * bessel_k_scaled(a, z) *
                               std::exp(-2.0 * z);
            EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::fabs(bessel_i_scaled(a, z)))) << a << ' ' << z;
        }
    }
}

TEST(Bessel, DomainErrors) {
    EXPECT_THROW(bessel_j(1.0, 1.0), std::domain_error);
    EXPECT_THROW(bessel_j(0.5, -1.0), std::domain_error);
    EXPECT_THROW(bessel_i_scaled(-1.2, 1.0), std::domain_error);
    EXPECT_TRUE(std::isinf(bessel_j(-0.5, 0.0)));
    SpecFunAccuracy bad;
    bad.max_series_terms = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}
