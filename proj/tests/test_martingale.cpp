#include <gtest/gtest.h>

#include <cmath>

#include "scalediff/martingale.hpp"
#include "scalediff/processes.hpp"

using namespace scalediff;

TEST(Coordinates, LimitMaps) {
    EXPECT_DOUBLE_EQ(y_limit(2.0, 2.0), 8.0);
    EXPECT_EQ(y_limit(2.0, 0.0), 0.0);
    for (double nu : {0.5, 2.0, 3.0})
        for (double x : {-7.0, -0.2, 0.0, 1.5, 40.0}) EXPECT_NEAR(w_limit(nu, y_limit(nu, x)), x, 1e-12 * std::max(1.0, std::fabs(x)));
}

TEST(Coordinates, ContinuumMap) {
    const ContinuumMap m(SdeModel::power(2.0), 1.0);
    EXPECT_DOUBLE_EQ(m.y_n(1.0), 4.0);
    EXPECT_DOUBLE_EQ(m.y_n(-1.0), -4.0);
    for (const SdeModel& model : {SdeModel::power(2.0), SdeModel::shifted(1.0), SdeModel::power(0.5)}) {
        for (double N : {1.0, 100.0, 1e4}) {
            const ContinuumMap c(model, N);
            c.check_monotone();
            for (double x : {-1e3, -3.0, -0.01, 0.0, 1e-3, 0.7, 250.0}) {
                EXPECT_NEAR(c.w_n(c.y_n(x)), x, 1e-10 * std::max(1.0, std::fabs(x))) << N << ' ' << x;
                if (x != 0.0) {
                    EXPECT_GT(c.a_n(c.y_n(x)), 0.0);
                }
            }
        }
    }
    EXPECT_THROW(ContinuumMap(SdeModel::power(2.0), 0.5), ModelError);
}

TEST(Coordinates, CustomMatchesClosedForm) {
    const double nu = 2.0, N = 10.0;
    const SdeModel p = SdeModel::power(nu);
    const SdeModel c = SdeModel::custom(nu, p.D);
    const ContinuumMap mp(p, N), mc(c, N);
    for (double x : {-2.0, 0.1, 0.9}) EXPECT_NEAR(mc.y_n(x), mp.y_n(x), 1e-11 * std::max(1.0, std::fabs(mp.y_n(x))));
    EXPECT_THROW(SdeModel::power(-1.0), ModelError);
}

TEST(Coordinates, LimitBound) {
    // |Y_N - Y| <= C N^{-1/(nu+2)} (N^{-nu/(nu+2)} + |x|^nu) with C independent of N
    const double nu = 2.0;
    std::vector<EnvelopeConstants> rows;
    for (double N : {10.0, 100.0, 1e3, 1e4}) rows.push_back(envelope_constants(ContinuumMap(SdeModel::power(nu), N), default_envelope_grid(61)));
    const auto s = envelope_spread(rows);
    EXPECT_LT(s[0], 3.0);
    for (const auto& r : rows) EXPECT_GT(1.0 / r.c3, 0.0);
}

TEST(Coordinates, DiscreteMap) {
    for (double nu : {1.0, 2.0}) {
        const DiscreteMap m(RateModel::standard(nu), 500);
        EXPECT_EQ(m.y_hat(0), 0.0);
        // increments (nu+1)/(2 c_n) on the bond n -> n+1, c_0 = 1
        EXPECT_DOUBLE_EQ(m.y_hat(1), (nu + 1.0) / 2.0);
        EXPECT_DOUBLE_EQ(m.y_hat(2) - m.y_hat(1), (nu + 1.0) / 2.0 * (1.0 + std::pow(2.0, nu)));
        for (std::int64_t n = -400; n <= 400; ++n) {
            EXPECT_NEAR(m.generator_on_y(n), 0.0, 1e-9 * std::max(1.0, std::fabs(m.y_hat(n))));
            ASSERT_LT(m.y_hat(n), m.y_hat(n + 1));
            EXPECT_EQ(m.w_hat(m.y_hat(n)), n);
        }
    }
    EXPECT_THROW(DiscreteMap(RateModel::standard(2.0), 1), ModelError);
}

TEST(Drift, LimitEnsembleAndNegativeControl) {
    const NuParam p(2.0);
    const PathEnsemble e = sample_limit_paths(p, 0.5, {0.0, 0.25, 0.5, 1.0}, 10000, 17);
    const DriftReport good = martingale_drift_test(e, 2.0);
    EXPECT_TRUE(good.pass()) << good.max_abs_t;
    const DriftReport bad = martingale_drift_test(e, 3.0);
    EXPECT_FALSE(bad.pass());
    EXPECT_THROW(martingale_drift_test(sample_limit_paths(p, 0.0, {0.0, 1.0}, 10, 1), 2.0), ConfigError);
}

TEST(Drift, CompensatedWalk) {
    const RateModel r = RateModel::standard(2.0);
    CtrwOptions o;
    o.seed = 23;
    o.record_compensator = true;
    const PathEnsemble e = sample_ctrw_paths(r, 100.0, 0, {0.0, 0.5, 1.0}, 4000, o);
    EXPECT_TRUE(compensated_drift_test(e, DiscreteMap(r, 2000)).pass());
    for (std::size_t i = 0; i < e.n_paths; ++i) EXPECT_GE(e.compensator[i * 3 + 2], e.compensator[i * 3 + 1]);
}

TEST(Hitting, MeanExitTime) {
    const NuParam p(2.0);
    HittingOptions o;
    o.seed = 29;
    o.step_fraction = 1e-3;
    const HittingEstimate h = hitting_time_mean(p, 2.0, 2000, o);
    EXPECT_DOUBLE_EQ(h.target, 8.0);
    EXPECT_EQ(h.unfinished, 0u);
    EXPECT_LT(std::fabs(h.mean - h.target), 3.0 * h.se + 0.05 * h.target);
}
