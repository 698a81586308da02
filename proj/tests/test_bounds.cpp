#include "ergobound/bounds.hpp"
#include "ergobound/errors.hpp"
#include "ergobound/ergodicity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ergobound;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(HoeffdingBound, ExactRationalExponent) {
    const auto r = hoeffding_bound({100, 0.5, 1, 4});
    ASSERT_TRUE(r.valid);
    const double exponent = -3528.0 / 8181.0;
    EXPECT_NEAR(*r.exponent / exponent, 1.0, 1e-12);
    EXPECT_NEAR(*r.bound / std::exp(exponent), 1.0, 1e-12);
    EXPECT_NEAR(*r.theta_star / (168.0 / 8181.0), 1.0, 1e-12);
    EXPECT_NEAR(*r.bound, 0.64970, 5e-6);
    EXPECT_DOUBLE_EQ(r.threshold, 16.0);
}

TEST(HoeffdingBound, ThresholdIsExcluded) {
    const auto r = hoeffding_bound({16, 0.5, 1, 4});
    EXPECT_FALSE(r.valid);
    EXPECT_FALSE(r.bound);
    EXPECT_FALSE(r.exponent);
    EXPECT_DOUBLE_EQ(r.threshold, 16.0);
    EXPECT_DOUBLE_EQ(r.effective(), 1.0);
    EXPECT_TRUE(hoeffding_bound({16.000001, 0.5, 1, 4}).valid);
}

TEST(HoeffdingBound, RejectsNonpositiveInputs) {
    EXPECT_THROW(hoeffding_bound({-1, 0.5, 1, 4}), DomainError);
    EXPECT_THROW(hoeffding_bound({100, 0, 1, 4}), DomainError);
    EXPECT_THROW(hoeffding_bound({100, 0.5, -1, 4}), DomainError);
    EXPECT_THROW(hoeffding_bound({100, 0.5, 1, 0}), DomainError);
}

TEST(ValidityThreshold, Values) {
    EXPECT_DOUBLE_EQ(validity_threshold(0.5, 1, 4), 16.0);
    for (double eps : {0.05, 0.3}) {
        EXPECT_DOUBLE_EQ(validity_threshold(eps, 1, 2 * 1.0), 4.0 / eps);
        EXPECT_DOUBLE_EQ(validity_threshold(eps, std::exp(0.0), 4), 8.0 / eps);
    }
}

TEST(JacobiBound, ArithmeticOracle) {
    const auto r = jacobi_occupation_bound(100, 0.5, 1.0);
    EXPECT_NEAR(*r.exponent / (-4232.0 / 2525.0), 1.0, 1e-12);
    EXPECT_NEAR(*r.bound / std::exp(-4232.0 / 2525.0), 1.0, 1e-12);
}

TEST(JacobiBound, IdenticalToGeneralBound) {
    for (double t : {50.0, 200.0, 1000.0}) {
        for (double tav : {0.5, 1.0, 1.7}) {
            const auto a = jacobi_occupation_bound(t, 0.2, tav);
            const auto b = hoeffding_bound({t, 0.2, 1.0, 2.0 * tav});
            EXPECT_EQ(a.valid, b.valid);
            EXPECT_EQ(a.threshold, b.threshold);
            if (a.valid) {
                EXPECT_EQ(*a.exponent, *b.exponent);
                EXPECT_EQ(*a.bound, *b.bound);
            }
        }
    }
}

TEST(JacobiBound, FedByEigentime) {
    const double tav = eigentime(EigenSequence::jacobi(2.0, 2.0)).value;
    EXPECT_NEAR(*jacobi_occupation_bound(100, 0.5, tav).bound, *jacobi_occupation_bound(100, 0.5, 1.0).bound, 1e-8);
}

TEST(TanOUBound, ConstantObservableReduction) {
    const auto r = tanou_expfunc_bound(100, 0.5, 0.0);
    const auto h = hoeffding_bound({100, 0.5, 1, 4});
    EXPECT_DOUBLE_EQ(r.t_av, 2.0);
    EXPECT_EQ(*r.result.bound, *h.bound);
    EXPECT_NEAR(r.centering_rate, 1.0, 1e-12);
}

TEST(TanOUBound, CenteringModes) {
    const auto c = tanou_expfunc_bound(1000, 1.0, 1.0, ConstantMode::corrected);
    const auto p = tanou_expfunc_bound(1000, 1.0, 1.0, ConstantMode::literal);
    EXPECT_NEAR(c.centering_rate, std::cosh(kPi / 2) / 2, 1e-10);
    EXPECT_NEAR(p.centering_rate, std::cosh(kPi / 2), 1e-12);
    EXPECT_NEAR(c.centering, 1000 * c.centering_rate, 1e-9);
    EXPECT_NEAR(c.centering_rate, 1.2545893, 1e-7);
    EXPECT_NEAR(p.centering_rate, 2.5091785, 1e-7);
}

TEST(TanOUBound, NormModesDifferOnlyForNegativeU) {
    EXPECT_DOUBLE_EQ(tanou_expfunc_bound(1000, 1, 1.0).f_norm, tanou_expfunc_bound(1000, 1, 1.0, ConstantMode::literal).f_norm);
    EXPECT_NEAR(tanou_expfunc_bound(1000, 1, -1.0).f_norm, std::exp(kPi / 2), 1e-12);
    EXPECT_NEAR(tanou_expfunc_bound(1000, 1, -1.0, ConstantMode::literal).f_norm, std::exp(-kPi / 2), 1e-12);
}

TEST(Monotonicity, DecreasingInHorizon) {
    for (const BoundQuery base : {BoundQuery{0, 0.5, 1, 4}, BoundQuery{0, 0.1, 1, 2}, BoundQuery{0, 1.0, 4.81, 4},
                                  BoundQuery{0, 0.05, 2, 3.3}}) {
        const double th = validity_threshold(base.eps, base.f_norm, base.q_norm);
        double prev = 1.0;
        for (int i = 1; i <= 100; ++i) {
            BoundQuery q = base;
            q.t = th * (1.0 + 0.1 * i);
            const double b = *hoeffding_bound(q).bound;
            EXPECT_LT(b, prev) << "t=" << q.t;
            prev = b;
        }
    }
}

TEST(Monotonicity, DecreasingInDeviation) {
    for (double t : {200.0, 1000.0}) {
        double prev = 1.0;
        for (int i = 0; i < 100; ++i) {
            const double eps = 0.1 + 0.01 * i;
            const auto r = hoeffding_bound({t, eps, 1, 4});
            ASSERT_TRUE(r.valid);
            EXPECT_LT(*r.bound, prev);
            prev = *r.bound;
        }
    }
}

TEST(Monotonicity, NondecreasingInKernelNorm) {
    double prev = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto r = hoeffding_bound({1000, 0.5, 1, 1.0 + 0.1 * i});
        ASSERT_TRUE(r.valid);
        EXPECT_GE(*r.bound, prev);
        EXPECT_GT(*r.theta_star, 0.0);
        prev = *r.bound;
    }
}

TEST(BoundJson, Fields) {
    const auto j = to_json(hoeffding_bound({10, 0.5, 1, 4}));
    EXPECT_EQ(j["valid"], false);
    EXPECT_EQ(j["threshold"], 16.0);
    EXPECT_TRUE(j["bound"].is_null());
}
