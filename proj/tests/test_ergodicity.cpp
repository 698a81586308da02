#include "ergobound/errors.hpp"
#include "ergobound/ergodicity.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace ergobound;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mao-class coefficients without the closed-form tag, so gamma <= 2 is allowed.
DiffusionSpec untagged_mao(double gamma) {
    return DiffusionSpec({0.0, kInf, Boundary::reflecting, Boundary::inaccessible}, [](double) { return 0.0; },
                         [gamma](double x) { return 2.0 * std::pow(1.0 + x, gamma); });
}

} // namespace

TEST(IntegralCondition, MaoClassGoldenValues) {
    for (double g : {3.0, 4.0}) {
        const auto r = integral_condition(DiffusionSpec::mao_class(g));
        ASSERT_FALSE(r.divergent);
        EXPECT_NEAR(r.value, 1.0 / ((g - 1.0) * (g - 2.0)), 1e-6) << "gamma=" << g;
    }
}

TEST(IntegralCondition, NearDivergenceStress) {
    const auto r = integral_condition(DiffusionSpec::mao_class(2.05));
    ASSERT_FALSE(r.divergent);
    const double want = 1.0 / (1.05 * 0.05);
    EXPECT_NEAR(r.value / want, 1.0, 1e-4);
}

TEST(IntegralCondition, GammaTwoDiverges) {
    EXPECT_TRUE(integral_condition(untagged_mao(2.0)).divergent);
    EXPECT_TRUE(integral_condition(untagged_mao(1.5)).divergent);
}

TEST(IntegralCondition, UntaggedMatchesTagged) {
    EXPECT_NEAR(integral_condition(untagged_mao(3.0)).value, 0.5, 1e-6);
}

TEST(IntegralCondition, ReferencePointInvariance) {
    const auto spec = DiffusionSpec::mao_class(3.5);
    const double a = integral_condition(spec.without_closed_form()).value;
    const double b = integral_condition(spec.without_closed_form().with_reference_point(7.0)).value;
    EXPECT_NEAR(a, b, 1e-9);
}

TEST(IntegralCondition, RequiresReflectingLowerBoundary) {
    EXPECT_THROW(integral_condition(DiffusionSpec::jacobi(1, 2, 2)), InapplicableError);
    EXPECT_THROW(integral_condition(DiffusionSpec::tan_ou(0.5)), InapplicableError);
}

TEST(Eigentime, GoldenValues) {
    EXPECT_NEAR(eigentime(EigenSequence::tan_ou(0.5)).value, 2.0, 1e-9);
    EXPECT_NEAR(eigentime(EigenSequence::jacobi(2.0, 2.0)).value, 1.0, 1e-9);
    EXPECT_NEAR(eigentime(EigenSequence::jacobi(1.0, 2.0)).value, std::numbers::pi * std::numbers::pi / 6.0, 1e-9);
}

TEST(Eigentime, UncertaintyBracketsTrueValue) {
    const auto r = eigentime(EigenSequence::jacobi(2.0, 2.0), 1e-6);
    EXPECT_LE(r.uncertainty, 1e-6);
    EXPECT_LE(r.value, 1.0 + 1e-15);
    EXPECT_GE(r.value + r.uncertainty, 1.0 - 1e-15);
}

TEST(Eigentime, JacobiAgreesWithDigammaOracle) {
    for (double s2 : {0.5, 1.0, 2.0}) {
        for (double b : {1.0, 2.0, 5.0}) {
            const double want = oracle::jacobi_eigentime(b, s2);
            EXPECT_NEAR(eigentime(EigenSequence::jacobi(b, s2), 1e-8).value, want, 1e-7) << s2 << "," << b;
        }
    }
}

TEST(Eigentime, NondecreasingAsToleranceShrinks) {
    const auto seq = EigenSequence::jacobi(3.0, 1.5);
    double prev = 0.0;
    for (double tol : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
        const double v = eigentime(seq, tol).value;
        EXPECT_GE(v, prev - 1e-15);
        prev = v;
    }
}

TEST(Eigentime, EnvelopeDominatesTail) {
    for (const auto& seq : {EigenSequence::jacobi(2.0, 2.0), EigenSequence::tan_ou(0.5), EigenSequence::tan_ou(2.0)}) {
        for (std::size_t n : {1u, 10u, 1000u}) {
            double tail = 0.0;
            for (std::size_t i = 2'000'000; i > n; --i) tail += 1.0 / seq.eval(i);
            EXPECT_GE(seq.tail_envelope(n), tail);
            EXPECT_GE(seq.tail_envelope(n), seq.tail_envelope(n + 1));
        }
    }
}

TEST(Eigentime, DivergentSeriesIsReported) {
    EigenSequence harmonic;
    harmonic.eval = [](std::size_t i) { return static_cast<double>(i); };
    harmonic.tail_envelope = [](std::size_t) { return kInf; };
    EXPECT_THROW(eigentime(harmonic), NumericalError);

    EigenSequence bad;
    bad.eval = [](std::size_t i) { return i == 3 ? 0.5 : static_cast<double>(i * i); };
    bad.tail_envelope = [](std::size_t n) { return 1.0 / static_cast<double>(n); };
    EXPECT_THROW(eigentime(bad), DomainError);
}

TEST(QSharpNorm, TwiceEigentime) {
    EXPECT_DOUBLE_EQ(q_sharp_norm_bound(2.0), 4.0);
    EXPECT_DOUBLE_EQ(q_sharp_norm_bound(1.0), 2.0);
    EXPECT_DOUBLE_EQ(q_sharp_norm_bound(std::numbers::pi * std::numbers::pi / 6), std::numbers::pi * std::numbers::pi / 3);
}

TEST(Assess, JacobiSpectral) {
    const auto spec = DiffusionSpec::jacobi(1, 2, 2);
    const auto r = assess(spec, eigen_sequence_for(spec));
    EXPECT_EQ(r.verdict, Verdict::uniformly_ergodic);
    EXPECT_EQ(r.method, Method::spectral_test);
    ASSERT_TRUE(r.t_av);
    EXPECT_NEAR(r.t_av->value, 1.0, 1e-9);
    EXPECT_NEAR(*r.q_sharp_norm_bound, 2.0, 2e-9);
    EXPECT_FALSE(r.integral_note.empty());
}

TEST(Assess, MaoClassIntegral) {
    const auto r = assess(DiffusionSpec::mao_class(3.0), std::nullopt);
    EXPECT_EQ(r.verdict, Verdict::uniformly_ergodic);
    EXPECT_EQ(r.method, Method::integral_test);
    EXPECT_NEAR(r.integral->value, 0.5, 1e-6);
    EXPECT_EQ(to_json(r)["verdict"], "uniformly_ergodic");
}

TEST(Assess, DivergentIntegralGivesNegativeVerdict) {
    const auto r = assess(untagged_mao(2.0), std::nullopt);
    EXPECT_EQ(r.verdict, Verdict::not_uniformly_ergodic);
    EXPECT_EQ(to_json(r)["integral_value"]["divergent"], true);
}

TEST(Assess, NothingApplicableIsInconclusive) {
    const DiffusionSpec spec({-1.0, 1.0}, [](double x) { return -x; }, [](double x) { return 1.0 - x * x; });
    const auto r = assess(spec, std::nullopt);
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    EXPECT_EQ(r.method, Method::none);
}

TEST(Assess, CriteriaAgreeWhenBothApply) {
    // Jacobi coefficients with a reflecting lower boundary carry both tests.
    for (const auto& [a, b, s2] : {std::tuple{0.25, 2.0, 2.0}, std::tuple{0.5, 3.0, 2.0}, std::tuple{0.3, 1.0, 1.0}}) {
        const auto spec = DiffusionSpec::jacobi(a, b, s2).with_boundaries(Boundary::reflecting, Boundary::inaccessible);
        const auto r = assess(spec, EigenSequence::jacobi(b, s2));
        EXPECT_EQ(r.method, Method::both) << r.integral_note;
        EXPECT_EQ(r.verdict, Verdict::uniformly_ergodic);
    }
}
