#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace schwarz;
using testing_support::Rng;

TEST(Family, Classification) {
    EXPECT_EQ(MobiusFamily::identity(-1).family_class(), FamilyClass::hyperbolic);
    EXPECT_EQ(MobiusFamily::identity(0).family_class(), FamilyClass::parabolic);
    EXPECT_EQ(MobiusFamily::identity(1).family_class(), FamilyClass::elliptic);
    EXPECT_STREQ(to_string(FamilyClass::elliptic), "elliptic");
    EXPECT_DOUBLE_EQ(MobiusFamily::identity(-2).exp_rate(), 2.0);
    EXPECT_DOUBLE_EQ(MobiusFamily::identity(2).tan_frequency(), 1.0);
}

TEST(Family, RejectsDegenerateParameters) {
    EXPECT_THROW(MobiusFamily(1, 2, 2, 4, 0), InvalidArgument);
    EXPECT_THROW(MobiusFamily(0, 0, 0, 0, 1), InvalidArgument);
    EXPECT_THROW(MobiusFamily(1, 0, 0, 1, std::nan("")), InvalidArgument);
    EXPECT_NO_THROW(MobiusFamily(1, 0, 1, -1, 0));
}

TEST(Family, DerivativesAgreeWithHandFormulas) {
    const MobiusFamily tan_family = MobiusFamily::identity(2.0);
    for (double t : {-1.0, 0.0, 0.4, 1.2}) {
        const auto d = family_derivatives(tan_family, t);
        const auto o = testing_support::tan_derivatives(t);
        for (int k = 0; k < 5; ++k) EXPECT_NEAR(d[k], o[k], 1e-11 * std::max(1.0, std::abs(o[k])));
    }
    const MobiusFamily e2 = MobiusFamily::identity(-2.0);  // e^{2t}
    for (double t : {-0.5, 0.0, 0.7}) {
        const auto d = family_derivatives(e2, t);
        for (int k = 0; k < 5; ++k) EXPECT_NEAR(d[k], std::pow(2.0, k) * std::exp(2 * t), 1e-12 * std::pow(2.0, k) * 5);
    }
    const MobiusFamily mob(2, 1, 1, 3, 0);  // (2t + 1)/(t + 3)
    const auto d = family_derivatives(mob, 0.5);
    EXPECT_NEAR(d[0], 2.0 / 3.5, 1e-15);
    EXPECT_NEAR(d[1], 5.0 / (3.5 * 3.5), 1e-15);
    EXPECT_NEAR(d[2], -10.0 / std::pow(3.5, 3), 1e-15);
}

TEST(Family, SchwarzianIsSigmaForEveryClass) {
    Rng rng(31);
    for (FamilyClass cls : {FamilyClass::hyperbolic, FamilyClass::parabolic, FamilyClass::elliptic}) {
        for (int i = 0; i < 20; ++i) {
            const MobiusFamily f = testing_support::random_family(rng, cls);
            const double s = testing_support::pole_free_window(f, 0.3);
            ASSERT_FALSE(std::isnan(s));
            const FamilyResiduals r = family_verify(f, 20, s, s + 1.0);
            EXPECT_EQ(r.samples, 20);
            EXPECT_LE(r.max_schwarzian, 1e-9);
            EXPECT_LE(r.max_el, 1e-9);
        }
    }
}

TEST(Family, MoebiusOuterMapDoesNotChangeS) {
    Rng rng(32);
    for (int i = 0; i < 20; ++i) {
        const double sigma = rng.uniform(-2, 2);
        const MobiusFamily f = testing_support::random_family(rng, sigma < -0.05  ? FamilyClass::hyperbolic
                                                                   : sigma > 0.05 ? FamilyClass::elliptic
                                                                                  : FamilyClass::parabolic);
        const double s = testing_support::pole_free_window(f, 0.3);
        const Jet4 j = family_eval_jet(f, s + 0.5);
        EXPECT_NEAR(schwarzian(j), f.sigma(), 1e-10 * std::max(1.0, std::abs(f.sigma())));
    }
}

TEST(Family, SingularitiesAreZerosOfTheDenominator) {
    const MobiusFamily mob(1, 0, 1, -1, 0);  // t/(t - 1)
    const auto p = family_singularities(mob, 0.0, 3.0);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_NEAR(p[0], 1.0, 1e-15);
    EXPECT_THROW(family_derivatives(mob, 1.0), SingularTimeError);

    const auto tan_poles = family_singularities(MobiusFamily::identity(2.0), -4.0, 4.0);
    ASSERT_EQ(tan_poles.size(), 2u);
    EXPECT_NEAR(tan_poles[0], -M_PI / 2, 1e-14);
    EXPECT_NEAR(tan_poles[1], M_PI / 2, 1e-14);

    // (e^t + 0)/(e^t - 2): pole at ln 2.
    const auto exp_poles = family_singularities(MobiusFamily(1, 0, 1, -2, -0.5), -5.0, 5.0);
    ASSERT_EQ(exp_poles.size(), 1u);
    EXPECT_NEAR(exp_poles[0], std::log(2.0), 1e-14);

    Rng rng(33);
    for (int i = 0; i < 30; ++i) {
        const MobiusFamily f = testing_support::random_family(rng, static_cast<FamilyClass>(i % 3));
        for (double t : family_singularities(f, -3.0, 3.0)) {
            EXPECT_THROW(family_derivatives(f, t), SingularTimeError);
        }
    }
}

TEST(Family, VerifySkipsPoles) {
    const auto r = family_verify(MobiusFamily(1, 0, 1, -1, 0), 100, 0.0, 1.0);
    EXPECT_EQ(r.samples + r.skipped, 100);
    EXPECT_EQ(r.skipped, 1);
    EXPECT_LE(r.max_schwarzian, 1e-9);
    EXPECT_LE(r.max_el, 1e-9);
    EXPECT_THROW(family_verify(MobiusFamily::identity(0), 0, 0, 1), InvalidArgument);
}

TEST(Family, JsonRoundTrip) {
    const MobiusFamily f(2, -1, 0.5, 3, 0.7);
    nlohmann::json j = f;
    EXPECT_EQ(j.at("sigma").get<double>(), 0.7);
    const MobiusFamily g = family_from_json(j);
    EXPECT_EQ(g.A(), 2);
    EXPECT_EQ(g.B(), -1);
    EXPECT_EQ(g.C(), 0.5);
    EXPECT_EQ(g.D(), 3);
    EXPECT_EQ(g.sigma(), 0.7);
    EXPECT_THROW(family_from_json(nlohmann::json{{"A", 1}}), std::exception);
}
