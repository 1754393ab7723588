#include <gtest/gtest.h>

#include <cmath>

#include "lcmlab/logarithmic_stats.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace lcmlab;
using testing_support::table;

TEST(WeightedSet, LogarithmicSums) {
    EXPECT_NEAR(make_weighted({2, 3}, 10, "t").S, 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(materialize(sets::Primes{}, 10, table()).S, 247.0 / 210.0, 1e-15);
    EXPECT_NEAR(materialize(sets::TaoConstruction{ConstructionParams(3)}, 1e5, table()).S, oracle::kSC0_3, 1e-12);
    EXPECT_NEAR(materialize(sets::TaoConstruction{ConstructionParams(5)}, 1e5, table()).S, oracle::kSC0_5, 1e-12);
    EXPECT_THROW(make_weighted({3, 2}, 10, "t"), DomainError);
    EXPECT_THROW(make_weighted({0, 2}, 10, "t"), DomainError);
    EXPECT_THROW(make_weighted({2, 2}, 10, "t"), DomainError);
}

TEST(WeightedSet, ConstructionIsEmptyBelowFirstMarker) {
    const auto w = materialize(sets::TaoConstruction{ConstructionParams(3)}, 10, table());
    EXPECT_TRUE(w.empty());
    EXPECT_EQ(w.S, 0.0);
    EXPECT_THROW(divisor_probability(w, 2), EmptySetError);
    EXPECT_THROW(upper_bound_diagnostics(w, table()), EmptySetError);
    EXPECT_THROW(omega_expectation(w, table()), EmptySetError);
}

TEST(WeightedSet, SIsMonotoneInX) {
    double prev = 0;
    for (double x = 16; x <= 1e5; x *= 1.5) {
        const double s = materialize(sets::TaoConstruction{ConstructionParams(4)}, x, table()).S;
        ASSERT_GE(s, prev);
        prev = s;
    }
}

TEST(DivisorProbability, Examples) {
    const auto w = make_weighted({2, 3}, 10, "t");
    EXPECT_NEAR(divisor_probability(w, 2), 0.6, 1e-15);
    EXPECT_NEAR(divisor_probability(w, 3), 0.4, 1e-15);
    EXPECT_EQ(divisor_probability(w, 6), 0.0);
    EXPECT_EQ(divisor_probability(w, 1), 1.0);
    EXPECT_THROW(divisor_probability(w, 0), DomainError);
}

TEST(DivisorWeights, ProfileMatchesDirectScan) {
    const auto w = materialize(sets::TaoConstruction{ConstructionParams(3)}, 2000, table());
    const auto prof = build_profile(w, table());
    EXPECT_EQ(prof.count(), w.size());
    EXPECT_DOUBLE_EQ(prof.S(), w.S);
    for (std::uint64_t d = 1; d <= 2000; ++d) {
        ASSERT_NEAR(prof.divisors().weight(d) / w.S, divisor_probability(w, d), 1e-13) << d;
    }
    std::uint64_t prev = 0;
    prof.divisors().for_each([&](std::uint64_t d, double wd) {
        EXPECT_GT(d, prev);
        EXPECT_GT(wd, 0.0);
        prev = d;
    });
}

TEST(LogProfile, RejectsNonIncreasingInput) {
    LogProfile prof(100);
    prof.add(factorize(6, table()));
    EXPECT_THROW(prof.add(factorize(6, table())), DomainError);
    EXPECT_THROW(prof.add(factorize(5, table())), DomainError);
}

TEST(Omega, Expectation) {
    EXPECT_NEAR(omega_expectation(make_weighted({6, 10, 15}, 20, "t"), table()), 2.0, 1e-15);
    EXPECT_NEAR(omega_expectation(make_weighted({1, 2}, 20, "t"), table()), 1.0 / 3.0, 1e-15);
}

TEST(Diagnostics, WorkedExample) {
    const auto d = upper_bound_diagnostics(make_weighted({2, 3}, 10, "t"), table());
    EXPECT_NEAR(d.sumP, 1.0, 1e-15);
    EXPECT_NEAR(d.D2, 17.0 / 25.0, 1e-15);
    EXPECT_NEAR(d.cs_bound, std::sqrt(17.0 / 25.0 * 23.0 / 12.0), 1e-15);
    EXPECT_NEAR(d.E_omega, 1.0, 1e-15);
    EXPECT_LE(d.sumP, d.cs_bound);
}

TEST(Diagnostics, InequalitiesOnConstructionAndReferenceSets) {
    const std::vector<SetSpec> specs = {sets::TaoConstruction{ConstructionParams(3)},
                                        sets::TaoConstruction{ConstructionParams(5)}, sets::Primes{},
                                        sets::ExactlyKAlmost{{}, 2}, sets::SmoothSquarefree{{50}}};
    for (const auto& spec : specs) {
        for (double x : {1e3, 1e4, 1e5}) {
            const auto w = materialize(spec, x, table());
            const auto d = upper_bound_diagnostics(w, table());
            EXPECT_LE(d.sumP, d.cs_bound * (1 + 1e-12)) << describe(spec) << " " << x;
            EXPECT_NEAR(d.E_omega, d.sumP, 1e-12 * d.sumP) << describe(spec) << " " << x;
            EXPECT_NEAR(d.E_omega, omega_expectation(w, table()), 1e-12 * d.E_omega);
            // Jensen: exp(-E omega L3) <= E exp(-omega L3).
            EXPECT_LE(std::exp(-d.E_omega * d.log3x), d.jensen_quantity * (1 + 1e-12));
            // S E exp(-omega L3) is a partial sum of the Euler product.
            EXPECT_LE(std::log(w.S * d.jensen_quantity), d.log_euler_product + 1e-12);
        }
    }
}
