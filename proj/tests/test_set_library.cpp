#include <gtest/gtest.h>

#include <sstream>

#include "lcmlab/set_library.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace lcmlab;
using testing_support::table;

TEST(Enumerate, KAlmostPrimesOverSmallFilter) {
    const PrimeFilter upto5{5};
    EXPECT_EQ(enumerate(sets::ExactlyKAlmost{upto5, 2}, 100, table()), (std::vector<std::uint64_t>{6, 10, 15}));
    EXPECT_EQ(enumerate(sets::ExactlyKAlmost{upto5, 0}, 100, table()), (std::vector<std::uint64_t>{1}));
    EXPECT_EQ(enumerate(sets::AtMostKAlmost{upto5, 1}, 100, table()), (std::vector<std::uint64_t>{1, 2, 3, 5}));
    EXPECT_EQ(enumerate(sets::SmoothSquarefree{upto5}, 100, table()),
              (std::vector<std::uint64_t>{1, 2, 3, 5, 6, 10, 15, 30}));
    EXPECT_EQ(enumerate(sets::SmoothSquarefree{upto5}, 20, table()),
              (std::vector<std::uint64_t>{1, 2, 3, 5, 6, 10, 15}));
    EXPECT_THROW(enumerate(sets::ExactlyKAlmost{upto5, -1}, 100, table()), DomainError);
}

TEST(Enumerate, LowerBoundOnPrimes) {
    const PrimeFilter band{20, 5.0};
    EXPECT_EQ(enumerate(sets::ExactlyKAlmost{band, 1}, 100, table()), (std::vector<std::uint64_t>{7, 11, 13, 17, 19}));
    EXPECT_EQ(enumerate(sets::ExactlyKAlmost{band, 2}, 100, table()), (std::vector<std::uint64_t>{77, 91}));
}

TEST(Enumerate, PrimesAndExplicit) {
    EXPECT_EQ(enumerate(sets::Primes{}, 20, table()), (std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19}));
    EXPECT_EQ(enumerate(sets::Primes{}, 1e6, table()).size(), oracle::kPrimesBelowMillion);
    EXPECT_EQ(enumerate(sets::Explicit{{2, 3, 50, 99}}, 50, table()), (std::vector<std::uint64_t>{2, 3, 50}));
    EXPECT_THROW(enumerate(sets::Primes{}, 2e6, table()), CapacityError);
}

TEST(Enumerate, KAlmostPrimesAgreeWithFactorization) {
    const auto twos = enumerate(sets::ExactlyKAlmost{{}, 2}, 1e5, table());
    std::size_t expected = 0;
    for (std::uint64_t n = 2; n <= 100'000; ++n) {
        const auto f = factorize(n, table());
        if (f.omega() == 2 && is_squarefree(f)) ++expected;
    }
    EXPECT_EQ(twos.size(), expected);
    EXPECT_TRUE(std::ranges::is_sorted(twos));
}

TEST(Describe, Tags) {
    EXPECT_EQ(describe(sets::Primes{}), "primes");
    EXPECT_EQ(describe(sets::ExactlyKAlmost{{}, 2}), "kalmost:2");
}

TEST(Lgr, WorkedExample) {
    const auto r = lgr_report(PrimeFilter{5}, 2, 100, table());
    EXPECT_NEAR(r.prime_sum, 31.0 / 30.0, 1e-15);
    EXPECT_NEAR(r.sum_exact_k, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.rhs, oracle::kLgr235Rhs, 1e-15);
    EXPECT_NEAR(r.ratio(), oracle::kLgr235Ratio, 1e-14);
    EXPECT_NEAR(r.sum_at_most_k, 1 + 31.0 / 30.0 + 1.0 / 3.0, 1e-14);
    EXPECT_FALSE(r.hypothesis_holds(0.01));
    EXPECT_TRUE(r.hypothesis_holds(2.0));
}

TEST(Lgr, KZeroIsOne) {
    const auto r = lgr_report(PrimeFilter{100}, 0, 1000, table());
    EXPECT_EQ(r.sum_exact_k, 1.0);
    EXPECT_EQ(r.rhs, 1.0);
    EXPECT_EQ(r.ratio(), 1.0);
}

TEST(Lgr, UpperInequalityOverFixtureMatrix) {
    for (double y : {1e3, 1e4, 1e6}) {
        for (int k : {0, 1, 2, 3, 5}) {
            for (double x : {1e3, 1e6}) {
                const auto r = lgr_report(PrimeFilter{y}, k, x, table());
                EXPECT_LE(r.ratio(), 1 + 1e-12) << y << " " << k << " " << x;
                EXPECT_LE(r.sum_exact_k, r.sum_at_most_k);
            }
        }
    }
}

TEST(LogAll, EqualityWhenEveryProductFits) {
    const auto r = logall_report(PrimeFilter{3}, 100, table());
    EXPECT_TRUE(r.complete);
    EXPECT_NEAR(r.lhs, 2.0, 1e-15);
    EXPECT_NEAR(r.rhs_product, 2.0, 1e-15);
}

TEST(LogAll, PrimesUpTo100) {
    const auto r = logall_report(PrimeFilter{100}, 100, table());
    EXPECT_FALSE(r.complete);
    EXPECT_NEAR(r.lhs, oracle::kLogAllPrimes100Lhs, 1e-13);
    EXPECT_NEAR(r.rhs_product, oracle::kLogAllPrimes100Rhs, 1e-12);
}

TEST(LogAll, InequalityOverFixtureMatrix) {
    for (double y : {1e3, 1e4, 1e6}) {
        for (double x : {1e3, 1e6}) {
            const auto r = logall_report(PrimeFilter{y}, x, table());
            EXPECT_LE(r.lhs, r.rhs_product) << y << " " << x;
        }
    }
}

TEST(ExplicitFormat, ParsesCommentsAndBlankLines) {
    std::istringstream in("# header\n2\n\n  3  # trailing\n10\n");
    const auto e = parse_explicit(in, "mem");
    EXPECT_EQ(e.values, (std::vector<std::uint64_t>{2, 3, 10}));
    EXPECT_EQ(e.origin, "mem");
}

TEST(ExplicitFormat, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            parse_explicit(in, "mem");
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("2\n3\n3\n"), 3u);
    EXPECT_EQ(line_of("# c\n2\nabc\n"), 3u);
    EXPECT_EQ(line_of("0\n"), 1u);
    EXPECT_EQ(line_of("5\n4\n"), 2u);
    EXPECT_EQ(line_of("-1\n"), 1u);
    EXPECT_EQ(line_of("7 8\n"), 1u);
}

TEST(ExplicitFormat, WriteThenParse) {
    std::ostringstream out;
    const std::vector<std::uint64_t> v = {17, 19, 21, 1000003};
    write_explicit(out, v, "made by a test");
    std::istringstream in(out.str());
    EXPECT_EQ(parse_explicit(in, "mem").values, v);
}
