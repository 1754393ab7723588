#pragma once

// The gcd defect E gcd(n, m) - 1 for n, m independent draws from the
// logarithmic measure, computed three ways:
//
//   Pairwise        the double sum of gcd(n, m)/(nm) over S^2
//   DivisorSum      sum_{d > 1} phi(d) P(d | n)^2, via gcd = sum_{d | n, m} phi(d)
//   PrimeTruncated  the d = p terms only; a lower bound for the defect

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lcmlab/error.hpp"
#include "lcmlab/logarithmic_stats.hpp"
#include "lcmlab/prime_engine.hpp"
#include "lcmlab/summation.hpp"

namespace lcmlab {

inline constexpr std::size_t kDefaultPairwiseCap = 20'000;

enum class DefectMethod { Pairwise, DivisorSum, PrimeTruncated };

inline const char* to_string(DefectMethod m) {
    switch (m) {
        case DefectMethod::Pairwise: return "pairwise";
        case DefectMethod::DivisorSum: return "divisor_sum";
        case DefectMethod::PrimeTruncated: return "prime_truncated";
    }
    return "?";
}

struct DefectReport {
    DefectMethod method = DefectMethod::DivisorSum;
    double S = 0;
    std::optional<double> e_gcd;         // omitted for PrimeTruncated
    double defect = 0;                   // a lower bound for PrimeTruncated
    std::size_t element_count = 0;
    std::optional<double> conc_offdiag;  // sum_{n<m} 1/lcm(n,m) / S^2, Pairwise only
    std::string runtime_note;
};

inline std::uint64_t binary_gcd(std::uint64_t a, std::uint64_t b) noexcept {
    if (a == 0) return b;
    if (b == 0) return a;
    const int shift = std::countr_zero(a | b);
    a >>= std::countr_zero(a);
    do {
        b >>= std::countr_zero(b);
        if (a > b) std::swap(a, b);
        b -= a;
    } while (b != 0);
    return a << shift;
}

/// Exact double sum. Rows are split across `threads` workers, but each row's
/// partial sums are computed independently and combined in row order, so the
/// result is the same for every thread count.
inline DefectReport defect_pairwise(const WeightedSet& w, std::size_t cap = kDefaultPairwiseCap,
                                    unsigned threads = 1) {
    require_nonempty(w, "defect_pairwise");
    const std::size_t n = w.size();
    if (n > cap) {
        throw PairwiseCapError("pairwise defect: " + std::to_string(n) + " elements exceed the cap of " +
                               std::to_string(cap) + "; use the divisor-sum method");
    }
    struct Row {
        double all = 0;     // sum_j gcd/(n_i n_j)
        double excess = 0;  // sum_j (gcd - 1)/(n_i n_j)
        double upper = 0;   // sum_{j > i} gcd/(n_i n_j)
    };
    std::vector<Row> rows(n);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            CompensatedSum all, excess, upper;
            const std::uint64_t a = w.elements[i];
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint64_t g = binary_gcd(a, w.elements[j]);
                const double base = w.weights[i] * w.weights[j];
                const double term = static_cast<double>(g) * base;
                all.add(term);
                if (g > 1) excess.add(static_cast<double>(g - 1) * base);
                if (j > i) upper.add(term);
            }
            rows[i] = {all.value(), excess.value(), upper.value()};
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads == 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, n * t / threads, n * (t + 1) / threads);
    }

    CompensatedSum all, excess, upper;
    for (const auto& r : rows) {
        all.add(r.all);
        excess.add(r.excess);
        upper.add(r.upper);
    }
    const double S2 = w.S * w.S;
    DefectReport rep;
    rep.method = DefectMethod::Pairwise;
    rep.S = w.S;
    rep.e_gcd = all.value() / S2;
    rep.defect = excess.value() / S2;
    rep.element_count = n;
    rep.conc_offdiag = upper.value() / S2;
    rep.runtime_note = std::to_string(n) + "x" + std::to_string(n) + " gcd evaluations";
    return rep;
}

/// sum_{d > 1} phi(d) (w_d / S)^2 over the profile's divisor weights,
/// ascending in d.
inline double divisor_defect_from(const LogProfile& prof, const SpfTable& table) {
    if (prof.count() == 0 || !(prof.S() > 0)) throw EmptySetError("defect: set is empty (S = 0)");
    CompensatedSum acc;
    prof.divisors().for_each([&](std::uint64_t d, double wd) {
        if (d < 2) return;
        acc.add(static_cast<double>(euler_phi(factorize(d, table))) * wd * wd);
    }, prof.last());
    const double S = prof.S();
    return acc.value() / (S * S);
}

/// sum_p (p - 1) (w_p / S)^2; the same value as UpperBoundDiagnostics::D2.
inline double prime_truncated_from(const LogProfile& prof, const SpfTable& table) {
    if (prof.count() == 0 || !(prof.S() > 0)) throw EmptySetError("defect: set is empty (S = 0)");
    CompensatedSum acc;
    for_each_prime_weight(prof, table, [&](std::uint64_t p, double wp) {
        acc.add(static_cast<double>(p - 1) * wp * wp);
    });
    const double S = prof.S();
    return acc.value() / (S * S);
}

inline DefectReport defect_divisor_sum(const WeightedSet& w, const SpfTable& table) {
    require_nonempty(w, "defect_divisor_sum");
    const auto prof = build_profile(w, table);
    DefectReport rep;
    rep.method = DefectMethod::DivisorSum;
    rep.S = w.S;
    rep.defect = divisor_defect_from(prof, table);
    rep.e_gcd = 1.0 + rep.defect;
    rep.element_count = w.size();
    rep.runtime_note = "divisor weights up to d = " + std::to_string(prof.divisors().max_key());
    return rep;
}

inline DefectReport defect_prime_truncated(const WeightedSet& w, const SpfTable& table) {
    require_nonempty(w, "defect_prime_truncated");
    const auto prof = build_profile(w, table);
    DefectReport rep;
    rep.method = DefectMethod::PrimeTruncated;
    rep.S = w.S;
    rep.defect = prime_truncated_from(prof, table);
    rep.element_count = w.size();
    rep.runtime_note = "prime divisors only (lower bound)";
    return rep;
}

}  // namespace lcmlab
