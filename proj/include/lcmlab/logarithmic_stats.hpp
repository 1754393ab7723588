#pragma once

// Sets under the logarithmic measure P(n) = (1/n) / S(x).
//
// LogProfile is the single accumulation kernel: elements are added in
// ascending order and each one adds 1/n to S, to the weight w_d of every
// divisor d, and to its omega bucket. Statistics are then read off the
// profile. Because the additions happen in the same order whether a set is
// profiled all at once or grown prefix by prefix (as a sweep does), both
// routes produce bit-identical numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lcmlab/construction.hpp"
#include "lcmlab/error.hpp"
#include "lcmlab/prime_engine.hpp"
#include "lcmlab/set_library.hpp"
#include "lcmlab/summation.hpp"

namespace lcmlab {

struct WeightedSet {
    double x = 0;
    std::vector<std::uint64_t> elements;  // ascending
    std::vector<double> weights;          // 1/n per element
    double S = 0;                         // compensated sum of weights
    std::string provenance;

    bool empty() const noexcept { return elements.empty(); }
    std::size_t size() const noexcept { return elements.size(); }
};

inline WeightedSet make_weighted(std::vector<std::uint64_t> elements, double x, std::string provenance) {
    WeightedSet w;
    w.x = x;
    w.provenance = std::move(provenance);
    w.elements = std::move(elements);
    w.weights.reserve(w.elements.size());
    CompensatedSum s;
    for (std::size_t i = 0; i < w.elements.size(); ++i) {
        if (w.elements[i] == 0 || (i > 0 && w.elements[i] <= w.elements[i - 1])) {
            throw DomainError("weighted set elements must be positive and strictly increasing");
        }
        const double wt = 1.0 / static_cast<double>(w.elements[i]);
        w.weights.push_back(wt);
        s.add(wt);
    }
    w.S = s.value();
    return w;
}

inline WeightedSet materialize(const SetSpec& spec, double x, const SpfTable& table, unsigned threads = 1) {
    return make_weighted(enumerate(spec, x, table, threads), x, describe(spec));
}

inline void require_nonempty(const WeightedSet& w, const char* what) {
    if (w.empty() || !(w.S > 0)) throw EmptySetError(std::string(what) + ": set is empty (S = 0)");
}

/// P(d | n) by a direct pass over the elements.
inline double divisor_probability(const WeightedSet& w, std::uint64_t d) {
    require_nonempty(w, "divisor_probability");
    if (d == 0) throw DomainError("divisor_probability: d must be positive");
    if (d == 1) return 1.0;
    CompensatedSum num;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w.elements[i] % d == 0) num.add(w.weights[i]);
    }
    return num.value() / w.S;
}

/// Dense keyed accumulator d -> w_d = sum of 1/n over added elements n with d | n.
class DivisorWeights {
public:
    DivisorWeights() = default;
    explicit DivisorWeights(std::uint64_t max_key) : sums_(max_key + 1) {}

    std::uint64_t max_key() const noexcept { return sums_.empty() ? 0 : sums_.size() - 1; }

    /// Adds `weight` to every divisor of f.n().
    void add(const Factorization& f, double weight) {
        if (f.n() > max_key()) throw CapacityError("DivisorWeights: element exceeds accumulator range");
        // Divisors are generated prime by prime; order within one element
        // does not matter since each key receives one addition per element.
        divisors_.assign(1, 1);
        for (const auto& [p, e] : f.factors()) {
            const std::size_t base = divisors_.size();
            std::uint64_t pk = 1;
            for (std::uint32_t i = 0; i < e; ++i) {
                pk *= p;
                for (std::size_t j = 0; j < base; ++j) divisors_.push_back(divisors_[j] * pk);
            }
        }
        for (auto d : divisors_) sums_[d].add(weight);
    }

    double weight(std::uint64_t d) const { return d <= max_key() ? sums_[d].value() : 0.0; }

    /// Calls f(d, w_d) for every d <= upto with w_d > 0, ascending in d.
    template <class F>
    void for_each(F&& f, std::uint64_t upto = UINT64_MAX) const {
        const std::uint64_t end = std::min<std::uint64_t>(sums_.size(), upto == UINT64_MAX ? upto : upto + 1);
        for (std::uint64_t d = 1; d < end; ++d) {
            const double v = sums_[d].value();
            if (v != 0.0) f(d, v);
        }
    }

private:
    std::vector<CompensatedSum> sums_;
    std::vector<std::uint64_t> divisors_;
};

class LogProfile {
public:
    explicit LogProfile(std::uint64_t max_element) : divisors_(max_element) {}

    /// Elements must arrive in strictly increasing order.
    void add(const Factorization& f) {
        const std::uint64_t n = f.n();
        if (count_ > 0 && n <= last_) throw DomainError("LogProfile: elements must be strictly increasing");
        const double w = 1.0 / static_cast<double>(n);
        S_.add(w);
        divisors_.add(f, w);
        const std::size_t omega = f.omega();
        omega_weighted_.add(static_cast<double>(omega) * w);
        if (omega_buckets_.size() <= omega) omega_buckets_.resize(omega + 1);
        omega_buckets_[omega].add(w);
        last_ = n;
        ++count_;
    }

    double S() const noexcept { return S_.value(); }
    std::size_t count() const noexcept { return count_; }
    std::uint64_t last() const noexcept { return last_; }
    const DivisorWeights& divisors() const noexcept { return divisors_; }
    /// sum of omega(n)/n
    double omega_weighted() const noexcept { return omega_weighted_.value(); }
    /// bucket j holds the sum of 1/n over elements with omega(n) = j
    std::span<const CompensatedSum> omega_buckets() const noexcept { return omega_buckets_; }

private:
    CompensatedSum S_;
    DivisorWeights divisors_;
    CompensatedSum omega_weighted_;
    std::vector<CompensatedSum> omega_buckets_;
    std::uint64_t last_ = 0;
    std::size_t count_ = 0;
};

inline LogProfile build_profile(const WeightedSet& w, const SpfTable& table) {
    const std::uint64_t max_el = w.empty() ? 1 : w.elements.back();
    if (max_el > table.limit()) throw CapacityError("set element exceeds sieve limit");
    LogProfile prof(max_el);
    for (auto n : w.elements) prof.add(factorize(n, table));
    return prof;
}

/// E omega(n) = (sum omega(n)/n) / S.
inline double omega_expectation(const WeightedSet& w, const SpfTable& table) {
    require_nonempty(w, "omega_expectation");
    CompensatedSum num;
    for (std::size_t i = 0; i < w.size(); ++i) {
        num.add(static_cast<double>(factorize(w.elements[i], table).omega()) * w.weights[i]);
    }
    return num.value() / w.S;
}

struct UpperBoundDiagnostics {
    double sumP = 0;             // sum_p P(p | n)
    double D2 = 0;               // sum_p (p - 1) P(p | n)^2
    double cs_bound = 0;         // (D2 * sum_{p <= x} 1/(p-1))^(1/2)
    double E_omega = 0;          // E omega(n)
    double jensen_quantity = 0;  // E exp(-omega(n) Log3 x)
    double est3_rhs_exponent = 0;  // Log2^(1/2) x * Log3 x
    double log3x = 0;
    /// log of the Euler product prod_{p <= x} (1 + exp(-Log3 x)/(p - 1)),
    /// which bounds sum_{n <= x} exp(-omega(n) Log3 x)/n over all n.
    double log_euler_product = 0;
};

namespace detail {

/// Sum over primes p <= x of f(p), ascending, compensated.
template <class F>
double prime_sum(double x, const SpfTable& table, F&& f) {
    CompensatedSum acc;
    for (std::uint32_t p : prime_range(0.0, x, table, "prime sum")) acc.add(f(static_cast<double>(p)));
    return acc.value();
}

}  // namespace detail

/// Calls f(p, w_p) for primes p with w_p > 0, ascending.
template <class F>
void for_each_prime_weight(const LogProfile& prof, const SpfTable& table, F&& f) {
    const std::uint64_t top = prof.divisors().max_key();
    for (std::uint32_t p : table.primes()) {
        if (p > top) break;
        const double wp = prof.divisors().weight(p);
        if (wp != 0.0) f(std::uint64_t{p}, wp);
    }
}

inline UpperBoundDiagnostics diagnostics_from(const LogProfile& prof, double x, const SpfTable& table) {
    if (prof.count() == 0 || !(prof.S() > 0)) throw EmptySetError("diagnostics: set is empty (S = 0)");
    const double S = prof.S();
    CompensatedSum sum_w, sum_d2;
    for_each_prime_weight(prof, table, [&](std::uint64_t p, double wp) {
        sum_w.add(wp);
        sum_d2.add(static_cast<double>(p - 1) * wp * wp);
    });

    UpperBoundDiagnostics r;
    r.sumP = sum_w.value() / S;
    r.D2 = sum_d2.value() / (S * S);
    const double inv_pm1 = detail::prime_sum(x, table, [](double p) { return 1.0 / (p - 1.0); });
    r.cs_bound = std::sqrt(r.D2 * inv_pm1);
    r.E_omega = prof.omega_weighted() / S;

    const double l2 = iterated_log(x, 2);
    r.log3x = iterated_log(x, 3);
    CompensatedSum jensen;
    const auto buckets = prof.omega_buckets();
    for (std::size_t j = 0; j < buckets.size(); ++j) {
        jensen.add(buckets[j].value() * std::exp(-static_cast<double>(j) * r.log3x));
    }
    r.jensen_quantity = jensen.value() / S;
    r.est3_rhs_exponent = std::sqrt(l2) * r.log3x;
    const double damp = std::exp(-r.log3x);
    r.log_euler_product = detail::prime_sum(x, table, [&](double p) { return std::log1p(damp / (p - 1.0)); });
    return r;
}

inline UpperBoundDiagnostics upper_bound_diagnostics(const WeightedSet& w, const SpfTable& table) {
    require_nonempty(w, "upper_bound_diagnostics");
    return diagnostics_from(build_profile(w, table), w.x, table);
}

}  // namespace lcmlab
