#pragma once

// The dense set A with small gcd defect.
//
// For a parameter C0 > 0 and integers k >= k_min = ceil(C0) the scale markers
// are x_k = exp(exp(k^2 / C0^2)). All boundary arithmetic happens in
// loglog space: L_k = k^2 / C0^2 is compared against Log2 x, and intervals
// are half-open on the left, (x_k, x_{k+1}]. A value landing exactly on a
// boundary belongs to the lower interval.
//
// n belongs to A when it is squarefree, lies in some (x_k, x_{k+1}], and is
//   (i)  a product of at most k primes, all <= x_k, or
//   (ii) one prime in (x_k, x_{k+1}] times at most k primes <= x_k^eps(n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "lcmlab/error.hpp"
#include "lcmlab/prime_engine.hpp"
#include "lcmlab/summation.hpp"

namespace lcmlab {

/// Log x = max(log x, 1) iterated `depth` times (1, 2 or 3).
inline double iterated_log(double x, int depth) {
    if (!(x > 0)) throw DomainError("iterated_log: x must be positive");
    if (depth < 1 || depth > 3) throw DomainError("iterated_log: depth must be 1, 2 or 3");
    double v = x;
    for (int i = 0; i < depth; ++i) v = std::max(std::log(v), 1.0);
    return v;
}

/// log k!, by compensated summation of log j for k <= 10^4.
inline double log_factorial(std::int64_t k) {
    if (k < 0) throw DomainError("log_factorial: negative argument");
    if (k > 10'000) return std::lgamma(static_cast<double>(k) + 1.0);
    CompensatedSum acc;
    for (std::int64_t j = 2; j <= k; ++j) acc.add(std::log(static_cast<double>(j)));
    return acc.value();
}

class ConstructionParams {
public:
    explicit ConstructionParams(double c0) : c0_(c0) {
        if (!(c0 > 0) || !std::isfinite(c0)) throw DomainError("C0 must be a positive finite number");
        k_min_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(c0)));
    }

    double c0() const noexcept { return c0_; }
    std::int64_t k_min() const noexcept { return k_min_; }

    /// L_t = t^2 / C0^2 = Log2 x_t; defined for real t as well.
    double boundary(double t) const noexcept { return t * t / (c0_ * c0_); }

    /// log x_k = exp(L_k).
    double log_marker(std::int64_t k) const noexcept { return std::exp(boundary(static_cast<double>(k))); }

    /// x_k itself; overflows to +inf once L_k exceeds ~6.56.
    double marker(std::int64_t k) const noexcept { return std::exp(log_marker(k)); }

    /// h(x_{k+1}) = L_{k+1} - L_k + 1.
    double h_top(std::int64_t k) const noexcept {
        const double kk = static_cast<double>(k);
        return boundary(kk + 1) - boundary(kk) + 1.0;
    }

    friend bool operator==(const ConstructionParams&, const ConstructionParams&) = default;

private:
    double c0_;
    std::int64_t k_min_;
};

struct IntervalPoint {
    double x = 0;
    std::int64_t k = 0;
    double llx = 0;   // Log2 x
    double h = 0;
    double psi = 0;
    double logF = 0;  // F itself overflows near k ~ 120
    double eps = 0;
};

namespace detail {

inline std::optional<std::int64_t> interval_from_loglog(double llx, const ConstructionParams& params) {
    const std::int64_t k_min = params.k_min();
    if (!(llx > params.boundary(static_cast<double>(k_min)))) return std::nullopt;
    auto k = std::max(k_min, static_cast<std::int64_t>(std::floor(params.c0() * std::sqrt(llx))));
    while (params.boundary(static_cast<double>(k + 1)) < llx) ++k;
    while (k > k_min && params.boundary(static_cast<double>(k)) >= llx) --k;
    return k;
}

inline IntervalPoint point_from_loglog(double x, double llx, std::int64_t k, const ConstructionParams& params) {
    const double kk = static_cast<double>(k);
    const double c0 = params.c0();
    IntervalPoint pt;
    pt.x = x;
    pt.k = k;
    pt.llx = llx;
    pt.h = llx - params.boundary(kk) + 1.0;
    const double top = params.h_top(k);
    pt.psi = 1.0 + pt.h * pt.h / top;
    pt.eps = std::pow(pt.h / top, kk / (c0 * c0));
    pt.logF = std::log(pt.psi) + 2.0 * kk * std::log(kk) - 2.0 * kk * std::log(c0) - log_factorial(k);
    return pt;
}

}  // namespace detail

/// The k >= k_min with L_k < Log2 x <= L_{k+1}, or nullopt below x_{k_min}.
inline std::optional<std::int64_t> interval_index(double x, const ConstructionParams& params) {
    return detail::interval_from_loglog(iterated_log(x, 2), params);
}

/// h, psi, eps and log F at x; nullopt below x_{k_min}.
inline std::optional<IntervalPoint> point_at(double x, const ConstructionParams& params) {
    const double llx = iterated_log(x, 2);
    const auto k = detail::interval_from_loglog(llx, params);
    if (!k) return std::nullopt;
    return detail::point_from_loglog(x, llx, *k, params);
}

/// Membership of n in A, given f = factorize(n).
inline bool is_member(std::uint64_t n, const Factorization& f, const ConstructionParams& params) {
    if (n < 2 || !is_squarefree(f)) return false;
    const double x = static_cast<double>(n);
    const double llx = iterated_log(x, 2);
    const auto k = detail::interval_from_loglog(llx, params);
    if (!k) return false;
    const double log_xk = params.log_marker(*k);
    const auto omega = static_cast<std::int64_t>(f.omega());

    std::int64_t large = 0;
    double largest_small_log = 0;
    for (const auto& pp : f.factors()) {
        const double lp = std::log(static_cast<double>(pp.prime));
        if (lp > log_xk) {
            ++large;
        } else {
            largest_small_log = std::max(largest_small_log, lp);
        }
    }
    if (large == 0) return omega <= *k;
    if (large > 1 || omega - 1 > *k) return false;
    const double eps = detail::point_from_loglog(x, llx, *k, params).eps;
    return largest_small_log <= eps * log_xk;
}

/// A intersected with [1, x] by scanning every n with factorize + is_member.
/// This is the reference enumeration. Chunks run on `threads` workers and are
/// concatenated in order, so the output does not depend on the thread count.
inline std::vector<std::uint64_t> enumerate_A(double x, const ConstructionParams& params, const SpfTable& table,
                                              unsigned threads = 1) {
    const std::uint64_t top = detail::checked_bound(x, table, "enumerate_A");
    if (top < 2) return {};
    const std::uint64_t first = 2;
    const std::uint64_t count = top - first + 1;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(count, 64))));

    std::vector<std::vector<std::uint64_t>> parts(threads);
    auto scan = [&](unsigned t) {
        const std::uint64_t lo = first + count * t / threads;
        const std::uint64_t hi = first + count * (t + 1) / threads;
        for (std::uint64_t n = lo; n < hi; ++n) {
            if (is_member(n, factorize(n, table), params)) parts[t].push_back(n);
        }
    };
    if (threads == 1) {
        scan(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(scan, t);
    }

    std::vector<std::uint64_t> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

namespace detail {

/// Depth-first walk over squarefree products of at most `max_count` primes
/// drawn from ascending `primes`, with product <= bound. Calls
/// visit(product, chosen) for every product including the empty one.
template <class Visit>
void squarefree_products(std::span<const std::uint64_t> primes, std::uint64_t bound, std::int64_t max_count,
                         Visit&& visit) {
    std::vector<std::uint64_t> chosen;
    auto rec = [&](auto&& self, std::size_t start, std::uint64_t product) -> void {
        visit(product, std::span<const std::uint64_t>(chosen));
        if (static_cast<std::int64_t>(chosen.size()) >= max_count) return;
        for (std::size_t i = start; i < primes.size(); ++i) {
            if (primes[i] > bound / product) break;
            chosen.push_back(primes[i]);
            self(self, i + 1, product * primes[i]);
            chosen.pop_back();
        }
    };
    rec(rec, 0, 1);
}

}  // namespace detail

/// Same set as enumerate_A, generated as prime products interval by interval.
/// Candidates are confirmed with is_member on the factorization the walk
/// already knows, so no sieve factorization is needed for them.
inline std::vector<std::uint64_t> enumerate_A_dfs(double x, const ConstructionParams& params,
                                                  const SpfTable& table) {
    const std::uint64_t top = detail::checked_bound(x, table, "enumerate_A");
    std::vector<std::uint64_t> out;
    if (top < 2) return out;
    const double llx_top = iterated_log(static_cast<double>(top), 2);

    std::vector<std::uint64_t> buf;
    for (std::int64_t k = params.k_min(); params.boundary(static_cast<double>(k)) < llx_top; ++k) {
        const double log_xk = params.log_marker(k);
        std::vector<std::uint64_t> small;
        for (std::uint32_t p : table.primes()) {
            if (p > top || std::log(static_cast<double>(p)) > log_xk) break;
            small.push_back(p);
        }

        auto accept = [&](std::uint64_t n, std::span<const std::uint64_t> ps) {
            if (n < 2 || interval_index(static_cast<double>(n), params) != k) return;
            if (is_member(n, Factorization::from_primes(ps), params)) out.push_back(n);
        };

        // Form (i).
        detail::squarefree_products(small, top, k, accept);

        // Form (ii): eps is nondecreasing on the interval, so primes up to
        // x_k^eps(min(x_{k+1}, top)) cover every admissible small factor.
        const double llx_cap = std::min(llx_top, params.boundary(static_cast<double>(k + 1)));
        const double eps_cap = detail::point_from_loglog(0, llx_cap, k, params).eps;
        std::vector<std::uint64_t> cofactor_primes;
        for (auto q : small) {
            if (std::log(static_cast<double>(q)) > eps_cap * log_xk) break;
            cofactor_primes.push_back(q);
        }
        auto ps = table.primes();
        for (auto it = std::ranges::upper_bound(ps, small.empty() ? 1u : static_cast<std::uint32_t>(small.back()));
             it != ps.end() && *it <= top; ++it) {
            const std::uint64_t big = *it;
            if (std::log(static_cast<double>(big)) <= log_xk) continue;
            if (interval_index(static_cast<double>(big), params).value_or(k + 1) > k) break;
            detail::squarefree_products(cofactor_primes, top / big, k,
                                        [&](std::uint64_t m, std::span<const std::uint64_t> qs) {
                                            buf.assign(qs.begin(), qs.end());
                                            buf.push_back(big);
                                            accept(m * big, buf);
                                        });
        }
    }
    std::ranges::sort(out);
    return out;
}

}  // namespace lcmlab
