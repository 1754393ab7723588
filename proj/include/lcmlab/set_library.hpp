#pragma once

// Reference integer sets and the growth-rate instruments for squarefree
// almost-primes.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lcmlab/construction.hpp"
#include "lcmlab/error.hpp"
#include "lcmlab/prime_engine.hpp"
#include "lcmlab/summation.hpp"

namespace lcmlab {

/// Primes p with lower < p <= upper.
struct PrimeFilter {
    double upper = std::numeric_limits<double>::infinity();
    std::optional<double> lower{};

    bool admits(std::uint64_t p) const noexcept {
        const double v = static_cast<double>(p);
        return v <= upper && (!lower || v > *lower);
    }

    friend bool operator==(const PrimeFilter&, const PrimeFilter&) = default;
};

namespace sets {

struct TaoConstruction {
    ConstructionParams params;
};
struct Primes {};
struct ExactlyKAlmost {
    PrimeFilter filter;
    int k = 0;
};
struct AtMostKAlmost {
    PrimeFilter filter;
    int k = 0;
};
struct SmoothSquarefree {
    PrimeFilter filter;
};
/// Strictly increasing positive integers, usually read from a file.
struct Explicit {
    std::vector<std::uint64_t> values;
    std::string origin = "<memory>";
};

}  // namespace sets

using SetSpec = std::variant<sets::TaoConstruction, sets::Primes, sets::ExactlyKAlmost, sets::AtMostKAlmost,
                             sets::SmoothSquarefree, sets::Explicit>;

/// Parses the explicit set format: one positive integer per line, strictly
/// increasing, '#' starts a comment, blank lines ignored.
inline sets::Explicit parse_explicit(std::istream& in, const std::string& origin) {
    sets::Explicit out;
    out.origin = origin;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string_view tok(line.data() + first, last - first + 1);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw ParseError(origin, lineno, "expected a positive integer, got '" + std::string(tok) + "'");
        }
        if (v == 0) throw ParseError(origin, lineno, "values must be positive");
        if (!out.values.empty() && v <= out.values.back()) {
            throw ParseError(origin, lineno, "values must be strictly increasing");
        }
        out.values.push_back(v);
    }
    return out;
}

inline sets::Explicit load_explicit(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_explicit(in, path.string());
}

/// Writes values in the explicit set format, optionally under a comment line.
inline void write_explicit(std::ostream& out, std::span<const std::uint64_t> values, const std::string& comment = {}) {
    if (!comment.empty()) out << "# " << comment << '\n';
    for (auto v : values) out << v << '\n';
}

/// Short provenance tag, e.g. "tao:C0=5" or "kalmost:2".
inline std::string describe(const SetSpec& spec) {
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    auto filt = [&](const PrimeFilter& f) {
        std::string s;
        if (f.lower) s += "(" + num(*f.lower);
        if (std::isfinite(f.upper)) s += (f.lower ? "," : "(0,") + num(f.upper) + "]";
        else if (f.lower) s += ",inf)";
        return s;
    };
    return std::visit(
        [&](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, sets::TaoConstruction>) return "tao:C0=" + num(s.params.c0());
            else if constexpr (std::is_same_v<T, sets::Primes>) return "primes";
            else if constexpr (std::is_same_v<T, sets::ExactlyKAlmost>) return "kalmost:" + std::to_string(s.k) + filt(s.filter);
            else if constexpr (std::is_same_v<T, sets::AtMostKAlmost>) return "atmost:" + std::to_string(s.k) + filt(s.filter);
            else if constexpr (std::is_same_v<T, sets::SmoothSquarefree>) return "smooth" + filt(s.filter);
            else return "file:" + s.origin;
        },
        spec);
}

/// Filter primes p <= min(upper, x), ascending.
inline std::vector<std::uint64_t> filter_primes(const PrimeFilter& filter, double x, const SpfTable& table) {
    const double hi = std::min(filter.upper, x);
    auto r = detail::prime_range(filter.lower.value_or(0.0), hi, table, "prime filter");
    return {r.begin(), r.end()};
}

/// Elements of the set that are <= x, strictly increasing.
inline std::vector<std::uint64_t> enumerate(const SetSpec& spec, double x, const SpfTable& table,
                                            unsigned threads = 1) {
    const std::uint64_t top = detail::checked_bound(x, table, "enumerate");
    auto products = [&](const PrimeFilter& filter, std::int64_t min_count, std::int64_t max_count) {
        std::vector<std::uint64_t> out;
        if (top < 1) return out;
        const auto ps = filter_primes(filter, x, table);
        detail::squarefree_products(ps, top, max_count,
                                    [&](std::uint64_t n, std::span<const std::uint64_t> chosen) {
                                        if (static_cast<std::int64_t>(chosen.size()) >= min_count) out.push_back(n);
                                    });
        std::ranges::sort(out);
        return out;
    };
    return std::visit(
        [&](const auto& s) -> std::vector<std::uint64_t> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, sets::TaoConstruction>) {
                return enumerate_A(x, s.params, table, threads);
            } else if constexpr (std::is_same_v<T, sets::Primes>) {
                return primes_in(0.0, x, table);
            } else if constexpr (std::is_same_v<T, sets::ExactlyKAlmost>) {
                if (s.k < 0) throw DomainError("k must be nonnegative");
                return products(s.filter, s.k, s.k);
            } else if constexpr (std::is_same_v<T, sets::AtMostKAlmost>) {
                if (s.k < 0) throw DomainError("k must be nonnegative");
                return products(s.filter, 0, s.k);
            } else if constexpr (std::is_same_v<T, sets::SmoothSquarefree>) {
                return products(s.filter, 0, std::numeric_limits<std::int64_t>::max());
            } else {
                auto end = std::ranges::upper_bound(s.values, top);
                return {s.values.begin(), end};
            }
        },
        spec);
}

/// Growth of P^[k] against (1/k!)(sum 1/p)^k.
struct LgrReport {
    int k = 0;
    double x = 0;
    double prime_sum = 0;      // sum of 1/p over filter primes p <= x
    double sum_exact_k = 0;    // sum of 1/n over P^[k], n <= x
    double sum_at_most_k = 0;  // sum of 1/n over P^[<=k], n <= x
    double rhs = 0;            // (prime_sum)^k / k!
    double margin = 0;         // k / prime_sum

    /// sum_exact_k * k! * prime_sum^-k; never exceeds 1.
    double ratio() const { return rhs > 0 ? sum_exact_k / rhs : 0.0; }

    /// Whether the smallness hypothesis k <= c * prime_sum holds.
    bool hypothesis_holds(double c) const { return k <= c * prime_sum; }
};

inline LgrReport lgr_report(const PrimeFilter& filter, int k, double x, const SpfTable& table) {
    if (k < 0) throw DomainError("lgr_report: k must be nonnegative");
    const std::uint64_t top = detail::checked_bound(x, table, "lgr_report");
    const auto ps = filter_primes(filter, x, table);

    LgrReport r;
    r.k = k;
    r.x = x;
    CompensatedSum prime_sum;
    for (auto p : ps) prime_sum.add(1.0 / static_cast<double>(p));
    r.prime_sum = prime_sum.value();

    // Collect first, then sum ascending, so the totals do not depend on the
    // walk order.
    std::vector<std::pair<std::uint64_t, bool>> terms;
    if (top >= 1) {
        detail::squarefree_products(ps, top, k, [&](std::uint64_t n, std::span<const std::uint64_t> chosen) {
            terms.emplace_back(n, static_cast<int>(chosen.size()) == k);
        });
    }
    std::ranges::sort(terms);
    CompensatedSum exact, at_most;
    for (auto [n, is_exact] : terms) {
        const double w = 1.0 / static_cast<double>(n);
        at_most.add(w);
        if (is_exact) exact.add(w);
    }
    r.sum_exact_k = exact.value();
    r.sum_at_most_k = at_most.value();
    r.rhs = k == 0 ? 1.0 : std::exp(k * std::log(r.prime_sum) - log_factorial(k));
    r.margin = k == 0 ? 0.0 : (r.prime_sum > 0 ? k / r.prime_sum : std::numeric_limits<double>::infinity());
    return r;
}

struct LogAllReport {
    double lhs = 0;          // sum of 1/n over squarefree filter-smooth n <= x
    double rhs_product = 0;  // product of (1 + 1/p) over filter primes p <= x
    bool complete = false;   // every squarefree filter-smooth product is <= x
};

inline LogAllReport logall_report(const PrimeFilter& filter, double x, const SpfTable& table) {
    const auto elements = enumerate(sets::SmoothSquarefree{filter}, x, table);
    const auto ps = filter_primes(filter, x, table);
    LogAllReport r;
    CompensatedSum lhs;
    for (auto n : elements) lhs.add(1.0 / static_cast<double>(n));
    r.lhs = lhs.value();
    // The product is accumulated as a sum of log1p terms to stay compensated.
    CompensatedSum log_rhs;
    for (auto p : ps) log_rhs.add(std::log1p(1.0 / static_cast<double>(p)));
    r.rhs_product = std::exp(log_rhs.value());
    r.complete = elements.size() == (std::size_t{1} << std::min<std::size_t>(ps.size(), 63));
    return r;
}

}  // namespace lcmlab
