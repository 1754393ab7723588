#pragma once

// Sweeps, comparisons and their CSV/JSON encodings. The command-line tool is
// a thin shell over this header; tests drive it directly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "lcmlab/construction.hpp"
#include "lcmlab/defect_engine.hpp"
#include "lcmlab/error.hpp"
#include "lcmlab/logarithmic_stats.hpp"
#include "lcmlab/prime_engine.hpp"
#include "lcmlab/set_library.hpp"

namespace lcmlab {

inline constexpr std::string_view kVersion = "lcmlab 1.0.0";

struct GridSpec {
    unsigned points_per_interval = 8;
    std::vector<double> points;  // overrides the generated grid when nonempty
};

struct RunConfig {
    double c0 = 5.0;
    double x_max = 1e6;
    std::uint64_t sieve_limit = kDefaultSieveLimit;
    GridSpec grid;
    std::size_t pairwise_cap = kDefaultPairwiseCap;
    double c_lgr = 0.01;
    std::string set = "tao";
    unsigned threads = 1;
    std::uint64_t seed = 442;

    void validate() const {
        if (!(c0 > 0) || !std::isfinite(c0)) throw ConfigError("--c0 must be positive");
        check_limit();
        if (!(x_max >= 1) || x_max > static_cast<double>(sieve_limit)) {
            throw ConfigError("--x-max must lie in [1, sieve limit]");
        }
        if (grid.points.empty() && grid.points_per_interval == 0) throw ConfigError("--grid must be positive");
        for (double x : grid.points) {
            if (!(x >= 1) || x > x_max) throw ConfigError("grid points must lie in [1, x_max]");
        }
        if (pairwise_cap == 0) throw ConfigError("--pairwise-cap must be positive");
        if (!(c_lgr > 0)) throw ConfigError("--c-lgr must be positive");
        if (threads == 0) throw ConfigError("--threads must be positive");
    }

private:
    void check_limit() const {
        if (sieve_limit < 2) throw ConfigError("--sieve-limit must be at least 2");
    }
};

/// Parses --set values: tao | primes | kalmost:K | atmost:K | smooth[:Y] | file:PATH.
inline SetSpec parse_set(const std::string& text, double c0) {
    auto int_arg = [&](std::string_view v) {
        int k = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
        if (ec != std::errc{} || p != v.data() + v.size() || k < 0) {
            throw ConfigError("bad integer in --set " + text);
        }
        return k;
    };
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string_view arg = colon == std::string::npos ? std::string_view{} : std::string_view(text).substr(colon + 1);
    if (head == "tao" && colon == std::string::npos) return sets::TaoConstruction{ConstructionParams(c0)};
    if (head == "primes" && colon == std::string::npos) return sets::Primes{};
    if (head == "kalmost" && !arg.empty()) return sets::ExactlyKAlmost{{}, int_arg(arg)};
    if (head == "atmost" && !arg.empty()) return sets::AtMostKAlmost{{}, int_arg(arg)};
    if (head == "smooth") {
        PrimeFilter f;
        if (!arg.empty()) {
            double y = 0;
            auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), y);
            if (ec != std::errc{} || p != arg.data() + arg.size() || !(y > 0)) {
                throw ConfigError("bad bound in --set " + text);
            }
            f.upper = y;
        }
        return sets::SmoothSquarefree{f};
    }
    if (head == "file" && !arg.empty()) return load_explicit(std::string(arg));
    throw ConfigError("unknown --set value '" + text + "'");
}

/// Sample points up to x_max: `per_interval` points evenly spaced in Log2 x
/// on each (x_k, x_{k+1}], the boundaries x_k perturbed by a factor
/// (1 +- 1e-6), and x_max itself. Ascending and duplicate-free.
inline std::vector<double> sweep_grid(const ConstructionParams& params, double x_max, unsigned per_interval) {
    std::vector<double> xs;
    const double ll_max = iterated_log(x_max, 2);
    for (std::int64_t k = params.k_min(); params.boundary(static_cast<double>(k)) < ll_max; ++k) {
        const double lo = params.boundary(static_cast<double>(k));
        const double hi = params.boundary(static_cast<double>(k + 1));
        const double xk = params.marker(k);
        for (double f : {1.0 - 1e-6, 1.0 + 1e-6}) {
            if (xk * f <= x_max) xs.push_back(xk * f);
        }
        for (unsigned j = 1; j <= per_interval; ++j) {
            const double ll = lo + (hi - lo) * j / per_interval;
            if (ll > ll_max) break;
            xs.push_back(std::exp(std::exp(ll)));
        }
    }
    if (xs.empty() && params.marker(params.k_min()) * (1.0 - 1e-6) <= x_max) {
        xs.push_back(params.marker(params.k_min()) * (1.0 - 1e-6));
    }
    xs.push_back(x_max);
    std::erase_if(xs, [&](double x) { return x > x_max || x < 1; });
    std::ranges::sort(xs);
    auto [first, last] = std::ranges::unique(xs);
    xs.erase(first, last);
    return xs;
}

inline std::vector<double> grid_for(const RunConfig& config) {
    if (!config.grid.points.empty()) {
        auto xs = config.grid.points;
        std::ranges::sort(xs);
        auto [first, last] = std::ranges::unique(xs);
        xs.erase(first, last);
        return xs;
    }
    return sweep_grid(ConstructionParams(config.c0), config.x_max, config.grid.points_per_interval);
}

struct SweepRow {
    double x = 0;
    std::optional<std::int64_t> k;
    std::optional<double> h, psi, logF, S, logS, log_ratio, defect_divisor, defect_prime_lb, E_omega, cs_sumP,
        cs_bound;
    std::size_t element_count = 0;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Row for the set whose elements <= x are exactly those added to `prof`.
inline SweepRow make_row(double x, const ConstructionParams& params, const LogProfile& prof, const SpfTable& table,
                         UpperBoundDiagnostics* diag_out = nullptr) {
    SweepRow row;
    row.x = x;
    if (auto pt = point_at(x, params)) {
        row.k = pt->k;
        row.h = pt->h;
        row.psi = pt->psi;
        row.logF = pt->logF;
    }
    row.element_count = prof.count();
    if (prof.count() == 0) return row;
    row.S = prof.S();
    row.logS = std::log(*row.S);
    if (row.logF) row.log_ratio = *row.logS - *row.logF;
    row.defect_divisor = divisor_defect_from(prof, table);
    row.defect_prime_lb = prime_truncated_from(prof, table);
    const auto diag = diagnostics_from(prof, x, table);
    row.E_omega = diag.E_omega;
    row.cs_sumP = diag.sumP;
    row.cs_bound = diag.cs_bound;
    if (diag_out) *diag_out = diag;
    return row;
}

/// Recomputes one row from scratch: materialize the set at x, profile it,
/// and evaluate. Used to audit sweep output.
inline SweepRow derive_row(const SetSpec& spec, const ConstructionParams& params, double x, const SpfTable& table) {
    const auto w = materialize(spec, x, table);
    return make_row(x, params, build_profile(w, table), table);
}

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::optional<UpperBoundDiagnostics>> diagnostics;
};

/// Grows the profile along the ascending grid, emitting one row per point.
inline SweepResult run_sweep(const RunConfig& config, const SpfTable& table) {
    config.validate();
    if (config.x_max > static_cast<double>(table.limit())) throw CapacityError("x_max exceeds sieve limit");
    const ConstructionParams params(config.c0);
    const SetSpec spec = parse_set(config.set, config.c0);
    const auto grid = grid_for(config);
    const auto elements = enumerate(spec, config.x_max, table, config.threads);

    LogProfile prof(elements.empty() ? 1 : elements.back());
    SweepResult out;
    std::size_t next = 0;
    for (double x : grid) {
        while (next < elements.size() && static_cast<double>(elements[next]) <= x) {
            prof.add(factorize(elements[next], table));
            ++next;
        }
        UpperBoundDiagnostics diag;
        out.rows.push_back(make_row(x, params, prof, table, &diag));
        out.diagnostics.push_back(prof.count() ? std::optional(diag) : std::nullopt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader =
    "x,k,h,psi,logF,S,logS,log_ratio,defect_divisor,defect_prime_lb,E_omega,cs_sumP,cs_bound,element_count";

/// Shortest decimal that parses back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline std::string to_csv_line(const SweepRow& r) {
    std::string s = format_number(r.x);
    s += ',';
    if (r.k) s += std::to_string(*r.k);
    for (const auto* f : {&r.h, &r.psi, &r.logF, &r.S, &r.logS, &r.log_ratio, &r.defect_divisor,
                          &r.defect_prime_lb, &r.E_omega, &r.cs_sumP, &r.cs_bound}) {
        s += ',';
        if (*f) s += format_number(**f);
    }
    s += ',';
    s += std::to_string(r.element_count);
    return s;
}

inline std::string to_csv(std::span<const SweepRow> rows) {
    std::string s(kCsvHeader);
    s += '\n';
    for (const auto& r : rows) {
        s += to_csv_line(r);
        s += '\n';
    }
    return s;
}

inline SweepRow parse_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (cells.size() != 14) throw Error("CSV row has " + std::to_string(cells.size()) + " fields, expected 14");
    auto num = [](std::string_view c) -> std::optional<double> {
        if (c.empty()) return std::nullopt;
        double v = 0;
        auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (ec != std::errc{} || p != c.data() + c.size()) throw Error("bad number in CSV: " + std::string(c));
        return v;
    };
    auto integer = [](std::string_view c) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (ec != std::errc{} || p != c.data() + c.size()) throw Error("bad integer in CSV: " + std::string(c));
        return v;
    };
    SweepRow r;
    r.x = num(cells[0]).value_or(0);
    if (!cells[1].empty()) r.k = integer(cells[1]);
    std::optional<double>* fields[] = {&r.h, &r.psi, &r.logF, &r.S, &r.logS, &r.log_ratio, &r.defect_divisor,
                                       &r.defect_prime_lb, &r.E_omega, &r.cs_sumP, &r.cs_bound};
    for (std::size_t i = 0; i < 11; ++i) *fields[i] = num(cells[i + 2]);
    r.element_count = static_cast<std::size_t>(integer(cells[13]));
    return r;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json grid;
    if (c.grid.points.empty()) grid["points_per_interval"] = c.grid.points_per_interval;
    else grid["points"] = c.grid.points;
    return {{"c0", c.c0},       {"x_max", c.x_max},     {"sieve_limit", c.sieve_limit},
            {"grid", grid},     {"pairwise_cap", c.pairwise_cap}, {"c_lgr", c.c_lgr},
            {"set", c.set},     {"threads", c.threads}, {"seed", c.seed}};
}

inline nlohmann::json to_json(const SweepRow& r) {
    auto opt = [](const auto& v) -> nlohmann::json { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"x", r.x},
            {"k", opt(r.k)},
            {"h", opt(r.h)},
            {"psi", opt(r.psi)},
            {"logF", opt(r.logF)},
            {"S", opt(r.S)},
            {"logS", opt(r.logS)},
            {"log_ratio", opt(r.log_ratio)},
            {"defect_divisor", opt(r.defect_divisor)},
            {"defect_prime_lb", opt(r.defect_prime_lb)},
            {"E_omega", opt(r.E_omega)},
            {"cs_sumP", opt(r.cs_sumP)},
            {"cs_bound", opt(r.cs_bound)},
            {"element_count", r.element_count}};
}

inline std::string checksum_hex(std::uint32_t crc) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", crc);
    return buf;
}

inline nlohmann::json sweep_report(const RunConfig& config, const SpfTable& table, std::span<const SweepRow> rows) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = to_json(config);
    j["sieve_checksum"] = checksum_hex(table_checksum(table));
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) j["rows"].push_back(to_json(r));
    return j;
}

// ---------------------------------------------------------------------------
// Comparison across reference sets

struct CompareRow {
    std::string set;
    double x = 0;
    std::size_t element_count = 0;
    std::optional<double> S, defect_divisor, defect_loglog, lgr_normalized;
};

inline constexpr std::string_view kCompareHeader = "set,x,S,defect_divisor,defect_times_loglog,lgr_normalized,element_count";

/// Number of prime factors that defines the growth normalization, if any.
inline std::optional<int> lgr_order(const SetSpec& spec) {
    if (std::holds_alternative<sets::Primes>(spec)) return 1;
    if (auto* s = std::get_if<sets::ExactlyKAlmost>(&spec)) return s->k;
    return std::nullopt;
}

inline std::vector<CompareRow> run_compare(std::span<const std::string> set_names, std::vector<double> xs,
                                           double c0, const SpfTable& table, unsigned threads = 1) {
    std::ranges::sort(xs);
    std::vector<CompareRow> out;
    if (xs.empty()) return out;
    for (const auto& name : set_names) {
        const SetSpec spec = parse_set(name, c0);
        const auto elements = enumerate(spec, xs.back(), table, threads);
        LogProfile prof(elements.empty() ? 1 : elements.back());
        std::size_t next = 0;
        for (double x : xs) {
            while (next < elements.size() && static_cast<double>(elements[next]) <= x) {
                prof.add(factorize(elements[next], table));
                ++next;
            }
            CompareRow r;
            r.set = name;
            r.x = x;
            r.element_count = prof.count();
            if (prof.count() > 0) {
                r.S = prof.S();
                r.defect_divisor = divisor_defect_from(prof, table);
                const double l2 = iterated_log(x, 2);
                r.defect_loglog = *r.defect_divisor * l2;
                if (auto k = lgr_order(spec)) {
                    r.lgr_normalized = std::exp(std::log(*r.S) + log_factorial(*k) - *k * std::log(l2));
                }
            }
            out.push_back(std::move(r));
        }
    }
    return out;
}

inline std::string to_csv(std::span<const CompareRow> rows) {
    std::string s(kCompareHeader);
    s += '\n';
    for (const auto& r : rows) {
        s += r.set;
        s += ',';
        s += format_number(r.x);
        for (const auto* f : {&r.S, &r.defect_divisor, &r.defect_loglog, &r.lgr_normalized}) {
            s += ',';
            if (*f) s += format_number(**f);
        }
        s += ',';
        s += std::to_string(r.element_count);
        s += '\n';
    }
    return s;
}

}  // namespace lcmlab
