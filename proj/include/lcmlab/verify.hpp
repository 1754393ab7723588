#pragma once

// Self-check suite behind `lcmlab verify`: every structural invariant of the
// library evaluated at the configured scale, plus recomputation of the
// frozen regression values in a baseline file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "lcmlab/construction.hpp"
#include "lcmlab/defect_engine.hpp"
#include "lcmlab/experiment.hpp"
#include "lcmlab/logarithmic_stats.hpp"
#include "lcmlab/prime_engine.hpp"
#include "lcmlab/set_library.hpp"

namespace lcmlab {

/// Meissel-Mertens constant.
inline constexpr double kMertensConstant = 0.26149721284764278375542683860869585;

struct CheckResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    nlohmann::json detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool passed() const {
        return std::ranges::all_of(checks, [](const CheckResult& c) { return c.passed || c.skipped; });
    }
};

inline bool within_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Random strictly increasing set of up to max_size elements from [1, max_value].
inline std::vector<std::uint64_t> random_set(std::mt19937_64& rng, std::size_t max_size, std::uint64_t max_value) {
    std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
    std::uniform_int_distribution<std::uint64_t> value_dist(1, max_value);
    std::vector<std::uint64_t> v(size_dist(rng));
    for (auto& e : v) e = value_dist(rng);
    std::ranges::sort(v);
    auto [first, last] = std::ranges::unique(v);
    v.erase(first, last);
    return v;
}

// ---------------------------------------------------------------------------
// Regression baseline

/// Recomputes one baseline quantity; nullopt when it needs a larger sieve.
inline std::optional<double> regression_value(const nlohmann::json& entry, const SpfTable& table) {
    const std::string kind = entry.at("kind");
    const auto& p = entry.at("params");
    auto fits = [&](double x) { return x <= static_cast<double>(table.limit()); };
    if (kind == "mertens_sum") {
        const double y = p.at("y");
        if (!fits(y)) return std::nullopt;
        return mertens_sum(y, table);
    }
    if (kind == "tao_count" || kind == "tao_S" || kind == "tao_defect") {
        const double x = p.at("x");
        if (!fits(x)) return std::nullopt;
        const auto w = materialize(sets::TaoConstruction{ConstructionParams(p.at("c0"))}, x, table);
        if (kind == "tao_count") return static_cast<double>(w.size());
        if (kind == "tao_S") return w.S;
        return defect_divisor_sum(w, table).defect;
    }
    if (kind == "primes_defect_loglog") {
        const double x = p.at("x");
        if (!fits(x)) return std::nullopt;
        return defect_divisor_sum(materialize(sets::Primes{}, x, table), table).defect * iterated_log(x, 2);
    }
    if (kind == "kalmost_norm") {
        const double x = p.at("x");
        const int k = p.at("k");
        if (!fits(x)) return std::nullopt;
        const auto w = materialize(sets::ExactlyKAlmost{{}, k}, x, table);
        return std::exp(std::log(w.S) + log_factorial(k) - k * std::log(iterated_log(x, 2)));
    }
    if (kind == "lgr_ratio") {
        const double x = p.at("x"), y = p.at("y");
        if (!fits(x) || !fits(y)) return std::nullopt;
        return lgr_report(PrimeFilter{y, {}}, p.at("k"), x, table).ratio();
    }
    if (kind == "logall_lhs") {
        const double x = p.at("x"), y = p.at("y");
        if (!fits(x) || !fits(y)) return std::nullopt;
        return logall_report(PrimeFilter{y, {}}, x, table).lhs;
    }
    if (kind == "sweep_log_ratio_span" || kind == "sweep_max_defect") {
        RunConfig c;
        c.c0 = p.at("c0");
        c.x_max = p.at("x_max");
        c.sieve_limit = table.limit();
        c.grid.points_per_interval = p.at("points_per_interval");
        if (!fits(c.x_max)) return std::nullopt;
        const auto rows = run_sweep(c, table).rows;
        double lo = INFINITY, hi = -INFINITY, dmax = -INFINITY;
        for (const auto& r : rows) {
            if (r.log_ratio) {
                lo = std::min(lo, *r.log_ratio);
                hi = std::max(hi, *r.log_ratio);
            }
            if (r.defect_divisor) dmax = std::max(dmax, *r.defect_divisor);
        }
        return kind == "sweep_max_defect" ? dmax : hi - lo;
    }
    throw Error("unknown regression kind '" + kind + "'");
}

inline nlohmann::json regenerate_baseline(const nlohmann::json& baseline, const SpfTable& table) {
    nlohmann::json out = baseline;
    for (auto& e : out.at("entries")) {
        if (auto v = regression_value(e, table)) e["value"] = *v;
    }
    return out;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
    RunConfig config;
    std::filesystem::path baseline;
    std::size_t random_sets = 200;
};

namespace detail {

class CheckList {
public:
    explicit CheckList(VerifyReport& r) : report_(r) {}

    template <class F>
    void run(const std::string& name, F&& body) {
        CheckResult c;
        c.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.passed = body(c.detail);
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail["error"] = e.what();
        }
        c.detail["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report_.checks.push_back(std::move(c));
    }

    void skip(const std::string& name, const std::string& why) {
        CheckResult c;
        c.name = name;
        c.skipped = true;
        c.detail["skipped"] = why;
        report_.checks.push_back(std::move(c));
    }

private:
    VerifyReport& report_;
};

}  // namespace detail

inline VerifyReport run_verification(const VerifyOptions& opt, const SpfTable& table) {
    using nlohmann::json;
    VerifyReport report;
    detail::CheckList checks(report);
    const RunConfig& cfg = opt.config;
    const std::uint64_t limit = table.limit();
    std::mt19937_64 rng(cfg.seed);
    double min_e_gcd = INFINITY;

    checks.run("spf_matches_trial_division", [&](json& d) {
        const std::uint64_t top = std::min<std::uint64_t>(limit, 10'000);
        for (std::uint64_t n = 2; n <= top; ++n) {
            std::uint64_t p = 2;
            while (n % p != 0) ++p;
            if (table.spf(n) != p) {
                d["first_failure"] = n;
                return false;
            }
        }
        d["checked_up_to"] = top;
        return true;
    });

    checks.run("gauss_identity_integers", [&](json& d) {
        const std::uint64_t top = std::min<std::uint64_t>(limit, 10'000);
        std::vector<std::uint64_t> acc(top + 1, 0);
        for (std::uint64_t dd = 1; dd <= top; ++dd) {
            const auto phi = euler_phi(factorize(dd, table));
            for (std::uint64_t m = dd; m <= top; m += dd) acc[m] += phi;
        }
        for (std::uint64_t n = 1; n <= top; ++n) {
            if (acc[n] != n) {
                d["first_failure"] = n;
                return false;
            }
        }
        d["checked_up_to"] = top;
        return true;
    });

    checks.run("phi_multiplicative", [&](json& d) {
        std::uniform_int_distribution<std::uint64_t> dist(1, std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::sqrt(double(limit)))));
        int tested = 0;
        while (tested < 10'000) {
            const auto a = dist(rng), b = dist(rng);
            if (std::gcd(a, b) != 1 || a * b > limit) continue;
            if (euler_phi(factorize(a * b, table)) != euler_phi(factorize(a, table)) * euler_phi(factorize(b, table))) {
                d["failure"] = {a, b};
                return false;
            }
            ++tested;
        }
        d["pairs"] = tested;
        return true;
    });

    checks.run("mertens_sum", [&](json& d) {
        const double y = std::min<double>(static_cast<double>(limit), 1e6);
        double prev = 0;
        for (double t = 2; t <= y; t *= 1.5) {
            const double v = mertens_sum(t, table);
            if (v < prev) return false;
            prev = v;
        }
        const double diff = mertens_sum(y, table) - std::log(std::log(y)) - kMertensConstant;
        d["y"] = y;
        d["difference"] = diff;
        return std::abs(diff) < 0.05;
    });

    checks.run("worked_example_2_3", [&](json& d) {
        const auto w = make_weighted({2, 3}, 10, "explicit");
        const auto pw = defect_pairwise(w);
        const auto ds = defect_divisor_sum(w, table);
        d["S"] = w.S;
        d["e_gcd"] = *pw.e_gcd;
        d["defect_pairwise"] = pw.defect;
        d["defect_divisor"] = ds.defect;
        return std::abs(w.S - 5.0 / 6) <= 1e-12 && std::abs(*pw.e_gcd - 42.0 / 25) <= 1e-12 &&
               std::abs(pw.defect - 17.0 / 25) <= 1e-12 && std::abs(ds.defect - 17.0 / 25) <= 1e-12;
    });

    checks.run("gauss_defect_equivalence", [&](json& d) {
        const std::uint64_t max_value = std::min<std::uint64_t>(limit, 100'000);
        double worst = 0;
        for (std::size_t i = 0; i < opt.random_sets; ++i) {
            const auto w = make_weighted(random_set(rng, 200, max_value), static_cast<double>(max_value), "random");
            const auto pw = defect_pairwise(w, cfg.pairwise_cap);
            const auto ds = defect_divisor_sum(w, table);
            min_e_gcd = std::min(min_e_gcd, *pw.e_gcd);
            const double err = std::abs(pw.defect - ds.defect) / std::max(1.0, ds.defect);
            worst = std::max(worst, err);
            // sum_{n,m} 1/lcm = 2 sum_{n<m} 1/lcm + sum_n 1/n
            const double lhs = *pw.e_gcd * w.S * w.S;
            const double rhs = 2 * *pw.conc_offdiag * w.S * w.S + w.S;
            if (!within_rel(lhs, rhs, 1e-12)) {
                d["diagonal_identity_failure"] = i;
                return false;
            }
        }
        d["sets"] = opt.random_sets;
        d["worst_relative_gap"] = worst;
        return worst <= 1e-9;
    });

    checks.run("lgr_upper_inequality", [&](json& d) {
        double worst = 0;
        int cases = 0;
        for (double y : {1e3, 1e4, 1e6}) {
            for (double x : {1e3, 1e6}) {
                if (y > limit || x > limit) continue;
                for (int k : {0, 1, 2, 3, 5}) {
                    const auto r = lgr_report(PrimeFilter{y, {}}, k, x, table);
                    worst = std::max(worst, r.ratio());
                    ++cases;
                    if (r.hypothesis_holds(cfg.c_lgr) && r.ratio() < 0.5) {
                        d["lower_direction_failure"] = {y, x, k};
                        return false;
                    }
                }
            }
        }
        d["cases"] = cases;
        d["max_ratio"] = worst;
        return cases > 0 && worst <= 1 + 1e-12;
    });

    checks.run("logall_inequality", [&](json& d) {
        int cases = 0;
        for (double y : {1e3, 1e4, 1e6}) {
            for (double x : {1e3, 1e6}) {
                if (y > limit || x > limit) continue;
                const auto r = logall_report(PrimeFilter{y, {}}, x, table);
                if (r.lhs > r.rhs_product * (1 + 1e-12)) return false;
                ++cases;
            }
        }
        const auto eq = logall_report(PrimeFilter{3, {}}, 100, table);
        d["cases"] = cases;
        d["equality_case"] = {eq.lhs, eq.rhs_product};
        return eq.complete && within_rel(eq.lhs, eq.rhs_product, 1e-12) && within_rel(eq.lhs, 2.0, 1e-12);
    });

    checks.run("construction_dfs_equals_scan", [&](json& d) {
        const double x = std::min<double>(static_cast<double>(limit), 1e5);
        for (double c0 : {3.0, 4.0, 5.0}) {
            const ConstructionParams params(c0);
            const auto scan = enumerate_A(x, params, table);
            const auto dfs = enumerate_A_dfs(x, params, table);
            d["count_c0_" + std::to_string(int(c0))] = scan.size();
            if (scan != dfs) return false;
        }
        return true;
    });

    checks.run("construction_structure", [&](json& d) {
        const double x = std::min<double>(static_cast<double>(limit), 1e5);
        for (double c0 : {3.0, 4.0, 5.0}) {
            const ConstructionParams params(c0);
            for (auto n : enumerate_A(x, params, table)) {
                const auto f = factorize(n, table);
                const auto k = *interval_index(static_cast<double>(n), params);
                std::int64_t large = 0;
                for (const auto& pp : f.factors()) large += std::log(double(pp.prime)) > params.log_marker(k);
                if (!is_squarefree(f) || static_cast<std::int64_t>(f.omega()) > k + 1 || large > 1) {
                    d["failure"] = n;
                    return false;
                }
            }
        }
        return true;
    });

    SweepResult sweep;
    checks.run("sweep", [&](json& d) {
        sweep = run_sweep(cfg, table);
        d["rows"] = sweep.rows.size();
        return !sweep.rows.empty();
    });

    checks.run("interval_functions", [&](json& d) {
        const ConstructionParams params(cfg.c0);
        for (const auto& r : sweep.rows) {
            if (!r.k) continue;
            if (*r.h <= std::sqrt(double(*r.k)) / cfg.c0 && !(*r.psi < 1.5 + 1e-9)) {
                d["psi_flat_failure"] = r.x;
                return false;
            }
        }
        for (std::int64_t k = params.k_min(); k < params.k_min() + 40; ++k) {
            const double lo = params.boundary(double(k)), hi = params.boundary(double(k + 1));
            const auto start = detail::point_from_loglog(0, lo + 1e-9, k, params);
            if (start.h < 1 || start.h > 1 + 1e-6) return false;
            double prev = 0;
            for (int j = 1; j <= 64; ++j) {
                const auto pt = detail::point_from_loglog(0, lo + (hi - lo) * j / 64, k, params);
                if (pt.eps < prev) return false;
                prev = pt.eps;
            }
            if (std::abs(prev - 1.0) > 1e-12) return false;
        }
        return true;
    });

    checks.run("probability_identities", [&](json& d) {
        int fixtures = 0;
        for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
            const auto& r = sweep.rows[i];
            const auto& g = sweep.diagnostics[i];
            if (!g) continue;
            ++fixtures;
            if (!(g->sumP <= g->cs_bound * (1 + 1e-12))) {
                d["cauchy_failure"] = r.x;
                return false;
            }
            if (!within_rel(g->E_omega, g->sumP, 1e-12)) {
                d["linearity_failure"] = r.x;
                return false;
            }
            if (!(g->jensen_quantity >= std::exp(-g->E_omega * g->log3x) * (1 - 1e-12))) {
                d["jensen_failure"] = r.x;
                return false;
            }
            // log S <= E omega * Log3 x + log prod (1 + e^{-Log3 x}/(p-1))
            const double bound = g->E_omega * g->log3x + g->log_euler_product;
            if (!(*r.logS <= bound + 1e-9)) {
                d["growth_bound_failure"] = r.x;
                return false;
            }
            min_e_gcd = std::min(min_e_gcd, 1.0 + *r.defect_divisor);
        }
        d["fixtures"] = fixtures;
        return fixtures > 0;
    });

    checks.run("defect_ordering", [&](json&) {
        for (const auto& r : sweep.rows) {
            if (r.defect_divisor && *r.defect_prime_lb > *r.defect_divisor + 1e-12) return false;
        }
        return true;
    });

    checks.run("trivial_bound", [&](json& d) {
        d["min_e_gcd"] = min_e_gcd;
        return min_e_gcd >= 1 - 1e-12;
    });

    checks.run("log_ratio_band", [&](json& d) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& r : sweep.rows) {
            if (!r.log_ratio) continue;
            lo = std::min(lo, *r.log_ratio);
            hi = std::max(hi, *r.log_ratio);
        }
        d["min"] = lo;
        d["max"] = hi;
        return std::isfinite(hi - lo) && hi - lo <= std::log(100.0);
    });

    checks.run("csv_roundtrip", [&](json& d) {
        const SetSpec spec = parse_set(cfg.set, cfg.c0);
        const ConstructionParams params(cfg.c0);
        std::uniform_int_distribution<std::size_t> pick(0, sweep.rows.size() - 1);
        for (int i = 0; i < 10; ++i) {
            const std::string line = to_csv_line(sweep.rows[pick(rng)]);
            const SweepRow parsed = parse_csv_line(line);
            const std::string again = to_csv_line(derive_row(spec, params, parsed.x, table));
            if (again != line) {
                d["mismatch"] = {line, again};
                return false;
            }
        }
        return true;
    });

    checks.run("determinism", [&](json& d) {
        RunConfig other = cfg;
        other.threads = cfg.threads == 1 ? 3 : 1;
        const bool same = to_csv(run_sweep(other, table).rows) == to_csv(sweep.rows);
        d["thread_counts"] = {cfg.threads, other.threads};
        return same;
    });

    if (opt.baseline.empty()) {
        checks.skip("baseline", "no baseline file given");
    } else {
        json baseline;
        checks.run("baseline_file", [&](json& d) {
            std::ifstream in(opt.baseline);
            if (!in) throw Error("cannot open " + opt.baseline.string());
            baseline = json::parse(in);
            d["entries"] = baseline.at("entries").size();
            return true;
        });
        if (report.checks.back().passed) {
            const double tol = baseline.value("tolerance", 1e-9);
            for (const auto& e : baseline.at("entries")) {
                const std::string name = "regression:" + e.value("name", std::string("?"));
                std::optional<double> v;
                try {
                    v = regression_value(e, table);
                } catch (const std::exception& ex) {
                    checks.run(name, [&](json& d) {
                        d["error"] = ex.what();
                        return false;
                    });
                    continue;
                }
                if (!v) {
                    checks.skip(name, "needs a larger sieve limit");
                    continue;
                }
                checks.run(name, [&](json& d) {
                    const double frozen = e.at("value");
                    d["frozen"] = frozen;
                    d["measured"] = *v;
                    return within_rel(*v, frozen, tol);
                });
            }
        }
    }
    return report;
}

inline nlohmann::json to_json(const VerifyReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"status", c.skipped ? "skipped" : (c.passed ? "pass" : "fail")},
                          {"detail", c.detail}});
    }
    return checks;
}

}  // namespace lcmlab
