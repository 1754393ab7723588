// lcmlab: sieve management, set construction, sweeps, comparisons and the
// self-verification runner.
//
// Exit codes: 0 success, 1 other error, 2 config error, 3 capacity error,
// 4 verification failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lcmlab/construction.hpp"
#include "lcmlab/defect_engine.hpp"
#include "lcmlab/experiment.hpp"
#include "lcmlab/logarithmic_stats.hpp"
#include "lcmlab/prime_engine.hpp"
#include "lcmlab/set_library.hpp"
#include "lcmlab/verify.hpp"

#ifndef LCMLAB_DEFAULT_BASELINE
#define LCMLAB_DEFAULT_BASELINE ""
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kCapacity = 3, kVerifyFailed = 4 };

struct SieveOptions {
    std::uint64_t limit = lcmlab::kDefaultSieveLimit;
    std::string cache;
    bool allow_large = false;
};

fs::path default_cache_dir() {
    if (const char* d = std::getenv("LCMLAB_CACHE_DIR"); d && *d) return d;
    if (const char* d = std::getenv("XDG_CACHE_HOME"); d && *d) return fs::path(d) / "lcmlab";
    if (const char* d = std::getenv("HOME"); d && *d) return fs::path(d) / ".cache" / "lcmlab";
    return ".lcmlab-cache";
}

fs::path cache_path(const SieveOptions& s) {
    if (!s.cache.empty()) return s.cache;
    return default_cache_dir() / ("spf-" + std::to_string(s.limit) + ".bin");
}

void check_limit(const SieveOptions& s) {
    if (s.limit > lcmlab::kDefaultSieveLimit && !s.allow_large) {
        throw lcmlab::CapacityError("sieve limit " + std::to_string(s.limit) + " exceeds " +
                                    std::to_string(lcmlab::kDefaultSieveLimit) + "; pass --allow-large (hard max " +
                                    std::to_string(lcmlab::kMaxSieveLimit) + ")");
    }
    lcmlab::check_sieve_limit(s.limit);
}

/// Loads the cached table when it matches the requested limit, else sieves.
lcmlab::SpfTable obtain_table(const SieveOptions& s) {
    check_limit(s);
    const fs::path path = cache_path(s);
    if (fs::exists(path)) {
        try {
            auto t = lcmlab::load_cache(path);
            if (t.limit() == s.limit) return t;
        } catch (const lcmlab::Error& e) {
            std::cerr << "warning: ignoring cache: " << e.what() << '\n';
        }
    }
    return lcmlab::build_spf(s.limit);
}

void add_sieve_flags(CLI::App* cmd, SieveOptions& s) {
    cmd->add_option("--sieve-limit", s.limit, "Largest integer covered by the sieve")->capture_default_str();
    cmd->add_option("--cache", s.cache, "Sieve cache file (default: $LCMLAB_CACHE_DIR/spf-<limit>.bin)");
    cmd->add_flag("--allow-large", s.allow_large, "Permit sieve limits above 10^7 (up to 10^8)");
}

/// Comma-separated x values.
std::vector<double> parse_x_list(const std::string& text) {
    std::vector<double> xs;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            xs.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw lcmlab::ConfigError("bad --grid entry '" + tok + "'");
        }
    }
    return xs;
}

/// "--grid 8" is a per-interval point count; "--grid 1e5,1e6" an explicit list.
lcmlab::GridSpec parse_grid(const std::string& text) {
    lcmlab::GridSpec g;
    if (text.empty()) return g;
    if (text.find_first_not_of("0123456789") == std::string::npos) {
        g.points_per_interval = static_cast<unsigned>(std::stoul(text));
    } else {
        g.points = parse_x_list(text);
    }
    return g;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw lcmlab::Error("cannot write " + out);
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lcmlab: dense sets with small pairwise gcd defect"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lcmlab::kVersion));

    SieveOptions sieve;
    lcmlab::RunConfig cfg;
    std::string grid_text, out, format = "csv", baseline = LCMLAB_DEFAULT_BASELINE, write_baseline;
    std::vector<std::string> set_list;
    double x = 0;

    auto* c_sieve = app.add_subcommand("sieve", "Build and cache the smallest-prime-factor table");
    add_sieve_flags(c_sieve, sieve);
    c_sieve->add_option("--limit", sieve.limit, "Alias for --sieve-limit");

    auto* c_construct = app.add_subcommand("construct", "Write the constructed set up to x as an explicit set file");
    add_sieve_flags(c_construct, sieve);
    c_construct->add_option("--c0", cfg.c0, "Construction parameter C0")->capture_default_str();
    c_construct->add_option("--x", x, "Upper bound x")->required();
    c_construct->add_option("--out", out, "Output file (JSON sidecar at <out>.json)")->required();
    c_construct->add_option("--threads", cfg.threads, "Scan worker threads")->capture_default_str();

    auto add_run_flags = [&](CLI::App* cmd) {
        add_sieve_flags(cmd, sieve);
        cmd->add_option("--c0", cfg.c0, "Construction parameter C0")->capture_default_str();
        cmd->add_option("--x-max", cfg.x_max, "Largest x sampled")->capture_default_str();
        cmd->add_option("--grid", grid_text, "Points per interval, or a comma-separated list of x (compare: always a list)");
        cmd->add_option("--pairwise-cap", cfg.pairwise_cap, "Element cap for the pairwise defect")->capture_default_str();
        cmd->add_option("--c-lgr", cfg.c_lgr, "Constant c in the k <= c * sum 1/p hypothesis")->capture_default_str();
        cmd->add_option("--threads", cfg.threads, "Worker threads (results do not depend on it)")->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "Seed for randomized fixtures")->capture_default_str();
        cmd->add_option("--out", out, "Output path (default stdout)");
    };

    auto* c_sweep = app.add_subcommand("sweep", "Statistics along a grid of x values");
    add_run_flags(c_sweep);
    c_sweep->add_option("--set", cfg.set, "tao | primes | kalmost:K | atmost:K | smooth[:Y] | file:PATH")->capture_default_str();
    c_sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    auto* c_compare = app.add_subcommand("compare", "Defect and growth of reference sets across x");
    add_run_flags(c_compare);
    c_compare->add_option("--set", set_list, "Set to include (repeatable)")->required();

    auto* c_stats = app.add_subcommand("stats", "All defect methods and diagnostics for one set at one x");
    add_run_flags(c_stats);
    c_stats->add_option("--set", cfg.set, "Set specification")->capture_default_str();
    c_stats->add_option("--x", x, "Upper bound x")->required();

    auto* c_verify = app.add_subcommand("verify", "Run the invariant suite and frozen regressions");
    add_run_flags(c_verify);
    c_verify->add_option("--set", cfg.set, "Set used for the sweep checks")->capture_default_str();
    c_verify->add_option("--baseline", baseline, "Frozen regression file")->capture_default_str();
    c_verify->add_option("--write-baseline", write_baseline, "Recompute the baseline values into this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        cfg.sieve_limit = sieve.limit;
        // compare has no intervals, so its --grid is always a list of x values.
        if (!grid_text.empty() && !*c_compare) cfg.grid = parse_grid(grid_text);
        if (!grid_text.empty() && *c_compare) cfg.grid.points = parse_x_list(grid_text);

        if (*c_sieve) {
            check_limit(sieve);
            const fs::path path = cache_path(sieve);
            if (fs::exists(path)) {
                try {
                    if (lcmlab::load_cache(path).limit() == sieve.limit) {
                        std::cerr << "cache " << path.string() << " is valid; nothing to do\n";
                        return kOk;
                    }
                } catch (const lcmlab::Error& e) {
                    std::cerr << "rebuilding: " << e.what() << '\n';
                }
            }
            const auto table = lcmlab::build_spf(sieve.limit);
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            lcmlab::save_cache(table, path);
            std::cerr << "wrote " << path.string() << " (" << fs::file_size(path) << " bytes, crc32 "
                      << lcmlab::checksum_hex(lcmlab::table_checksum(table)) << ")\n";
            return kOk;
        }

        if (*c_construct) {
            const lcmlab::ConstructionParams params(cfg.c0);
            const auto table = obtain_table(sieve);
            const auto w = lcmlab::materialize(lcmlab::sets::TaoConstruction{params}, x, table, cfg.threads);
            std::ostringstream body;
            lcmlab::write_explicit(body, w.elements, "tao construction C0=" + lcmlab::format_number(cfg.c0) +
                                                         " x=" + lcmlab::format_number(x));
            emit(out, body.str());
            json side = {{"C0", cfg.c0}, {"x", x}, {"count", w.size()}, {"S", w.S}};
            const auto k_hi = lcmlab::interval_index(x, params);
            side["k_range"] = k_hi ? json::array({params.k_min(), *k_hi}) : json(nullptr);
            emit(out + ".json", side.dump(2) + "\n");
            return kOk;
        }

        if (*c_sweep) {
            cfg.validate();
            const auto table = obtain_table(sieve);
            const auto result = lcmlab::run_sweep(cfg, table);
            if (format == "csv") {
                emit(out, lcmlab::to_csv(result.rows));
            } else {
                emit(out, lcmlab::sweep_report(cfg, table, result.rows).dump(2) + "\n");
            }
            return kOk;
        }

        if (*c_compare) {
            if (!cfg.grid.points.empty()) cfg.x_max = *std::ranges::max_element(cfg.grid.points);
            cfg.validate();
            const auto table = obtain_table(sieve);
            auto xs = cfg.grid.points.empty() ? std::vector<double>{cfg.x_max} : cfg.grid.points;
            emit(out, lcmlab::to_csv(lcmlab::run_compare(set_list, xs, cfg.c0, table, cfg.threads)));
            return kOk;
        }

        if (*c_stats) {
            cfg.x_max = 1;  // x is checked against the sieve when the set is built
            cfg.validate();
            const auto table = obtain_table(sieve);
            const auto spec = lcmlab::parse_set(cfg.set, cfg.c0);
            const auto w = lcmlab::materialize(spec, x, table, cfg.threads);
            json j = {{"set", w.provenance}, {"x", x}, {"element_count", w.size()}, {"S", w.S}};
            if (!w.empty()) {
                const auto ds = lcmlab::defect_divisor_sum(w, table);
                const auto pt = lcmlab::defect_prime_truncated(w, table);
                const auto diag = lcmlab::upper_bound_diagnostics(w, table);
                j["defect_divisor"] = ds.defect;
                j["e_gcd"] = *ds.e_gcd;
                j["defect_prime_lb"] = pt.defect;
                if (w.size() <= cfg.pairwise_cap) {
                    const auto pw = lcmlab::defect_pairwise(w, cfg.pairwise_cap, cfg.threads);
                    j["defect_pairwise"] = pw.defect;
                    j["e_gcd_pairwise"] = *pw.e_gcd;
                    j["conc_offdiag"] = *pw.conc_offdiag;
                } else {
                    j["defect_pairwise"] = nullptr;
                }
                j["diagnostics"] = {{"sumP", diag.sumP},
                                    {"D2", diag.D2},
                                    {"cs_bound", diag.cs_bound},
                                    {"E_omega", diag.E_omega},
                                    {"jensen_quantity", diag.jensen_quantity},
                                    {"est3_rhs_exponent", diag.est3_rhs_exponent}};
            }
            emit(out, j.dump(2) + "\n");
            return kOk;
        }

        if (*c_verify) {
            cfg.validate();
            const auto table = obtain_table(sieve);
            if (!write_baseline.empty()) {
                std::ifstream in(baseline);
                if (!in) throw lcmlab::Error("cannot open baseline template " + baseline);
                emit(write_baseline, lcmlab::regenerate_baseline(json::parse(in), table).dump(2) + "\n");
                return kOk;
            }
            lcmlab::VerifyOptions opt{cfg, baseline};
            const auto report = lcmlab::run_verification(opt, table);
            for (const auto& c : report.checks) {
                std::cerr << (c.skipped ? "[SKIP] " : c.passed ? "[PASS] " : "[FAIL] ") << c.name << '\n';
            }
            json verdict = {{"version", lcmlab::kVersion},
                            {"config", lcmlab::to_json(cfg)},
                            {"sieve_checksum", lcmlab::checksum_hex(lcmlab::table_checksum(table))},
                            {"passed", report.passed()},
                            {"checks", lcmlab::to_json(report)}};
            emit(out, verdict.dump(2) + "\n");
            return report.passed() ? kOk : kVerifyFailed;
        }
    } catch (const lcmlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const lcmlab::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return kCapacity;
    } catch (const lcmlab::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kConfig;
    } catch (const lcmlab::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
