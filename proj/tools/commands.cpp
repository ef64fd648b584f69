#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hardedge/bessel.hpp"
#include "hardedge/brownian.hpp"
#include "hardedge/ensemble.hpp"
#include "hardedge/errors.hpp"
#include "hardedge/riccati.hpp"
#include "hardedge/sbo.hpp"
#include "hardedge/validation.hpp"

#ifndef HARDEDGE_VERSION
#define HARDEDGE_VERSION "0.0.0"
#endif

namespace hardedge::cli {

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kGridDriftBound = 1e-3;

// Sub-experiment tags under the master seed.
constexpr std::uint64_t kTagEnsemble = 1;
constexpr std::uint64_t kTagSbo = 2;
constexpr std::uint64_t kTagRiccati = 3;
constexpr std::uint64_t kTagTransition = 4;

const char* const kStreamPolicy =
    "Philox4x64-10 keyed by (seed, stream id). A command uses the family with base tag << 40; "
    "draw or path i uses stream id base + i, independent of the worker count. Within a draw, "
    "lanes separate the environment path (0) from bridge and chi sub-streams. Transition runs "
    "use tag 4 + mu index and share one family across eta.";

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string());
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + file.string() + " for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("write failed for " + file.string());
}

void write_manifest(const std::string& command, const json& params, const RunContext& ctx, json extra) {
    json m;
    m["schema_version"] = kSchemaVersion;
    m["subcommand"] = command;
    m["params"] = params;
    m["seed"] = params.at("seed");
    m["stream_policy"] = kStreamPolicy;
    m["tool_version"] = HARDEDGE_VERSION;
    m["timestamp"] = utc_timestamp();
    m["command_line"] = ctx.command_line;
    if (!extra.is_null()) m["checks"] = std::move(extra);
    write_text(ctx.out / "manifest.json", m.dump(2) + "\n");
}

// Missing keys fall back to the defaults; unknown keys are rejected.
json merged(const json& defaults, const json& given) {
    json out = defaults;
    for (auto it = given.begin(); it != given.end(); ++it) {
        detail::require(defaults.contains(it.key()), "unknown parameter '" + it.key() + "'");
        out[it.key()] = it.value();
    }
    return out;
}

std::size_t positive_count(const json& params, const char* key) {
    const auto v = params.at(key).get<long long>();
    detail::require(v >= 1, std::string(key) + " must be at least 1");
    return static_cast<std::size_t>(v);
}

StreamFamily family(const json& params, std::uint64_t tag) {
    return StreamFamily{params.at("seed").get<std::uint64_t>(), 0}.sub(tag);
}

std::string csv_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_number(values[i]);
    }
    return line + "\n";
}

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_beta(const std::string& text) {
    if (text == "inf") return INFINITY;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DomainError("beta must be a positive number or 'inf', got '" + text + "'");
    }
    detail::require(used == text.size() && std::isfinite(v) && v > 0.0,
                    "beta must be a positive number or 'inf', got '" + text + "'");
    return v;
}

json ensemble_defaults() {
    return {{"n", 100}, {"beta", "2"}, {"a", 0.0}, {"k", 1}, {"samples", 10000}, {"seed", 1}};
}

json sbo_defaults() {
    return {{"beta", "2"}, {"a", 0.0},        {"domain_length", 20.0}, {"step", 0.001953125},
            {"k", 1},      {"samples", 1000}, {"seed", 1}};
}

json riccati_cdf_defaults() {
    return {{"beta", "2"},  {"a", 0.0},           {"grid", {0.5, 1.0, 2.0}},
            {"k", 0},       {"paths", 10000},     {"domain_length", 20.0},
            {"step", 1e-3}, {"route", "riccati"}, {"seed", 1}};
}

json transition_defaults() {
    return {{"beta", "2"},   {"mu_grid", {-2.0, 0.0, 2.0}}, {"eta_list", {100.0, 1000.0, 10000.0}},
            {"paths", 10000}, {"horizon", 8.0},              {"step", 1e-3},
            {"seed", 1}};
}

json validate_defaults() {
    ValidationConfig c;
    return {{"seed", c.seed}, {"only", json::array()}};
}

int run_ensemble(const json& given, const RunContext& ctx) {
    const json p = merged(ensemble_defaults(), given);
    const auto n = positive_count(p, "n");
    const auto k = positive_count(p, "k");
    const auto samples = positive_count(p, "samples");
    const double beta = parse_beta(p.at("beta").get<std::string>());
    detail::require(std::isfinite(beta), "the matrix model needs a finite beta");
    detail::require(k <= n, "k must not exceed n");
    const double a = p.at("a").get<double>();
    check_params(n, beta, a);
    prepare_dir(ctx.out);

    const auto draws = scaled_minima_draws(n, beta, a, k, samples, family(p, kTagEnsemble));
    std::string csv;
    for (std::size_t j = 0; j < k; ++j) csv += (j ? ",n_lambda_" : "n_lambda_") + std::to_string(j);
    csv += "\n";
    for (const auto& row : draws) csv += csv_row(row);
    write_text(ctx.out / "samples.csv", csv);
    write_manifest("ensemble", p, ctx, json());
    return kOk;
}

int run_sbo(const json& given, const RunContext& ctx) {
    const json p = merged(sbo_defaults(), given);
    const double beta = parse_beta(p.at("beta").get<std::string>());
    const double a = p.at("a").get<double>();
    const double length = p.at("domain_length").get<double>();
    const double h = p.at("step").get<double>();
    const auto k = positive_count(p, "k");
    // With no noise every draw is the same; one row suffices.
    const auto samples = std::isinf(beta) ? std::size_t{1} : positive_count(p, "samples");
    detail::require(a > -1.0, "a must exceed -1");
    detail::require(length > 0.0 && h > 0.0 && h <= length, "need 0 < step <= domain_length");
    prepare_dir(ctx.out);

    const auto fam = family(p, kTagSbo);
    const auto draws = sbo_minima_draws(a, beta, length, h, k, samples, fam);
    std::string csv;
    for (std::size_t j = 0; j < k; ++j) csv += (j ? ",Lambda_" : "Lambda_") + std::to_string(j);
    csv += "\n";
    for (const auto& row : draws) csv += csv_row(row);
    write_text(ctx.out / "samples.csv", csv);

    // Grid convergence on the environment of draw 0: halve h, filling the
    // midpoints by Brownian bridges.
    auto stream = fam.stream(0);
    auto grid = uniform_grid(length, h);
    const auto coarse = std::isinf(beta) ? EnvironmentPath::zero(grid) : sample_path(grid, stream);
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) mids.push_back(0.5 * (grid[i] + grid[i + 1]));
    auto bridge = fam.stream(0, 1);
    const auto fine = bridge_refine(coarse, mids, bridge);
    const double l_coarse = sbo_eigenvalues(a, beta, length, h, 1, coarse)[0];
    const double l_fine = sbo_eigenvalues(a, beta, length, 0.5 * h, 1, fine)[0];
    const double drift = std::abs(l_fine - l_coarse);
    json checks;
    checks["grid_convergence"] = {{"step", h},
                                  {"lambda_0", l_coarse},
                                  {"lambda_0_half_step", l_fine},
                                  {"drift", drift},
                                  {"bound", kGridDriftBound},
                                  {"within_bound", drift < kGridDriftBound}};
    if (std::isinf(beta)) {
        json oracle = json::array();
        for (std::size_t j = 0; j < k; ++j) {
            const double z = bessel_zero(a, static_cast<int>(j) + 1);
            oracle.push_back(
                {{"k", j}, {"lambda", draws[0][j]}, {"j_sq", z * z}, {"j_sq_over_4", 0.25 * z * z}});
        }
        checks["bessel_oracle"] = oracle;
    }
    write_manifest("sbo", p, ctx, checks);
    return kOk;
}

int run_riccati_cdf(const json& given, const RunContext& ctx) {
    const json p = merged(riccati_cdf_defaults(), given);
    HardEdgeParams hp;
    hp.beta = parse_beta(p.at("beta").get<std::string>());
    detail::require(std::isfinite(hp.beta), "riccati-cdf needs a finite beta");
    hp.a = p.at("a").get<double>();
    hp.length = p.at("domain_length").get<double>();
    hp.dx = p.at("step").get<double>();
    const auto k = p.at("k").get<long long>();
    detail::require(k >= 0, "k must be non-negative");
    const auto paths = positive_count(p, "paths");
    const auto route_name = p.at("route").get<std::string>();
    detail::require(route_name == "riccati" || route_name == "psi", "route must be 'riccati' or 'psi'");
    const auto route = route_name == "psi" ? CountRoute::Psi : CountRoute::Riccati;
    const auto grid = p.at("grid").get<std::vector<double>>();
    detail::require(!grid.empty(), "lambda grid is empty");
    for (double l : grid) detail::require(l >= 0.0 && std::isfinite(l), "lambda values must be >= 0");
    check_params(hp);
    prepare_dir(ctx.out);

    // Every lambda reuses the same paths, so the estimates are monotone.
    const auto fam = family(p, kTagRiccati);
    std::string csv = "lambda,probability,standard_error\n";
    for (double l : grid) {
        hp.lambda = l;
        const auto prob = cdf_lambda_k(hp, static_cast<std::size_t>(k), paths, fam, route);
        csv += csv_row({l, prob.p, prob.se});
    }
    write_text(ctx.out / "cdf.csv", csv);
    write_manifest("riccati-cdf", p, ctx, json());
    return kOk;
}

int run_transition(const json& given, const RunContext& ctx) {
    const json p = merged(transition_defaults(), given);
    const double beta = parse_beta(p.at("beta").get<std::string>());
    detail::require(std::isfinite(beta), "transition needs a finite beta");
    const auto mus = p.at("mu_grid").get<std::vector<double>>();
    const auto etas = p.at("eta_list").get<std::vector<double>>();
    detail::require(!mus.empty() && !etas.empty(), "mu grid and eta list must be non-empty");
    const auto paths = positive_count(p, "paths");
    SoftEdgeParams soft;
    soft.beta = beta;
    soft.x_max = p.at("horizon").get<double>();
    soft.dx = p.at("step").get<double>();
    for (double mu : mus)
        for (double eta : etas) check_params(TransitionParams{eta, mu, beta});
    check_params(soft);
    prepare_dir(ctx.out);

    std::string csv = "eta,mu,p_hard,p_soft,abs_difference\n";
    for (std::size_t m = 0; m < mus.size(); ++m) {
        const auto fam = family(p, kTagTransition).sub(m);
        soft.mu = mus[m];
        for (double eta : etas) {
            const auto r = hard_to_soft(TransitionParams{eta, mus[m], beta}, soft, paths, fam);
            csv += csv_row({eta, mus[m], r.hard.p, r.soft.p, r.difference});
        }
    }
    write_text(ctx.out / "transition.csv", csv);
    write_manifest("transition", p, ctx, json());
    return kOk;
}

int run_validate(const json& given, const RunContext& ctx) {
    const json p = merged(validate_defaults(), given);
    ValidationConfig config;
    config.seed = p.at("seed").get<std::uint64_t>();
    for (int id : p.at("only").get<std::vector<int>>()) config.only.insert(id);
    const auto results = run_validation(config);
    prepare_dir(ctx.out);
    const auto report = validation_report(results, config);
    write_text(ctx.out / "report.json", report.dump(2) + "\n");
    write_manifest("validate", p, ctx, json());
    for (const auto& r : results) std::cout << summary_line(r) << "\n";
    return report.at("all_pass").get<bool>() ? kOk : kCheckFailure;
}

int replay(const std::filesystem::path& manifest, const RunContext& ctx) {
    std::ifstream is(manifest);
    if (!is) throw IoError("cannot read manifest " + manifest.string());
    json m;
    try {
        m = json::parse(is);
    } catch (const json::exception& e) {
        throw DomainError(std::string("manifest is not valid JSON: ") + e.what());
    }
    detail::require(m.value("schema_version", 0) == kSchemaVersion, "unsupported manifest schema version");
    const auto command = m.at("subcommand").get<std::string>();
    const json& params = m.at("params");
    if (command == "ensemble") return run_ensemble(params, ctx);
    if (command == "sbo") return run_sbo(params, ctx);
    if (command == "riccati-cdf") return run_riccati_cdf(params, ctx);
    if (command == "transition") return run_transition(params, ctx);
    if (command == "validate") return run_validate(params, ctx);
    throw DomainError("manifest names unknown subcommand '" + command + "'");
}

}  // namespace hardedge::cli
