#include "hardedge/validation.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "hardedge/bessel.hpp"
#include "hardedge/ensemble.hpp"
#include "hardedge/parallel.hpp"
#include "hardedge/riccati.hpp"
#include "hardedge/sbo.hpp"
#include "hardedge/stats.hpp"
#include "oracles.hpp"

namespace hardedge {

namespace {

using json = nlohmann::ordered_json;

// Tolerances and sizes, as stated by the acceptance criteria.
constexpr double kDkwBand1e4 = 0.0163;
constexpr std::size_t kSamples = 10000;
constexpr double kSboKs = 0.03;
constexpr double kBesselTol = 1e-2;
constexpr double kNormIdentityTol = 1e-8;
constexpr double kRouteKs = 0.02;
constexpr double kTheorem1FinalKs = 0.05;
constexpr double kTransitionFinal = 0.05;
constexpr double kSolverRelTol = 1e-10;

double exp_cdf(double rate, double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }

StreamFamily family_for(std::uint64_t seed, int criterion, int part) {
    return StreamFamily{seed, 0}.sub(static_cast<std::uint64_t>(criterion * 100 + part));
}

CheckResult exact_exponential_law(std::uint64_t seed) {
    CheckResult r{1, "exact Exp(1) law of n*lambda_0, beta = 2, a = 0", true, json::object()};
    json rows = json::array();
    int part = 0;
    for (std::size_t n : {4, 32, 256}) {
        const auto d = sample_scaled_minima(n, 2.0, 0.0, 1, kSamples, family_for(seed, 1, part++));
        const double ks = ks_distance(d[0], [](double x) { return exp_cdf(1.0, x); });
        rows.push_back({{"n", n}, {"ks", ks}});
        r.pass = r.pass && ks <= kDkwBand1e4;
    }
    r.measured["threshold"] = kDkwBand1e4;
    r.measured["rows"] = rows;
    return r;
}

CheckResult limit_operator_law(std::uint64_t seed) {
    CheckResult r{2, "generator Lambda_0 vs Exp(1), beta = 2, a = 0, L = 20, h = 2^-9", true,
                  json::object()};
    const auto d = sample_sbo_minima(0.0, 2.0, 20.0, std::ldexp(1.0, -9), 1, kSamples, family_for(seed, 2, 0));
    const double ks = ks_distance(d[0], [](double x) { return exp_cdf(1.0, x); });
    r.pass = ks <= kSboKs;
    r.measured = {{"threshold", kSboKs}, {"ks", ks}, {"mean", d[0].mean()}};
    return r;
}

CheckResult bessel_oracle() {
    CheckResult r{3, "beta = inf spectrum vs j_{a,k+1}^2, L = 12, h = 2^-10", true, json::object()};
    json rows = json::array();
    double worst = 0.0;
    double worst_quarter = 0.0;
    for (double a : {0.0, 0.5, 2.0}) {
        const auto grid = uniform_grid(12.0, std::ldexp(1.0, -10));
        const auto ev = sbo_eigenvalues(a, INFINITY, 12.0, std::ldexp(1.0, -10), 3, EnvironmentPath::zero(grid));
        for (int k = 0; k < 3; ++k) {
            const double j = bessel_zero(a, k + 1);
            const double err = std::abs(ev[k] - j * j);
            // The generator's zero-noise eigenfunctions are e^{ax/2} J_a(2 sqrt(L) e^{-x/2}),
            // so its spectrum sits at j^2 / 4; reported alongside the stated target.
            const double err_quarter = std::abs(ev[k] - 0.25 * j * j);
            worst = std::max(worst, err);
            worst_quarter = std::max(worst_quarter, err_quarter);
            rows.push_back({{"a", a},
                            {"k", k},
                            {"lambda", ev[k]},
                            {"j_sq", j * j},
                            {"abs_error", err},
                            {"j_sq_over_4", 0.25 * j * j},
                            {"abs_error_vs_j_sq_over_4", err_quarter}});
        }
    }
    r.pass = worst <= kBesselTol;
    r.measured = {{"threshold", kBesselTol},
                  {"max_abs_error", worst},
                  {"max_abs_error_vs_j_sq_over_4", worst_quarter},
                  {"rows", rows}};
    return r;
}

CheckResult norm_identity(std::uint64_t seed) {
    CheckResult r{4, "||K^T K|| * n * lambda_min = 1, n = 30", true, json::object()};
    json rows = json::array();
    int part = 0;
    for (auto [beta, a] : {std::pair{1.0, 0.0}, std::pair{2.0, 1.0}, std::pair{4.0, 0.5}}) {
        const auto fam = family_for(seed, 4, part++);
        const auto errs = parallel_map(100, [&](std::size_t i) {
            auto stream = fam.stream(i);
            const auto model = sample_model(30, beta, a, stream);
            const double lmin = smallest_eigenvalues(gram_tridiagonal(model), 1, 1e-300, 1e-15)[0];
            const double norm = operator_norm_sq(inverse_kernel(conjugate_antidiagonal(model)), 1e-12);
            return std::abs(norm * 30.0 * lmin - 1.0);
        });
        double worst = 0.0;
        for (double e : errs) worst = std::max(worst, e);
        rows.push_back({{"beta", beta}, {"a", a}, {"max_abs_error", worst}});
        r.pass = r.pass && worst <= kNormIdentityTol;
    }
    r.measured = {{"threshold", kNormIdentityTol}, {"instances_per_pair", 100}, {"rows", rows}};
    return r;
}

EmpiricalDistribution as_distribution(const std::vector<std::size_t>& counts) {
    std::vector<double> v(counts.begin(), counts.end());
    return EmpiricalDistribution(std::move(v));
}

CheckResult route_equivalence(std::uint64_t seed) {
    CheckResult r{5, "explosion counts of p vs zero counts of psi, L = 20", true, json::object()};
    json rows = json::array();
    int part = 0;
    for (double beta : {1.0, 2.0, 4.0})
        for (double a : {0.0, 1.0})
            for (double lambda : {1.0, 4.0}) {
                HardEdgeParams p;
                p.beta = beta;
                p.a = a;
                p.lambda = lambda;
                p.length = 20.0;
                const auto fam = family_for(seed, 5, part++);
                const auto psi = sample_counts(p, kSamples, fam, CountRoute::Psi);
                const auto ric = sample_counts(p, kSamples, fam, CountRoute::Riccati);
                const double ks = ks_distance(as_distribution(psi), as_distribution(ric));
                rows.push_back({{"beta", beta}, {"a", a}, {"lambda", lambda}, {"ks", ks}});
                r.pass = r.pass && ks <= kRouteKs;
            }
    r.measured = {{"threshold", kRouteKs}, {"rows", rows}};
    return r;
}

CheckResult theorem1_trend(std::uint64_t seed) {
    CheckResult r{6, "KS(n*lambda_0, Lambda_0) decreasing in n, beta = 2, a = 1", true, json::object()};
    const std::vector<std::size_t> sizes{50, 200, 800};
    const auto draws = sample_coupled_minima(2.0, 1.0, sizes, 20.0, std::ldexp(1.0, -9), kSamples,
                                             family_for(seed, 6, 0));
    const EmpiricalDistribution limit(draws.limit);
    json rows = json::array();
    std::vector<double> ks;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        ks.push_back(ks_distance(EmpiricalDistribution(draws.scaled[j]), limit));
        rows.push_back({{"n", sizes[j]}, {"ks", ks.back()}});
    }
    for (std::size_t j = 1; j < ks.size(); ++j) r.pass = r.pass && ks[j] < ks[j - 1];
    r.pass = r.pass && ks.back() <= kTheorem1FinalKs;
    r.measured = {{"final_threshold", kTheorem1FinalKs}, {"rows", rows}};
    return r;
}

CheckResult theorem3_trend(std::uint64_t seed) {
    CheckResult r{7, "|P_hard - P_soft| decreasing in eta, <= 0.05 at eta = 1e4, beta = 2", true,
                  json::object()};
    json rows = json::array();
    SoftEdgeParams soft;
    int part = 0;
    for (double mu : {-2.0, 0.0, 2.0}) {
        // Common noise across eta at fixed mu: the trend is compared pathwise.
        const auto fam = family_for(seed, 7, part++);
        std::vector<double> diffs;
        for (double eta : {1e2, 1e3, 1e4}) {
            const auto t = hard_to_soft(TransitionParams{eta, mu, 2.0}, soft, kSamples, fam);
            diffs.push_back(t.difference);
            rows.push_back({{"mu", mu},
                            {"eta", eta},
                            {"p_hard", t.hard.p},
                            {"p_soft", t.soft.p},
                            {"difference", t.difference}});
        }
        for (std::size_t j = 1; j < diffs.size(); ++j) r.pass = r.pass && diffs[j] <= diffs[j - 1];
        r.pass = r.pass && diffs.back() <= kTransitionFinal;
    }
    r.measured = {{"final_threshold", kTransitionFinal}, {"x_max", soft.x_max}, {"dx", soft.dx}, {"rows", rows}};
    return r;
}

CheckResult solver_oracle(std::uint64_t seed) {
    CheckResult r{8, "Sturm bisection vs dense Jacobi, 50 random n = 12", true, json::object()};
    const auto fam = family_for(seed, 8, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        auto stream = fam.stream(i);
        SymmetricTridiagonal t;
        for (int k = 0; k < 12; ++k) t.diag.push_back(4.0 + stream.gaussian());
        for (int k = 0; k < 11; ++k) t.offdiag.push_back(stream.gaussian());
        const auto fast = smallest_eigenvalues(t, 12, 1e-300, 1e-15);
        oracle::Dense dense(12);
        for (std::size_t k = 0; k < 12; ++k) {
            dense(k, k) = t.diag[k];
            if (k + 1 < 12) dense(k, k + 1) = dense(k + 1, k) = t.offdiag[k];
        }
        const auto ref = oracle::jacobi_eigenvalues(dense);
        for (std::size_t k = 0; k < 12; ++k)
            worst = std::max(worst, std::abs(fast[k] - ref[k]) / std::abs(ref[k]));
    }
    r.pass = worst <= kSolverRelTol;
    r.measured = {{"threshold", kSolverRelTol}, {"max_rel_error", worst}};
    return r;
}

json proportion_json(const Proportion& p) { return {{"p", p.p}, {"se", p.se}}; }

CheckResult hygiene(std::uint64_t seed) {
    CheckResult r{9, "step-halving, entrance-height and domain-doubling insensitivity", true,
                  json::object()};
    json rows = json::array();
    auto survive = [&](const HardEdgeParams& p, CountRoute route, int part) {
        const auto counts = sample_counts(p, kSamples, family_for(seed, 9, part), route);
        std::size_t zero = 0;
        for (auto c : counts) zero += c == 0 ? 1 : 0;
        return proportion(zero, counts.size());
    };
    auto record = [&](const std::string& name, const Proportion& x, const Proportion& y, double bound,
                      bool combined) {
        const double se = combined ? std::hypot(x.se, y.se) : x.se;
        const bool ok = std::abs(x.p - y.p) < bound * se;
        rows.push_back({{"check", name},
                        {"base", proportion_json(x)},
                        {"varied", proportion_json(y)},
                        {"bound_in_se", bound},
                        {"se_used", se},
                        {"pass", ok}});
        r.pass = r.pass && ok;
    };

    int part = 0;
    for (auto [beta, a, lambda] : {std::tuple{2.0, 0.0, 2.0}, std::tuple{1.0, 1.0, 4.0}}) {
        HardEdgeParams base;
        base.beta = beta;
        base.a = a;
        base.lambda = lambda;
        base.length = 20.0;
        const std::string tag = "beta=" + json(beta).dump() + " a=" + json(a).dump() +
                                " lambda=" + json(lambda).dump();
        for (auto route : {CountRoute::Psi, CountRoute::Riccati}) {
            const std::string rname = route == CountRoute::Psi ? " psi" : " p";
            const int fam = part++;
            // Step halving on one Brownian path: both runs consume the same
            // normals two per base step.
            HardEdgeParams coarse = base, fine = base;
            coarse.max_level = fine.max_level = 1;
            fine.level = 1;
            record("step-halving" + rname + " " + tag, survive(coarse, route, fam), survive(fine, route, fam),
                   2.0, true);
            HardEdgeParams longer = base;
            longer.length = 2.0 * base.length;
            record("domain-doubling" + rname + " " + tag, survive(base, route, fam),
                   survive(longer, route, fam), 1.0, false);
            if (route == CountRoute::Riccati) {
                HardEdgeParams higher = base;
                higher.p_start = 10.0 * base.p_start;
                record("entrance-height p " + tag, survive(base, route, fam), survive(higher, route, fam), 1.0,
                       false);
            }
        }
    }

    // Entrance height of the soft-edge process.
    SoftEdgeParams soft;
    soft.mu = -2.0;
    SoftEdgeParams higher = soft;
    higher.q_start = 10.0 * soft.q_start;
    const auto fam = family_for(seed, 9, part++);
    auto soft_survival = [&](const SoftEdgeParams& p) {
        const auto flags = parallel_map(kSamples, [&](std::size_t i) {
            return static_cast<char>(survival_q(p, fam.stream(i)).survived ? 1 : 0);
        });
        std::size_t hits = 0;
        for (char f : flags) hits += static_cast<std::size_t>(f);
        return proportion(hits, kSamples);
    };
    record("entrance-height q mu=-2", soft_survival(soft), soft_survival(higher), 1.0, false);
    r.measured = {{"rows", rows}};
    return r;
}

using Runner = std::function<CheckResult(std::uint64_t)>;

const std::map<int, Runner>& runners() {
    static const std::map<int, Runner> table{
        {1, exact_exponential_law},
        {2, limit_operator_law},
        {3, [](std::uint64_t) { return bessel_oracle(); }},
        {4, norm_identity},
        {5, route_equivalence},
        {6, theorem1_trend},
        {7, theorem3_trend},
        {8, solver_oracle},
        {9, hygiene},
    };
    return table;
}

std::vector<CheckResult> run_selected(const std::set<int>& selected, std::uint64_t seed) {
    std::vector<CheckResult> out;
    for (const auto& [id, run] : runners())
        if (selected.count(id)) out.push_back(run(seed));
    return out;
}

json results_json(const std::vector<CheckResult>& results) {
    json checks = json::array();
    for (const auto& r : results)
        checks.push_back({{"criterion", r.criterion}, {"title", r.title}, {"pass", r.pass}, {"measured", r.measured}});
    return checks;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationConfig& config) {
    std::set<int> selected = config.only;
    if (selected.empty())
        for (int i = 1; i <= 10; ++i) selected.insert(i);
    for (int id : selected)
        if (id < 1 || id > 10) throw DomainError("unknown acceptance criterion " + std::to_string(id));

    std::set<int> base = selected;
    base.erase(10);
    auto results = run_selected(base, config.seed);

    if (selected.count(10)) {
        std::set<int> rerun = base;
        if (rerun.empty())
            for (int i = 1; i <= 9; ++i) rerun.insert(i);
        const auto first = rerun == base ? results : run_selected(rerun, config.seed);
        // Rerun with a different schedule; the reports must agree byte for byte.
        const unsigned workers = worker_count();
        set_worker_override(workers == 1 ? 3 : 1);
        std::vector<CheckResult> second;
        try {
            second = run_selected(rerun, config.seed);
        } catch (...) {
            set_worker_override(0);
            throw;
        }
        set_worker_override(0);
        const std::string a = results_json(first).dump();
        const std::string b = results_json(second).dump();
        CheckResult r{10, "same seed reproduces a byte-identical report", a == b, json::object()};
        r.measured = {{"criteria_rerun", json(std::vector<int>(rerun.begin(), rerun.end()))},
                      {"report_bytes", a.size()},
                      {"identical", a == b}};
        results.push_back(r);
    }
    return results;
}

nlohmann::ordered_json validation_report(const std::vector<CheckResult>& results, const ValidationConfig& config) {
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    json report;
    report["schema_version"] = 1;
    report["seed"] = config.seed;
    report["checks"] = results_json(results);
    report["all_pass"] = all;
    return report;
}

std::string summary_line(const CheckResult& r) {
    std::ostringstream line;
    line << "criterion " << r.criterion << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.title;
    return line.str();
}

}  // namespace hardedge
