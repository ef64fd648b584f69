#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "hardedge/errors.hpp"

using namespace hardedge::cli;

namespace {

struct Options {
    std::string out;
    std::string beta = "2";
    double a = 0.0;
    long long n = 100;
    long long k = 1;
    long long cdf_k = 0;
    long long samples = 10000;
    long long paths = 10000;
    std::uint64_t seed = 1;
    std::uint64_t validate_seed = validate_defaults().at("seed").get<std::uint64_t>();
    double length = 20.0;
    double step = 0.0;
    std::vector<double> grid{0.5, 1.0, 2.0};
    std::vector<double> mu{-2.0, 0.0, 2.0};
    std::vector<double> eta{100.0, 1000.0, 10000.0};
    double horizon = 8.0;
    std::string route = "riccati";
    std::vector<int> only;
    std::string manifest;
};

std::string joined(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void add_out(CLI::App* cmd, Options& o) {
    cmd->add_option("--out", o.out, "Output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hard-edge beta ensembles: matrix model, stochastic operator and Riccati diffusion studies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HARDEDGE_VERSION);
    Options o;

    auto* ens = app.add_subcommand("ensemble", "Scaled smallest eigenvalues n*lambda_k of the bidiagonal model");
    add_out(ens, o);
    ens->add_option("--n", o.n, "Matrix size")->capture_default_str();
    ens->add_option("--beta", o.beta, "Dyson index")->capture_default_str();
    ens->add_option("--a", o.a, "Hard-edge parameter a > -1")->capture_default_str();
    ens->add_option("--k", o.k, "Number of eigenvalues per draw")->capture_default_str();
    ens->add_option("--samples", o.samples, "Number of draws")->capture_default_str();
    ens->add_option("--seed", o.seed, "Master seed")->capture_default_str();

    auto* sbo = app.add_subcommand("sbo", "Smallest eigenvalues of the discretized stochastic Bessel operator");
    add_out(sbo, o);
    sbo->add_option("--beta", o.beta, "Dyson index, or inf for the noiseless operator")->capture_default_str();
    sbo->add_option("--a", o.a, "Hard-edge parameter a > -1")->capture_default_str();
    sbo->add_option("--domain-length", o.length, "Truncation point L")->capture_default_str();
    sbo->add_option("--step", o.step, "Grid spacing h (default 2^-9)");
    sbo->add_option("--k", o.k, "Number of eigenvalues per draw")->capture_default_str();
    sbo->add_option("--samples", o.samples, "Number of environment paths")->capture_default_str();
    sbo->add_option("--seed", o.seed, "Master seed")->capture_default_str();

    auto* ric = app.add_subcommand("riccati-cdf", "P(Lambda_k < lambda) from Riccati explosion counts");
    add_out(ric, o);
    ric->add_option("--beta", o.beta, "Dyson index")->capture_default_str();
    ric->add_option("--a", o.a, "Hard-edge parameter a > -1")->capture_default_str();
    ric->add_option("--grid", o.grid, "Comma-separated lambda values")->delimiter(',')->capture_default_str();
    ric->add_option("--k", o.cdf_k, "Eigenvalue index")->capture_default_str();
    ric->add_option("--paths", o.paths, "Number of paths")->capture_default_str();
    ric->add_option("--domain-length", o.length, "Truncation point L")->capture_default_str();
    ric->add_option("--step", o.step, "Base step dx (default 1e-3)");
    ric->add_option("--route", o.route, "riccati or psi")->capture_default_str();
    ric->add_option("--seed", o.seed, "Master seed")->capture_default_str();

    auto* tr = app.add_subcommand("transition", "Hard-to-soft edge survival probabilities");
    add_out(tr, o);
    tr->add_option("--beta", o.beta, "Dyson index")->capture_default_str();
    tr->add_option("--mu", o.mu, "Comma-separated mu values")->delimiter(',')->capture_default_str();
    tr->add_option("--eta", o.eta, "Comma-separated eta values")->delimiter(',')->capture_default_str();
    tr->add_option("--paths", o.paths, "Number of paths")->capture_default_str();
    tr->add_option("--horizon", o.horizon, "Soft-edge survival horizon")->capture_default_str();
    tr->add_option("--step", o.step, "Base step dx (default 1e-3)");
    tr->add_option("--seed", o.seed, "Master seed")->capture_default_str();

    auto* val = app.add_subcommand("validate", "Run the acceptance suite and write a JSON report");
    add_out(val, o);
    val->add_option("--seed", o.validate_seed, "Master seed")->capture_default_str();
    val->add_option("--only", o.only, "Comma-separated criteria (1..10)")->delimiter(',');

    auto* rep = app.add_subcommand("replay", "Rerun the experiment recorded in a manifest");
    add_out(rep, o);
    rep->add_option("--manifest", o.manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParameterError;
    }
    const RunContext ctx{o.out, joined(argc, argv)};
    try {
        if (ens->parsed())
            return run_ensemble({{"n", o.n}, {"beta", o.beta}, {"a", o.a}, {"k", o.k}, {"samples", o.samples},
                                 {"seed", o.seed}},
                                ctx);
        if (sbo->parsed())
            return run_sbo({{"beta", o.beta}, {"a", o.a}, {"domain_length", o.length},
                            {"step", o.step > 0.0 ? o.step : 0.001953125}, {"k", o.k}, {"samples", o.samples},
                            {"seed", o.seed}},
                           ctx);
        if (ric->parsed())
            return run_riccati_cdf({{"beta", o.beta}, {"a", o.a}, {"grid", o.grid}, {"k", o.cdf_k},
                                    {"paths", o.paths}, {"domain_length", o.length},
                                    {"step", o.step > 0.0 ? o.step : 1e-3}, {"route", o.route}, {"seed", o.seed}},
                                   ctx);
        if (tr->parsed())
            return run_transition({{"beta", o.beta}, {"mu_grid", o.mu}, {"eta_list", o.eta}, {"paths", o.paths},
                                   {"horizon", o.horizon}, {"step", o.step > 0.0 ? o.step : 1e-3},
                                   {"seed", o.seed}},
                                  ctx);
        if (val->parsed()) return run_validate({{"seed", o.validate_seed}, {"only", o.only}}, ctx);
        if (rep->parsed()) return replay(o.manifest, ctx);
    } catch (const hardedge::DomainError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kParameterError;
    } catch (const hardedge::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kParameterError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailure;
    }
    return kParameterError;
}
