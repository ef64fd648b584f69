#include "hardedge/riccati.hpp"

#include <algorithm>
#include <cmath>

#include "hardedge/errors.hpp"
#include "hardedge/parallel.hpp"

namespace hardedge {

BrownianDriver::BrownianDriver(RandomStream stream, double dx, unsigned level, unsigned max_level)
    : stream_(stream.with_lane(0)) {
    detail::require(dx > 0.0, "step must be positive");
    detail::require(level <= max_level && max_level <= 20, "need level <= max_level <= 20");
    const double fine = std::ldexp(dx, -static_cast<int>(max_level));
    fine_sd_ = std::sqrt(fine);
    step_ = std::ldexp(dx, -static_cast<int>(level));
    group_ = 1u << (max_level - level);
}

double BrownianDriver::next() {
    double sum = 0.0;
    for (unsigned i = 0; i < group_; ++i) sum += stream_.gaussian();
    return fine_sd_ * sum;
}

void check_params(const HardEdgeParams& p) {
    detail::require(p.beta > 0.0, "beta must be positive");
    detail::require(p.a > -1.0 && std::isfinite(p.a), "a must exceed -1");
    detail::require(p.lambda >= 0.0 && std::isfinite(p.lambda), "lambda must be non-negative");
    detail::require(p.length > 0.0 && p.dx > 0.0 && p.dx <= p.length, "need 0 < dx <= L");
    detail::require(p.level <= p.max_level, "refinement level exceeds max_level");
    detail::require(p.p_start > 0.0 && p.p_explode > 0.0 && p.kappa > 0.0 && p.kappa < 1.0,
                    "entrance, explosion and substep parameters must be positive");
}

double default_length(double lambda_max) {
    return std::max(12.0, std::log(std::max(lambda_max, 1.0)) + 5.0);
}

namespace {

std::size_t step_count(double length, double step) {
    const auto n = static_cast<std::size_t>(std::llround(length / step));
    detail::require(n >= 1, "horizon shorter than one step");
    return n;
}

// Splits a Brownian increment `db` over `span` at an interior time `t`:
// returns the increment over [0, t] drawn from the bridge.
double bridge_split(double db, double span, double t, RandomStream& bridge) {
    const double w = t / span;
    return w * db + std::sqrt(t * (span - t) / span) * bridge.gaussian();
}

// One-dimensional Riccati-type diffusion dy = (c0 + c1 y) sigma db + f(x, y) dx
// integrated on a base grid with adaptive substeps. Multiplicative noise is
// applied exactly through the pivot z = y + c0 / c1.
struct RiccatiEngine {
    double sigma = 0.0;
    double c0 = 0.0;
    double c1 = 1.0;
    double start = 1e4;
    double explode = 1e4;
    double kappa = 0.02;

    template <class Drift, class Scale>
    DiffusionRun run(BrownianDriver& driver, RandomStream& bridge, std::size_t steps, Drift drift,
                     Scale drift_scale) const {
        DiffusionRun out;
        const double h = driver.step();
        double y = start;
        for (std::size_t k = 0; k < steps; ++k) {
            double x = static_cast<double>(k) * h;
            double remaining = h;
            double db = driver.next();
            while (remaining > 0.0) {
                // Keep the relative change of y per substep near kappa.
                const double size = std::max({std::abs(y), drift_scale(x), 1.0});
                double dt = std::min(remaining, kappa / size);
                double dbt;
                if (dt < remaining) {
                    dbt = bridge_split(db, remaining, dt, bridge);
                    db -= dbt;
                } else {
                    dt = remaining;
                    dbt = db;
                }
                const double f = drift(x, y);
                double noisy;
                if (c1 != 0.0) {
                    const double pivot = c0 / c1;
                    const double vol = sigma * c1;
                    noisy = (y + pivot) * std::exp(vol * dbt - 0.5 * vol * vol * dt) - pivot;
                } else {
                    noisy = y + sigma * c0 * dbt;
                }
                y = noisy + f * dt;
                x += dt;
                remaining -= dt;
                if (remaining < 1e-15 * h) remaining = 0.0;
                if (y < -explode) {
                    out.crossings.push_back(x);
                    y = start;
                }
            }
        }
        out.count = out.crossings.size();
        out.survived = out.crossings.empty();
        out.final_state = y;
        return out;
    }
};

}  // namespace

DiffusionRun count_zeros_psi(const HardEdgeParams& params, RandomStream stream) {
    check_params(params);
    BrownianDriver driver(stream, params.dx, params.level, params.max_level);
    const double h = driver.step();
    const std::size_t steps = step_count(params.length, h);
    const double sigma = noise_coefficient(params.beta);
    const double lam = params.lambda;

    DiffusionRun out;
    double psi = 0.0, dpsi = 1.0;
    double e_left = 1.0;  // e^{-x_k}
    const double e_step = std::exp(-h);
    for (std::size_t k = 0; k < steps; ++k) {
        const double x = static_cast<double>(k) * h;
        const double e_right = e_left * e_step;
        const double g = std::exp(sigma * driver.next() + params.a * h);
        const double dpsi_new = g * (dpsi - 0.5 * lam * psi * h * e_left) - 0.5 * lam * psi * h * e_right;
        const double psi_new = psi + 0.5 * h * (dpsi_new + dpsi_new / g);
        if (psi != 0.0 && (psi_new == 0.0 || (psi_new < 0.0) != (psi < 0.0))) {
            if (dpsi != 0.0 && (dpsi_new < 0.0) != (dpsi < 0.0)) {
                // A zero and an extremum of psi inside one step: the phase moved
                // by a quarter turn or more, so further zeros may be hidden.
                throw NumericalError("psi step too large: zero and extremum within one step");
            }
            out.crossings.push_back(x + h * psi / (psi - psi_new));
        }
        psi = psi_new;
        dpsi = dpsi_new;
        const double mag = std::max(std::abs(psi), std::abs(dpsi));
        if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
            psi /= mag;
            dpsi /= mag;
        }
        e_left = e_right;
    }
    out.count = out.crossings.size();
    out.final_state = psi != 0.0 ? dpsi / psi : INFINITY;
    if (params.boundary == FarBoundary::Reflecting && psi * dpsi < 0.0) {
        ++out.count;
        out.terminal_correction = true;
    }
    out.survived = out.count == 0;
    return out;
}

DiffusionRun count_explosions_p(const HardEdgeParams& params, RandomStream stream) {
    check_params(params);
    BrownianDriver driver(stream, params.dx, params.level, params.max_level);
    RandomStream bridge = stream.with_lane(1);
    const std::size_t steps = step_count(params.length, driver.step());
    RiccatiEngine engine;
    engine.sigma = noise_coefficient(params.beta);
    engine.c0 = 0.0;
    engine.c1 = 1.0;
    engine.start = params.p_start;
    engine.explode = params.p_explode;
    engine.kappa = params.kappa;
    // The noise factor exp(sigma db - sigma^2 dt / 2) is a martingale, so the
    // whole Ito drift (a + 2/beta) p - p^2 - lambda e^{-x} is added explicitly.
    const double growth = params.a + 0.5 * engine.sigma * engine.sigma;
    const double lam = params.lambda;
    auto drift = [&](double x, double p) { return growth * p - p * p - lam * std::exp(-x); };
    auto scale = [&](double x) { return std::sqrt(lam * std::exp(-x)) + std::abs(growth); };
    DiffusionRun out = engine.run(driver, bridge, steps, drift, scale);
    if (params.boundary == FarBoundary::Reflecting && out.final_state < 0.0) {
        ++out.count;
        out.terminal_correction = true;
    }
    out.survived = out.count == 0;
    return out;
}

std::vector<std::size_t> sample_counts(const HardEdgeParams& params, std::size_t num_paths,
                                       const StreamFamily& family, CountRoute route) {
    check_params(params);
    detail::require(num_paths >= 1, "need at least one path");
    return parallel_map(num_paths, [&](std::size_t i) {
        const auto stream = family.stream(i);
        return route == CountRoute::Psi ? count_zeros_psi(params, stream).count
                                        : count_explosions_p(params, stream).count;
    });
}

Proportion cdf_lambda_k(const HardEdgeParams& params, std::size_t k, std::size_t num_paths,
                        const StreamFamily& family, CountRoute route) {
    const auto counts = sample_counts(params, num_paths, family, route);
    std::size_t hits = 0;
    for (auto c : counts) hits += c >= k + 1 ? 1 : 0;
    return proportion(hits, num_paths);
}

void check_params(const SoftEdgeParams& p) {
    detail::require(p.beta > 0.0, "beta must be positive");
    detail::require(std::isfinite(p.mu), "mu must be finite");
    detail::require(p.x_max > 0.0 && p.dx > 0.0 && p.dx <= p.x_max, "need 0 < dx <= x_max");
    detail::require(p.level <= p.max_level, "refinement level exceeds max_level");
    detail::require(p.q_start > 0.0 && p.q_explode > 0.0 && p.kappa > 0.0 && p.kappa < 1.0,
                    "entrance, explosion and substep parameters must be positive");
}

DiffusionRun survival_q(const SoftEdgeParams& params, RandomStream stream) {
    check_params(params);
    BrownianDriver driver(stream, params.dx, params.level, params.max_level);
    RandomStream bridge = stream.with_lane(1);
    const std::size_t steps = step_count(params.x_max, driver.step());
    RiccatiEngine engine;
    engine.sigma = noise_coefficient(params.beta);
    engine.c0 = 1.0;
    engine.c1 = 0.0;
    engine.start = params.q_start;
    engine.explode = params.q_explode;
    engine.kappa = params.kappa;
    const double mu = params.mu;
    auto drift = [&](double x, double q) { return x + mu - q * q; };
    auto scale = [&](double x) { return std::sqrt(std::abs(x + mu)); };
    return engine.run(driver, bridge, steps, drift, scale);
}

double TransitionParams::a() const { return 2.0 * std::sqrt(eta) - 2.0 / beta; }
double TransitionParams::lambda() const { return eta - std::pow(eta, 2.0 / 3.0) * mu; }

void check_params(const TransitionParams& p) {
    detail::require(p.eta > 0.0 && std::isfinite(p.eta), "eta must be positive");
    detail::require(p.beta > 0.0 && std::isfinite(p.beta), "beta must be positive and finite");
    detail::require(std::isfinite(p.mu), "mu must be finite");
    detail::require(p.a() > -1.0, "eta too small: a = 2 sqrt(eta) - 2/beta must exceed -1");
}

DiffusionRun hard_edge_survival(const TransitionParams& tp, const SoftEdgeParams& soft,
                                RandomStream stream, TransitionRoute route) {
    check_params(tp);
    check_params(soft);
    const double eta = tp.eta;
    const double cube = std::cbrt(eta);        // eta^{1/3}
    const double eps = 1.0 / std::sqrt(cube);  // eta^{-1/6}
    const double sigma = noise_coefficient(tp.beta);
    const double mu = tp.mu;
    RandomStream bridge = stream.with_lane(1);

    if (route == TransitionRoute::Scaled) {
        BrownianDriver driver(stream, soft.dx, soft.level, soft.max_level);
        const std::size_t steps = step_count(soft.x_max, driver.step());
        // dq = sigma (1 + eps q) db + [eta^{1/3}(1 - e^{-u}) + mu e^{-u} - q^2] dx, u = x / eta^{1/3}.
        RiccatiEngine engine;
        engine.sigma = sigma;
        engine.c0 = 1.0;
        engine.c1 = eps;
        engine.start = soft.q_start;
        engine.explode = soft.q_explode;
        engine.kappa = soft.kappa;
        auto drift = [&](double x, double q) {
            const double u = x / cube;
            return -cube * std::expm1(-u) + mu * std::exp(-u) - q * q;
        };
        auto scale = [&](double x) {
            const double u = x / cube;
            return std::sqrt(std::abs(-cube * std::expm1(-u) + mu * std::exp(-u)));
        };
        return engine.run(driver, bridge, steps, drift, scale);
    }

    // Raw hard-edge clock t = x / eta^{1/3}; db_t = eta^{-1/6} db_x keeps the
    // same driving path as q.
    BrownianDriver driver(stream, soft.dx, soft.level, soft.max_level);
    const std::size_t steps = step_count(soft.x_max, driver.step());
    const double growth = tp.a() + 2.0 / tp.beta;  // = 2 sqrt(eta)
    const double lam = tp.lambda();
    RiccatiEngine engine;
    engine.sigma = sigma * eps;  // db_t = eps db_x
    engine.c0 = 0.0;
    engine.c1 = 1.0;
    // Entrance and explosion heights map through p = sqrt(eta) (1 + eps q).
    engine.start = std::sqrt(eta) * (1.0 + eps * soft.q_start);
    engine.explode = std::sqrt(eta) * (eps * soft.q_explode - 1.0);
    engine.kappa = soft.kappa;
    // Work in the x clock: dp = sigma p db_t + F(t, p) dt with dt = dx / eta^{1/3}.
    auto drift = [&](double x, double p) {
        const double t = x / cube;
        return (growth * p - p * p - lam * std::exp(-t)) / cube;
    };
    auto scale = [&](double x) {
        const double t = x / cube;
        return std::sqrt(lam * std::exp(-t) / cube) + growth / cube;
    };
    return engine.run(driver, bridge, steps, drift, scale);
}

TransitionResult hard_to_soft(const TransitionParams& tp, const SoftEdgeParams& soft,
                              std::size_t num_paths, const StreamFamily& family,
                              TransitionRoute route) {
    check_params(tp);
    SoftEdgeParams sp = soft;
    sp.beta = tp.beta;
    sp.mu = tp.mu;
    check_params(sp);
    detail::require(num_paths >= 1, "need at least one path");
    struct Pair {
        char hard = 0;
        char soft = 0;
    };
    const auto pairs = parallel_map(num_paths, [&](std::size_t i) {
        const auto stream = family.stream(i);
        Pair p;
        p.hard = hard_edge_survival(tp, sp, stream, route).survived ? 1 : 0;
        p.soft = survival_q(sp, stream).survived ? 1 : 0;
        return p;
    });
    std::size_t hard = 0, soft_hits = 0;
    for (const auto& p : pairs) {
        hard += p.hard;
        soft_hits += p.soft;
    }
    TransitionResult r;
    r.hard = proportion(hard, num_paths);
    r.soft = proportion(soft_hits, num_paths);
    r.difference = std::abs(r.hard.p - r.soft.p);
    return r;
}

}  // namespace hardedge
