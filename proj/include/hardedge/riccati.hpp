#pragma once

#include <cstddef>
#include <vector>

#include "hardedge/rng.hpp"
#include "hardedge/sbo.hpp"
#include "hardedge/stats.hpp"

namespace hardedge {

/// Brownian increments on the uniform grid of step dx / 2^level.
///
/// Every coarse step dx consumes 2^max_level normals from lane 0 of the
/// stream whatever the level, and a level-r increment is the scaled sum of
/// 2^(max_level - r) of them. Runs at different levels with the same stream
/// and max_level are therefore driven by the same Brownian path.
class BrownianDriver {
public:
    BrownianDriver(RandomStream stream, double dx, unsigned level = 0, unsigned max_level = 0);

    double step() const { return step_; }
    double next();

private:
    RandomStream stream_;
    double fine_sd_;
    double step_;
    unsigned group_;
};

struct HardEdgeParams {
    double beta = 2.0;
    double a = 0.0;
    double lambda = 0.0;
    double length = 20.0;    // truncation point L
    double dx = 1e-3;        // base step
    unsigned level = 0;      // step refinement dx / 2^level (see BrownianDriver)
    unsigned max_level = 0;
    double p_start = 1e4;    // entrance height standing in for +infinity
    double p_explode = 1e4;  // passage below -p_explode counts as an explosion
    double kappa = 0.02;     // substep bound: |p| * substep <= kappa
    FarBoundary boundary = FarBoundary::Reflecting;
};

void check_params(const HardEdgeParams& params);

/// Default truncation max(12, log(lambda_max) + 5).
double default_length(double lambda_max);

/// One integrated trajectory.
struct DiffusionRun {
    std::size_t count = 0;           // eigenvalues of the truncated generator below lambda
    std::vector<double> crossings;   // zeros of psi / explosion points of p, increasing
    bool survived = true;            // no crossing at all on the horizon
    double final_state = 0.0;        // p(L), q(horizon), or psi'/psi at L
    bool terminal_correction = false;  // reflecting end added one eigenvalue
};

/// Counts eigenvalues below lambda through the zeros of psi, where
/// dpsi' = sigma psi' db + ((a + 2/beta) psi' - lambda e^{-x} psi) dx, dpsi = psi' dx,
/// started at (psi, psi')(0) = (0, 1).
///
/// The step propagates the flux u = e^{-ax - sigma b} psi' exactly across
/// the noise, u_{k+1} = u_k - lambda int e^{-x} e^{-ax-sigma b} psi dx
/// (trapezoid), and integrates psi against the scale density, which is the
/// shooting counterpart of the finite-volume generator. With a reflecting
/// end the count includes one more eigenvalue when psi psi'(L) < 0.
DiffusionRun count_zeros_psi(const HardEdgeParams& params, RandomStream stream);

/// Counts explosions of the Riccati diffusion
/// dp = sigma p db + ((a + 2/beta) p - p^2 - lambda e^{-x}) dx
/// started at p_start, restarted at p_start after every passage below
/// -p_explode. With a reflecting end, p(L) < 0 adds one eigenvalue.
/// Substeps split each base increment by Brownian bridges drawn from lane 1,
/// so the base increments are exactly those seen by count_zeros_psi.
DiffusionRun count_explosions_p(const HardEdgeParams& params, RandomStream stream);

enum class CountRoute { Psi, Riccati };

/// P(Lambda_k < lambda): the fraction of paths with at least k + 1 counted
/// eigenvalues, with its binomial standard error. Path i uses family.stream(i).
Proportion cdf_lambda_k(const HardEdgeParams& params, std::size_t k, std::size_t num_paths,
                        const StreamFamily& family, CountRoute route = CountRoute::Psi);

/// Counts for every path (index i uses family.stream(i)).
std::vector<std::size_t> sample_counts(const HardEdgeParams& params, std::size_t num_paths,
                                       const StreamFamily& family, CountRoute route);

struct SoftEdgeParams {
    double beta = 2.0;
    double mu = 0.0;
    double x_max = 8.0;   // survival horizon
    double dx = 1e-3;
    unsigned level = 0;
    unsigned max_level = 0;
    double q_start = 1e4;
    double q_explode = 1e4;
    double kappa = 0.02;
};

void check_params(const SoftEdgeParams& params);

/// dq = sigma db + (x + mu - q^2) dx from q_start; survived means q never
/// passed below -q_explode on [0, x_max]. P(survive) estimates P(TW_beta < mu).
DiffusionRun survival_q(const SoftEdgeParams& params, RandomStream stream);

struct TransitionParams {
    double eta = 100.0;
    double mu = 0.0;
    double beta = 2.0;

    double a() const;       // 2 sqrt(eta) - 2 / beta
    double lambda() const;  // eta - eta^{2/3} mu
};

void check_params(const TransitionParams& params);

enum class TransitionRoute {
    /// q_eta(x) = eta^{1/6} (p(eta^{-1/3} x) / sqrt(eta) - 1), integrated in
    /// the soft-edge clock with the same driving noise as q.
    Scaled,
    /// The hard-edge Riccati diffusion itself with (a, lambda) from the scalings.
    Raw,
};

/// Hard-edge survival (no explosion of p on (0, inf), i.e. Lambda_0 > lambda)
/// for one path, from the process selected by `route`. `soft` supplies the
/// horizon, steps and entrance heights in the soft-edge clock.
DiffusionRun hard_edge_survival(const TransitionParams& tp, const SoftEdgeParams& soft,
                                RandomStream stream, TransitionRoute route = TransitionRoute::Scaled);

struct TransitionResult {
    Proportion hard;
    Proportion soft;
    double difference = 0.0;  // |P_hard - P_soft|
};

/// Survival probabilities of the scaled hard edge and of q at the same mu,
/// on common driving noise (path i uses family.stream(i) for both).
TransitionResult hard_to_soft(const TransitionParams& tp, const SoftEdgeParams& soft,
                              std::size_t num_paths, const StreamFamily& family,
                              TransitionRoute route = TransitionRoute::Scaled);

}  // namespace hardedge
