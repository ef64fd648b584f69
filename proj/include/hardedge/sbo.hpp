#pragma once

#include <cstddef>
#include <vector>

#include "hardedge/brownian.hpp"
#include "hardedge/stats.hpp"
#include "hardedge/tridiagonal.hpp"

namespace hardedge {

/// Boundary condition imposed at the truncation point L.
///
/// Reflecting (zero flux, the natural condition of the scale measure) is the
/// default: the Green's function int_0^{x^y} s(dz) of the full-line operator
/// is the reflecting one, and it converges to the untruncated spectrum much
/// faster than a Dirichlet wall, which costs O(1/L) when a = 0.
enum class FarBoundary { Reflecting, Dirichlet };

/// Noise coefficient 2 / sqrt(beta); zero for beta = infinity.
double noise_coefficient(double beta);

/// Speed and scale measures of the generator on the cells [ih, (i+1)h] of [0, L].
struct SpeedScaleGrid {
    double a = 0.0;
    double beta = 0.0;
    double length = 0.0;
    double h = 0.0;
    std::vector<double> nodes;        // x_i = i h, i = 0..N
    std::vector<double> cell_mass;    // int_cell e^{-(a+1)x - sigma b(x)} dx, N entries
    std::vector<double> cell_scale;   // int_cell e^{a x + sigma b(x)} dx, N entries
    std::vector<double> scale_cumulative;  // S(x_i) = int_0^{x_i} s, N + 1 entries

    std::size_t cells() const { return cell_mass.size(); }
    /// Edge conductance 1 / cell_scale[i].
    double conductance(std::size_t i) const { return 1.0 / cell_scale[i]; }
};

/// Cell integrals by the trapezoid rule over every path point inside each
/// cell, so a bridge-refined path is integrated at its own resolution.
/// The path grid must contain every node i h and reach L.
SpeedScaleGrid build_speed_scale(double a, double beta, double length, double h,
                                 const EnvironmentPath& path);

/// Symmetrized finite-volume generator. Unknowns are f(x_1), ..., f(x_N)
/// (reflecting) or f(x_1), ..., f(x_{N-1}) (Dirichlet at L); f(0) = 0 always.
struct GeneratorDiscretization {
    SymmetricTridiagonal matrix;
    std::vector<double> node_mass;  // lumped speed measure of each unknown
    FarBoundary boundary = FarBoundary::Reflecting;
};

GeneratorDiscretization build_generator(const SpeedScaleGrid& ss,
                                        FarBoundary boundary = FarBoundary::Reflecting);

/// The k lowest eigenvalues of a discretized generator.
std::vector<double> generator_eigenvalues(const GeneratorDiscretization& g, std::size_t k);

/// Lowest k eigenvalues for the environment `path`.
std::vector<double> sbo_eigenvalues(double a, double beta, double length, double h, std::size_t k,
                                    const EnvironmentPath& path,
                                    FarBoundary boundary = FarBoundary::Reflecting);

/// Same, with a fresh Brownian environment on the uniform h-grid drawn from `stream`
/// (no variates are consumed when beta is infinite).
std::vector<double> sbo_eigenvalues(double a, double beta, double length, double h, std::size_t k,
                                    RandomStream& stream,
                                    FarBoundary boundary = FarBoundary::Reflecting);

/// Draws of (Lambda_0, ..., Lambda_{k-1}), one row per path; path i uses
/// family.stream(i).
std::vector<std::vector<double>> sbo_minima_draws(double a, double beta, double length, double h, std::size_t k,
                                                  std::size_t num_paths, const StreamFamily& family,
                                                  FarBoundary boundary = FarBoundary::Reflecting);

/// The same draws grouped by eigenvalue index.
std::vector<EmpiricalDistribution> sample_sbo_minima(double a, double beta, double length, double h,
                                                     std::size_t k, std::size_t num_paths,
                                                     const StreamFamily& family,
                                                     FarBoundary boundary = FarBoundary::Reflecting);

enum class GreensForm { Untruncated, Truncated };

/// Green's function of the inverse generator: int_0^{x^y} s(dz), or the
/// Dirichlet-at-L form [int_0^{x^y} s] [int_{x v y}^L s] / int_0^L s.
/// The scale function is interpolated linearly inside a cell.
double greens_value(double x, double y, const SpeedScaleGrid& ss,
                    GreensForm form = GreensForm::Untruncated);

/// Draws of Lambda_0 from the generator together with n lambda_0 of the
/// bidiagonal model for each n in `sizes`, on a shared environment.
///
/// Path i is sampled on the h-grid from family.stream(i). For each n the path
/// is bridge-refined at the points log(n/k), and the model is drawn by
/// sample_model_coupled with bhat = -b. Every column has exactly the law of
/// its uncoupled counterpart; the coupling only makes the columns nearly
/// equal pathwise, so distances between their laws are estimated with far
/// less Monte Carlo noise.
struct CoupledMinima {
    std::vector<double> limit;                // Lambda_0 per path
    std::vector<std::vector<double>> scaled;  // scaled[j][i] = n_j lambda_0 for path i
};

CoupledMinima sample_coupled_minima(double beta, double a, const std::vector<std::size_t>& sizes,
                                    double length, double h, std::size_t num_paths,
                                    const StreamFamily& family);

/// Trace of the inverse of the discretized generator, sum_i G(x_i, x_i) m_i,
/// which is exact for the discrete operator with the given boundary.
double trace_inverse(const SpeedScaleGrid& ss, FarBoundary boundary = FarBoundary::Reflecting);

}  // namespace hardedge
