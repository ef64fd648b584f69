#pragma once

#include <cstddef>
#include <vector>

#include "hardedge/brownian.hpp"
#include "hardedge/rng.hpp"
#include "hardedge/stats.hpp"
#include "hardedge/tridiagonal.hpp"

namespace hardedge {

/// Upper bidiagonal (beta, a)-Laguerre model L, stored top to bottom:
/// diag[k-1] = chi_{(a+n-k+1) beta} / sqrt(beta), superdiag[k-1] = chi_{(n-k) beta} / sqrt(beta).
struct BidiagonalModel {
    std::size_t n = 0;
    double beta = 0.0;
    double a = 0.0;
    std::vector<double> diag;
    std::vector<double> superdiag;
};

/// Lower bidiagonal matrix; subdiag[k-1] holds entry (k+1, k).
struct LowerBidiagonal {
    std::vector<double> diag;
    std::vector<double> subdiag;

    std::size_t size() const { return diag.size(); }
};

void check_params(std::size_t n, double beta, double a);
void check_model(const BidiagonalModel& model);

BidiagonalModel sample_model(std::size_t n, double beta, double a, RandomStream& stream);

/// T = L L^T.
SymmetricTridiagonal gram_tridiagonal(const BidiagonalModel& model);

/// M = S L S^{-1} with S the anti-diagonal matrix (sign convention making
/// the subdiagonal negative): M_kk = L_{n+1-k, n+1-k}, M_{k+1,k} = -L_{n-k, n+1-k}.
LowerBidiagonal conjugate_antidiagonal(const BidiagonalModel& model);

/// Inverse of conjugate_antidiagonal (needed by the coupled sampler).
BidiagonalModel model_from_conjugate(const LowerBidiagonal& m, double beta, double a);

/// The kernel of (sqrt(n) M)^{-1} on cells of width 1/n:
/// k(i, j) = sign * (sqrt(n) / |M_ii|) * exp(C_i - C_j) for j <= i, 0 above,
/// with C_i = sum_{k < i} log(|M_{k+1,k}| / |M_kk|). Indices are 0-based.
class DiscreteKernel {
public:
    explicit DiscreteKernel(const LowerBidiagonal& m);

    std::size_t size() const { return prefactor_.size(); }
    double entry(std::size_t i, std::size_t j) const;
    double prefactor(std::size_t i) const { return prefactor_[i]; }
    double log_sum(std::size_t i) const { return log_sums_[i]; }

    /// Dense row-major n x n matrix of cell values.
    std::vector<double> dense() const;

private:
    std::vector<double> prefactor_;
    std::vector<double> log_sums_;
    // Sign of the entry is sign_pref[i] * (-1)^(flips[i] - flips[j]) where
    // flips counts positive ratios -M_{k+1,k}/M_kk < 0 along the path.
    std::vector<int> sign_pref_;
    std::vector<long> flips_;
    std::vector<long> zeros_;
};

DiscreteKernel inverse_kernel(const LowerBidiagonal& m);

/// ||K^T K|| as an operator on L^2[0, 1] with cell quadrature weight 1/n,
/// by power iteration on the dense cell matrix until the relative residual
/// of the Rayleigh quotient drops below tol. Throws NumericalError when
/// max_iterations is exhausted.
double operator_norm_sq(const DiscreteKernel& kernel, double tol, std::size_t max_iterations = 200000);

/// Limit kernel x^{-(1+a)/2} exp(int_y^x db_z / sqrt(beta z)) y^{a/2} for y < x,
/// with the stochastic integral read off a standard Brownian path bhat on the
/// log scale: int_y^x z^{-1/2} db_z = bhat(log 1/y) - bhat(log 1/x).
/// Returns 0 when y >= x.
double limit_kernel_value(double x, double y, double a, double beta, const EnvironmentPath& bhat);

/// Independent draws of (n lambda_0, ..., n lambda_{k-1}) of L L^T, one row
/// per draw; draw i uses family.stream(i).
std::vector<std::vector<double>> scaled_minima_draws(std::size_t n, double beta, double a, std::size_t k,
                                                     std::size_t num_samples, const StreamFamily& family);

/// Column j of row-per-draw samples as a distribution, for j < k.
std::vector<EmpiricalDistribution> columns_of(const std::vector<std::vector<double>>& draws, std::size_t k);

/// The same draws as scaled_minima_draws, regrouped: result[j] holds index j.
std::vector<EmpiricalDistribution> sample_scaled_minima(std::size_t n, double beta, double a,
                                                        std::size_t k, std::size_t num_samples,
                                                        const StreamFamily& family);

/// The k smallest eigenvalues of L L^T scaled by n.
std::vector<double> scaled_minima(const BidiagonalModel& model, std::size_t k);

/// Samples the model with its small-index chi entries driven by the
/// increments of a standard Brownian path bhat (the environment of the limit
/// operator) over the cells [log(n/(k+1)), log(n/k)], k = 1..n-1.
///
/// Each pair (chi~_{k beta}, chi_{(k+a) beta}) of M is generated by exact
/// quantile transforms of U1 = (D + C)/sqrt 2 and U2 = (C - D)/sqrt 2, where D
/// is the bhat increment over the cell and C an independent Gaussian with the
/// same variance. U1, U2 are independent N(0, |cell|), so the law of the model
/// is exactly that of sample_model; only the joint law with bhat is changed.
/// bhat must already contain the cell endpoints log(n/k) on its grid (see
/// coupling_points) and span [0, log n].
BidiagonalModel sample_model_coupled(std::size_t n, double beta, double a, const EnvironmentPath& bhat,
                                     RandomStream& stream);

/// The points log(n/k), k = 1..n, that sample_model_coupled needs on the path grid.
std::vector<double> coupling_points(std::size_t n);

}  // namespace hardedge
