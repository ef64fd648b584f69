#include "hardedge/ensemble.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hardedge/errors.hpp"
#include "hardedge/parallel.hpp"

namespace hardedge {

void check_params(std::size_t n, double beta, double a) {
    detail::require(n >= 1, "matrix size n must be at least 1");
    detail::require(beta > 0.0 && std::isfinite(beta), "beta must be positive and finite");
    detail::require(a > -1.0 && std::isfinite(a), "a must exceed -1");
}

void check_model(const BidiagonalModel& model) {
    check_params(model.n, model.beta, model.a);
    detail::require(model.diag.size() == model.n && model.superdiag.size() + 1 == model.n,
                    "bidiagonal model has inconsistent lengths");
}

BidiagonalModel sample_model(std::size_t n, double beta, double a, RandomStream& stream) {
    check_params(n, beta, a);
    BidiagonalModel model{n, beta, a, std::vector<double>(n), std::vector<double>(n - 1)};
    const double scale = 1.0 / std::sqrt(beta);
    const double dn = static_cast<double>(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        model.diag[k - 1] = scale * sample_chi(ChiIndex((a + dn - dk + 1.0) * beta), stream);
        if (k < n) model.superdiag[k - 1] = scale * sample_chi(ChiIndex((dn - dk) * beta), stream);
    }
    return model;
}

SymmetricTridiagonal gram_tridiagonal(const BidiagonalModel& model) {
    check_model(model);
    const std::size_t n = model.n;
    SymmetricTridiagonal t{std::vector<double>(n), std::vector<double>(n - 1)};
    for (std::size_t k = 0; k < n; ++k) {
        const double x = model.diag[k];
        const double y = k + 1 < n ? model.superdiag[k] : 0.0;
        t.diag[k] = x * x + y * y;
        if (k + 1 < n) t.offdiag[k] = model.diag[k + 1] * y;
    }
    return t;
}

LowerBidiagonal conjugate_antidiagonal(const BidiagonalModel& model) {
    check_model(model);
    const std::size_t n = model.n;
    LowerBidiagonal m{std::vector<double>(n), std::vector<double>(n - 1)};
    for (std::size_t k = 0; k < n; ++k) m.diag[k] = model.diag[n - 1 - k];
    // 0-based: M(k+1, k) = -L(n-2-k, n-1-k) = -superdiag[n-2-k].
    for (std::size_t k = 0; k + 1 < n; ++k) m.subdiag[k] = -model.superdiag[n - 2 - k];
    return m;
}

BidiagonalModel model_from_conjugate(const LowerBidiagonal& m, double beta, double a) {
    const std::size_t n = m.size();
    detail::require(n >= 1 && m.subdiag.size() + 1 == n, "lower bidiagonal has inconsistent lengths");
    BidiagonalModel model{n, beta, a, std::vector<double>(n), std::vector<double>(n - 1)};
    for (std::size_t k = 0; k < n; ++k) model.diag[n - 1 - k] = m.diag[k];
    for (std::size_t k = 0; k + 1 < n; ++k) model.superdiag[n - 2 - k] = -m.subdiag[k];
    check_model(model);
    return model;
}

DiscreteKernel::DiscreteKernel(const LowerBidiagonal& m) {
    const std::size_t n = m.size();
    detail::require(n >= 1 && m.subdiag.size() + 1 == n, "lower bidiagonal has inconsistent lengths");
    for (double d : m.diag)
        if (d == 0.0 || !std::isfinite(d)) throw NumericalError("singular bidiagonal: zero diagonal entry");
    const double root_n = std::sqrt(static_cast<double>(n));
    prefactor_.resize(n);
    sign_pref_.resize(n);
    log_sums_.assign(n, 0.0);
    flips_.assign(n, 0);
    zeros_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        prefactor_[i] = root_n / std::abs(m.diag[i]);
        sign_pref_[i] = m.diag[i] > 0.0 ? 1 : -1;
        if (i + 1 < n) {
            const double ratio = -m.subdiag[i] / m.diag[i];
            // A zero subdiagonal decouples the blocks: entries across it vanish.
            log_sums_[i + 1] = log_sums_[i] + (ratio != 0.0 ? std::log(std::abs(ratio)) : 0.0);
            flips_[i + 1] = flips_[i] + (ratio < 0.0 ? 1 : 0);
            zeros_[i + 1] = zeros_[i] + (ratio == 0.0 ? 1 : 0);
        }
    }
}

double DiscreteKernel::entry(std::size_t i, std::size_t j) const {
    detail::require(i < size() && j < size(), "kernel index out of range");
    if (j > i) return 0.0;
    if (i == j) return sign_pref_[i] * prefactor_[i];
    if (zeros_[i] != zeros_[j]) return 0.0;
    const int sign = sign_pref_[i] * (((flips_[i] - flips_[j]) % 2 == 0) ? 1 : -1);
    return sign * prefactor_[i] * std::exp(log_sums_[i] - log_sums_[j]);
}

std::vector<double> DiscreteKernel::dense() const {
    const std::size_t n = size();
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) out[i * n + j] = entry(i, j);
    return out;
}

DiscreteKernel inverse_kernel(const LowerBidiagonal& m) { return DiscreteKernel(m); }

double operator_norm_sq(const DiscreteKernel& kernel, double tol, std::size_t max_iterations) {
    detail::require(tol > 0.0, "power iteration tolerance must be positive");
    const std::size_t n = kernel.size();
    // A = cell matrix / n; the 1/n quadrature weights of the L^2 norm cancel.
    std::vector<double> a = kernel.dense();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& v : a) v *= inv_n;

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> av(n), w(n);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += a[i * n + j] * v[j];
            av[i] = s;
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) w[j] += a[i * n + j] * av[i];
        // w = A^T A v; Rayleigh quotient and residual.
        double rho = 0.0;
        for (std::size_t i = 0; i < n; ++i) rho += v[i] * w[i];
        double res = 0.0, norm_w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res += (w[i] - rho * v[i]) * (w[i] - rho * v[i]);
            norm_w += w[i] * w[i];
        }
        norm_w = std::sqrt(norm_w);
        if (!(norm_w > 0.0) || !std::isfinite(norm_w))
            throw NumericalError("power iteration produced a degenerate iterate");
        if (std::sqrt(res) <= tol * rho) return rho;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm_w;
    }
    throw NumericalError("power iteration did not converge within the iteration cap");
}

double limit_kernel_value(double x, double y, double a, double beta, const EnvironmentPath& bhat) {
    detail::require(x > 0.0 && x <= 1.0 && y > 0.0, "limit kernel needs 0 < y, 0 < x <= 1");
    detail::require(beta > 0.0, "beta must be positive");
    if (y >= x) return 0.0;
    const double integral = bhat.value_at(std::log(1.0 / y)) - bhat.value_at(std::log(1.0 / x));
    const double noise = std::isinf(beta) ? 0.0 : integral / std::sqrt(beta);
    return std::exp(-0.5 * (1.0 + a) * std::log(x) + noise + 0.5 * a * std::log(y));
}

std::vector<double> scaled_minima(const BidiagonalModel& model, std::size_t k) {
    const auto t = gram_tridiagonal(model);
    auto eig = smallest_eigenvalues(t, k, 1e-300, 1e-13);
    for (double& v : eig) v *= static_cast<double>(model.n);
    return eig;
}

std::vector<std::vector<double>> scaled_minima_draws(std::size_t n, double beta, double a, std::size_t k,
                                                     std::size_t num_samples, const StreamFamily& family) {
    check_params(n, beta, a);
    detail::require(k >= 1 && k <= n, "need 1 <= k <= n");
    detail::require(num_samples >= 1, "need at least one sample");
    return parallel_map(num_samples, [&](std::size_t i) {
        auto stream = family.stream(i);
        return scaled_minima(sample_model(n, beta, a, stream), k);
    });
}

std::vector<EmpiricalDistribution> columns_of(const std::vector<std::vector<double>>& draws, std::size_t k) {
    std::vector<EmpiricalDistribution> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> column(draws.size());
        for (std::size_t i = 0; i < draws.size(); ++i) column[i] = draws[i].at(j);
        out.emplace_back(std::move(column));
    }
    return out;
}

std::vector<EmpiricalDistribution> sample_scaled_minima(std::size_t n, double beta, double a,
                                                        std::size_t k, std::size_t num_samples,
                                                        const StreamFamily& family) {
    return columns_of(scaled_minima_draws(n, beta, a, k, num_samples, family), k);
}

std::vector<double> coupling_points(std::size_t n) {
    std::vector<double> points(n);
    for (std::size_t k = 1; k <= n; ++k)
        points[k - 1] = std::log(static_cast<double>(n) / static_cast<double>(k));
    return points;
}

namespace {

// chi_r as an exact quantile transform of a standard normal z.
double chi_quantile(double r, double z) {
    const double shape = 0.5 * r;
    double g;
    if (z > 0.0) g = boost::math::gamma_q_inv(shape, 0.5 * std::erfc(z / std::numbers::sqrt2));
    else g = boost::math::gamma_p_inv(shape, 0.5 * std::erfc(-z / std::numbers::sqrt2));
    return std::sqrt(2.0 * g);
}

}  // namespace

BidiagonalModel sample_model_coupled(std::size_t n, double beta, double a, const EnvironmentPath& bhat,
                                     RandomStream& stream) {
    check_params(n, beta, a);
    const auto points = coupling_points(n);
    detail::require(bhat.end() >= points.front(), "coupling path must span [0, log n]");
    const double scale = 1.0 / std::sqrt(beta);
    LowerBidiagonal m{std::vector<double>(n), std::vector<double>(n - 1)};
    std::vector<double> at(n);
    for (std::size_t k = 1; k <= n; ++k) {
        at[k - 1] = bhat.value_at(points[k - 1]);
        // value_at interpolates; the coupling needs exact grid values.
        detail::require(std::binary_search(bhat.grid.begin(), bhat.grid.end(), points[k - 1]),
                        "coupling path is missing a cell endpoint log(n/k)");
    }
    for (std::size_t k = 1; k < n; ++k) {
        // Cell [log(n/(k+1)), log(n/k)].
        const double width = points[k - 1] - points[k];
        const double d = (at[k - 1] - at[k]) / std::sqrt(width);
        const double c = stream.gaussian();
        const double z1 = (d + c) / std::numbers::sqrt2;
        const double z2 = (c - d) / std::numbers::sqrt2;
        const double dk = static_cast<double>(k);
        m.subdiag[k - 1] = -scale * chi_quantile(dk * beta, z1);
        m.diag[k - 1] = scale * chi_quantile((dk + a) * beta, z2);
    }
    m.diag[n - 1] = scale * sample_chi(ChiIndex((static_cast<double>(n) + a) * beta), stream);
    return model_from_conjugate(m, beta, a);
}

}  // namespace hardedge
