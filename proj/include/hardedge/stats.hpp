#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hardedge {

/// Sorted sample set. Immutable after construction.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples);

    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

    /// Fraction of samples <= x (right-continuous step function).
    double cdf(double x) const;

    /// Lower order statistic: sorted[floor(q (n - 1))].
    double quantile(double q) const;

    double mean() const;
    /// Unbiased sample variance (0 for a single sample).
    double variance() const;

private:
    std::vector<double> sorted_;
};

using Cdf = std::function<double(double)>;

/// sup_x |F_n(x) - F(x)|, checking both one-sided limits at each sample point.
/// F is evaluated just below and at each sample, so atoms in F are handled.
double ks_distance(const EmpiricalDistribution& d, const Cdf& reference);

/// Two-sample KS statistic sup_x |F_n(x) - G_m(x)|.
double ks_distance(const EmpiricalDistribution& d, const EmpiricalDistribution& e);

/// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(log(2 / alpha) / (2 n)).
double dkw_band(std::size_t n, double alpha);

/// Bernoulli proportion with its binomial standard error sqrt(p (1 - p) / n).
struct Proportion {
    double p = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};
Proportion proportion(std::size_t hits, std::size_t n);

double mean_of(std::span<const double> xs);
/// Standard error of the mean.
double standard_error(std::span<const double> xs);

}  // namespace hardedge
