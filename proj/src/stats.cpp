#include "hardedge/stats.hpp"

#include <algorithm>
#include <cmath>

#include "hardedge/errors.hpp"

namespace hardedge {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : sorted_(std::move(samples)) {
    detail::require(!sorted_.empty(), "empirical distribution needs at least one sample");
    for (double x : sorted_) detail::require(!std::isnan(x), "NaN sample in empirical distribution");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double q) const {
    detail::require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(sorted_.size() - 1)));
    return sorted_[idx];
}

double EmpiricalDistribution::mean() const { return mean_of(sorted_); }

double EmpiricalDistribution::variance() const {
    if (sorted_.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double x : sorted_) ss += (x - m) * (x - m);
    return ss / static_cast<double>(sorted_.size() - 1);
}

double ks_distance(const EmpiricalDistribution& d, const Cdf& reference) {
    const auto& xs = d.sorted();
    const double n = static_cast<double>(xs.size());
    double sup = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;  // tie block [i, j)
        const double below = reference(std::nextafter(xs[i], -INFINITY));
        const double at = reference(xs[i]);
        sup = std::max(sup, std::abs(static_cast<double>(i) / n - below));
        sup = std::max(sup, std::abs(static_cast<double>(j) / n - at));
        i = j;
    }
    return sup;
}

double ks_distance(const EmpiricalDistribution& d, const EmpiricalDistribution& e) {
    const auto& xs = d.sorted();
    const auto& ys = e.sorted();
    const double n = static_cast<double>(xs.size());
    const double m = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double sup = 0.0;
    while (i < xs.size() || j < ys.size()) {
        double t;
        if (j == ys.size() || (i < xs.size() && xs[i] <= ys[j])) t = xs[i];
        else t = ys[j];
        while (i < xs.size() && xs[i] == t) ++i;
        while (j < ys.size() && ys[j] == t) ++j;
        sup = std::max(sup, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return sup;
}

double dkw_band(std::size_t n, double alpha) {
    detail::require(n >= 1, "DKW band needs n >= 1");
    detail::require(alpha > 0.0 && alpha < 1.0, "DKW alpha must lie in (0, 1)");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

Proportion proportion(std::size_t hits, std::size_t n) {
    detail::require(n >= 1 && hits <= n, "proportion needs 0 <= hits <= n, n >= 1");
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

double mean_of(std::span<const double> xs) {
    detail::require(!xs.empty(), "mean of an empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double standard_error(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double n = static_cast<double>(xs.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace hardedge
