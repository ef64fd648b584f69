#include "hardedge/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardedge/errors.hpp"

namespace hardedge {

void check_tridiagonal(const SymmetricTridiagonal& t) {
    detail::require(!t.diag.empty(), "tridiagonal matrix must be non-empty");
    detail::require(t.offdiag.size() + 1 == t.diag.size(), "offdiag must have n - 1 entries");
}

Interval gershgorin_bounds(const SymmetricTridiagonal& t) {
    check_tridiagonal(t);
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(t.offdiag[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    // Widen slightly so the endpoints are strict bounds after rounding.
    const double pad = 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(lo), std::abs(hi)) +
                       std::numeric_limits<double>::min();
    return {lo - pad, hi + pad};
}

namespace {

double pivot_floor(const SymmetricTridiagonal& t) {
    double emax = 1.0;
    for (double e : t.offdiag) emax = std::max(emax, e * e);
    return std::numeric_limits<double>::min() * emax;
}

std::size_t sturm_count_with(const SymmetricTridiagonal& t, double sigma, double pivmin) {
    const std::size_t n = t.size();
    std::size_t count = 0;
    double d = t.diag[0] - sigma;
    for (std::size_t i = 0;; ++i) {
        if (std::abs(d) <= pivmin) d = -pivmin;
#ifdef HARDEDGE_FAULT_INJECT_STURM
        if (d > 0.0) ++count;
#else
        if (d < 0.0) ++count;
#endif
        if (i + 1 == n) break;
        const double e = t.offdiag[i];
        d = (t.diag[i + 1] - sigma) - e * e / d;
    }
    return count;
}

}  // namespace

std::size_t sturm_count(const SymmetricTridiagonal& t, double sigma) {
    check_tridiagonal(t);
    return sturm_count_with(t, sigma, pivot_floor(t));
}

std::vector<double> smallest_eigenvalues(const SymmetricTridiagonal& t, std::size_t k, double tol,
                                         double rel_tol) {
    check_tridiagonal(t);
    detail::require(k >= 1 && k <= t.size(), "need 1 <= k <= n eigenvalues");
    detail::require(tol > 0.0 && rel_tol >= 0.0, "bisection tolerance must be positive");
    const double pivmin = pivot_floor(t);
    const Interval g = gershgorin_bounds(t);
    auto count = [&](double sigma) { return sturm_count_with(t, sigma, pivmin); };

    std::vector<double> out;
    out.reserve(k);
    double floor_lo = g.lo;
    for (std::size_t j = 0; j < k; ++j) {
        // Invariant: count(lo) <= j < count(hi), i.e. eigenvalue j is in [lo, hi).
        double lo = floor_lo;
        double hi = g.hi;
        // Positive spectra from the generator have Gershgorin upper bounds
        // many orders above the low eigenvalues; descend geometrically first.
        if (hi > 0.0) {
            double sigma = hi;
            for (int it = 0; it < 2000 && sigma > lo && sigma > 1e-300; ++it) {
                sigma *= 0.0625;
                if (sigma <= lo) break;
                if (count(sigma) > j) {
                    hi = sigma;
                } else {
                    lo = sigma;
                    break;
                }
            }
        }
        for (;;) {
            const double width = hi - lo;
            const double scale = std::max(std::abs(lo), std::abs(hi));
            if (width <= std::max(tol, rel_tol * scale)) break;
            double mid;
            if (lo > 0.0 && hi > 4.0 * lo) mid = std::sqrt(lo) * std::sqrt(hi);
            else mid = lo + 0.5 * width;
            if (mid <= lo || mid >= hi) break;
            if (count(mid) > j) hi = mid;
            else lo = mid;
        }
        out.push_back(lo + 0.5 * (hi - lo));
        floor_lo = lo;
    }
    return out;
}

}  // namespace hardedge
