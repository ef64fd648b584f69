#include "hardedge/bessel.hpp"

#include <cmath>
#include <numbers>

#include "hardedge/errors.hpp"

namespace hardedge {

namespace {

constexpr double kSeriesLimit = 20.0;

// J_nu(x) / (x/2)^nu; same sign as J_nu and free of the x^nu overflow.
long double series_reduced(double nu, double x) {
    const long double q = -0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L / std::tgamma(static_cast<long double>(nu) + 1.0L);
    long double sum = term;
    for (int m = 1; m < 500; ++m) {
        term *= q / (static_cast<long double>(m) * (m + static_cast<long double>(nu)));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) && m > 0.5 * x) break;
    }
    return sum;
}

double hankel(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    const double z8 = 8.0 * x;
    double p = 0.0, q = 0.0;
    double term = 1.0;
    double prev = INFINITY;
    for (int k = 0; k < 60; ++k) {
        // term_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! (8x)^k)
        if (k > 0) {
            const double odd = 2.0 * k - 1.0;
            term *= (mu - odd * odd) / (k * z8);
        }
        if (std::abs(term) > prev) break;  // asymptotic series started to diverge
        prev = std::abs(term);
        switch (k % 4) {
            case 0: p += term; break;
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
        }
        if (std::abs(term) < 1e-17) break;
    }
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Large argument: the Hankel expansion converges only for orders well below
// sqrt(x), so evaluate it at the fractional order and climb with the
// three-term recurrence, which is stable while the order stays below x.
double large_argument(double nu, double x) {
    if (nu < 1.0) return hankel(nu, x);
    const double steps = std::floor(nu);
    const double base = nu - steps;
    double prev = hankel(base, x);
    double cur = hankel(base + 1.0, x);
    for (double m = base + 1.0; m < nu - 0.5; m += 1.0) {
        const double next = 2.0 * m / x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Past the series limit, the ascending series stays well conditioned while
// x <= nu; beyond that the recurrence route applies.
bool use_series(double nu, double x) { return x <= kSeriesLimit || x <= nu; }

// A function with the sign of J_nu on (0, inf).
double sign_carrier(double nu, double x) {
    if (use_series(nu, x)) return static_cast<double>(series_reduced(nu, x));
    return large_argument(nu, x);
}

}  // namespace

double bessel_j(double nu, double x) {
    detail::require(nu > -1.0, "Bessel order must exceed -1");
    detail::require(x > 0.0, "Bessel argument must be positive");
    if (use_series(nu, x))
        return static_cast<double>(std::pow(0.5L * x, static_cast<long double>(nu)) * series_reduced(nu, x));
    return large_argument(nu, x);
}

double bessel_zero(double nu, int k) {
    detail::require(nu > -1.0, "Bessel order must exceed -1");
    detail::require(k >= 1, "zero index must be at least 1");
    // Below the first zero J_nu is positive. The first zero exceeds
    // 2 sqrt(nu + 1) / 2 for all nu > -1, so start the scan safely below it.
    double x = 0.5 * std::sqrt(nu + 1.0);
    double fx = sign_carrier(nu, x);
    if (!(fx > 0.0)) throw NumericalError("Bessel scan start is not below the first zero");
    const double step = std::min(0.05, 0.25 * x);
    int found = 0;
    for (int it = 0; it < 10000000; ++it) {
        const double x1 = x + step;
        const double f1 = sign_carrier(nu, x1);
        if ((fx > 0.0) != (f1 > 0.0)) {
            if (++found == k) {
                double lo = x, hi = x1;
                const bool lo_positive = fx > 0.0;
                for (int b = 0; b < 200; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    if ((sign_carrier(nu, mid) > 0.0) == lo_positive) lo = mid;
                    else hi = mid;
                }
                return 0.5 * (lo + hi);
            }
        }
        x = x1;
        fx = f1;
    }
    throw NumericalError("Bessel zero scan did not converge");
}

}  // namespace hardedge
