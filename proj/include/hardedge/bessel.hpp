#pragma once

namespace hardedge {

/// Bessel function of the first kind J_nu(x), nu > -1, x > 0.
/// Ascending series in long double for x <= 20, Hankel expansion beyond.
double bessel_j(double nu, double x);

/// k-th positive zero j_{nu,k} of J_nu (k >= 1), located by a sign-change
/// scan and refined by bisection to the limit of double precision.
double bessel_zero(double nu, int k);

}  // namespace hardedge
