#pragma once

#include <cstddef>
#include <vector>

namespace hardedge {

/// Symmetric tridiagonal matrix: diag (n) and offdiag (n - 1).
struct SymmetricTridiagonal {
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t size() const { return diag.size(); }
};

void check_tridiagonal(const SymmetricTridiagonal& t);

struct Interval {
    double lo;
    double hi;
};

/// Gershgorin enclosure of the whole spectrum.
Interval gershgorin_bounds(const SymmetricTridiagonal& t);

/// Number of eigenvalues strictly below sigma (negative pivots of the
/// shifted LDL^T recursion). Pivots smaller in magnitude than
/// pivmin = safmin * max(1, max e_i^2) are replaced by -pivmin.
std::size_t sturm_count(const SymmetricTridiagonal& t, double sigma);

/// The k smallest eigenvalues in increasing order, by Sturm bisection.
/// Each bracket is shrunk until hi - lo <= max(tol, rel_tol * |eigenvalue|)
/// or until the floating-point midpoint stops moving.
std::vector<double> smallest_eigenvalues(const SymmetricTridiagonal& t, std::size_t k, double tol,
                                         double rel_tol = 0.0);

}  // namespace hardedge
