#pragma once

#include <span>
#include <vector>

#include "hardedge/rng.hpp"

namespace hardedge {

/// A Brownian path b sampled on an increasing grid with b(grid[0] = 0) = 0.
///
/// Refinement only inserts points; values already present never change,
/// so a fixed environment can be studied at several resolutions.
struct EnvironmentPath {
    std::vector<double> grid;
    std::vector<double> values;

    std::size_t size() const { return grid.size(); }
    double end() const { return grid.back(); }

    /// Linear interpolation between grid points; throws outside the span.
    double value_at(double x) const;

    /// The all-zero path on `grid` (the beta = infinity environment).
    static EnvironmentPath zero(std::vector<double> grid);
};

/// Validates the EnvironmentPath invariants, throwing DomainError.
void check_path(const EnvironmentPath& path);

/// Increments b(grid[i+1]) - b(grid[i]) ~ N(0, grid[i+1] - grid[i]), independent.
std::vector<double> brownian_increments(std::span<const double> grid, RandomStream& stream);

/// Brownian path on `grid` (which must start at 0 and increase strictly).
EnvironmentPath sample_path(std::vector<double> grid, RandomStream& stream);

/// Brownian path on the uniform grid {0, h, 2h, ..., length}.
EnvironmentPath sample_path(double length, double h, RandomStream& stream);

/// Uniform grid {0, h, ..., n h} with n = round(length / h).
std::vector<double> uniform_grid(double length, double h);

/// Inserts `new_points` by sequential Brownian-bridge sampling conditioned on
/// the neighbouring values. Points already on the grid are ignored.
EnvironmentPath bridge_refine(const EnvironmentPath& path, std::span<const double> new_points,
                              RandomStream& stream);

/// Continues the path past its end with fresh increments on the grid
/// {end + h, end + 2h, ...} up to `new_end`.
EnvironmentPath extend_path(const EnvironmentPath& path, double new_end, double h,
                            RandomStream& stream);

}  // namespace hardedge
