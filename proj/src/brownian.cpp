#include "hardedge/brownian.hpp"

#include <algorithm>
#include <cmath>

namespace hardedge {

double EnvironmentPath::value_at(double x) const {
    detail::require(!grid.empty() && x >= grid.front() && x <= grid.back(),
                    "path evaluated outside its span");
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    const auto i = static_cast<std::size_t>(it - grid.begin());
    if (grid[i] == x) return values[i];
    const double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

EnvironmentPath EnvironmentPath::zero(std::vector<double> grid) {
    EnvironmentPath path{std::move(grid), {}};
    path.values.assign(path.grid.size(), 0.0);
    check_path(path);
    return path;
}

void check_path(const EnvironmentPath& path) {
    detail::require(!path.grid.empty() && path.grid.size() == path.values.size(),
                    "path grid and values must be non-empty and of equal length");
    detail::require(path.grid.front() == 0.0 && path.values.front() == 0.0,
                    "path must start at b(0) = 0");
    for (std::size_t i = 1; i < path.grid.size(); ++i)
        detail::require(path.grid[i] > path.grid[i - 1], "path grid must be strictly increasing");
}

std::vector<double> brownian_increments(std::span<const double> grid, RandomStream& stream) {
    detail::require(!grid.empty() && grid.front() == 0.0, "grid must start at 0");
    std::vector<double> increments;
    increments.reserve(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dx = grid[i] - grid[i - 1];
        detail::require(dx > 0.0, "grid must be strictly increasing");
        increments.push_back(std::sqrt(dx) * stream.gaussian());
    }
    return increments;
}

EnvironmentPath sample_path(std::vector<double> grid, RandomStream& stream) {
    const auto increments = brownian_increments(grid, stream);
    EnvironmentPath path{std::move(grid), {}};
    path.values.resize(path.grid.size());
    path.values[0] = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i)
        path.values[i + 1] = path.values[i] + increments[i];
    return path;
}

std::vector<double> uniform_grid(double length, double h) {
    detail::require(length > 0.0 && h > 0.0, "grid length and step must be positive");
    const auto cells = static_cast<std::size_t>(std::llround(length / h));
    detail::require(cells >= 1, "grid needs at least one cell");
    std::vector<double> grid(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) grid[i] = static_cast<double>(i) * h;
    return grid;
}

EnvironmentPath sample_path(double length, double h, RandomStream& stream) {
    return sample_path(uniform_grid(length, h), stream);
}

EnvironmentPath bridge_refine(const EnvironmentPath& path, std::span<const double> new_points,
                              RandomStream& stream) {
    check_path(path);
    std::vector<double> points(new_points.begin(), new_points.end());
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (double x : points)
        detail::require(x >= path.grid.front() && x <= path.grid.back(),
                        "bridge refinement point outside the path span");

    EnvironmentPath out;
    out.grid.reserve(path.size() + points.size());
    out.values.reserve(path.size() + points.size());
    out.grid.push_back(path.grid[0]);
    out.values.push_back(path.values[0]);

    // Left-to-right: each insertion conditions on the previously emitted point
    // (original or inserted) and the next original point.
    std::size_t p = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double right_x = path.grid[i];
        const double right_b = path.values[i];
        while (p < points.size() && points[p] <= path.grid[i - 1]) ++p;
        while (p < points.size() && points[p] < right_x) {
            const double left_x = out.grid.back();
            const double left_b = out.values.back();
            const double x = points[p];
            const double span = right_x - left_x;
            const double w = (x - left_x) / span;
            const double mean = left_b + w * (right_b - left_b);
            const double sd = std::sqrt((x - left_x) * (right_x - x) / span);
            out.grid.push_back(x);
            out.values.push_back(mean + sd * stream.gaussian());
            ++p;
        }
        out.grid.push_back(right_x);
        out.values.push_back(right_b);
    }
    return out;
}

EnvironmentPath extend_path(const EnvironmentPath& path, double new_end, double h,
                            RandomStream& stream) {
    check_path(path);
    detail::require(h > 0.0, "extension step must be positive");
    EnvironmentPath out = path;
    const double start = path.end();
    const auto steps = static_cast<std::size_t>(std::llround((new_end - start) / h));
    for (std::size_t i = 1; i <= steps; ++i) {
        const double x = start + static_cast<double>(i) * h;
        out.values.push_back(out.values.back() + std::sqrt(x - out.grid.back()) * stream.gaussian());
        out.grid.push_back(x);
    }
    return out;
}

}  // namespace hardedge
