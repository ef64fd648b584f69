#include "hardedge/sbo.hpp"

#include <algorithm>
#include <cmath>

#include "hardedge/ensemble.hpp"
#include "hardedge/errors.hpp"
#include "hardedge/parallel.hpp"

namespace hardedge {

double noise_coefficient(double beta) {
    detail::require(beta > 0.0, "beta must be positive");
    return std::isinf(beta) ? 0.0 : 2.0 / std::sqrt(beta);
}

SpeedScaleGrid build_speed_scale(double a, double beta, double length, double h,
                                 const EnvironmentPath& path) {
    detail::require(a > -1.0, "a must exceed -1");
    const double sigma = noise_coefficient(beta);
    check_path(path);
    SpeedScaleGrid ss;
    ss.a = a;
    ss.beta = beta;
    ss.h = h;
    ss.nodes = uniform_grid(length, h);
    ss.length = ss.nodes.back();
    const std::size_t cells = ss.nodes.size() - 1;
    detail::require(path.end() >= ss.length, "environment path does not reach L");
    ss.cell_mass.resize(cells);
    ss.cell_scale.resize(cells);
    ss.scale_cumulative.assign(cells + 1, 0.0);

    std::size_t p = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double left = ss.nodes[i];
        const double right = ss.nodes[i + 1];
        while (p < path.size() && path.grid[p] < left) ++p;
        detail::require(p < path.size() && path.grid[p] == left,
                        "environment path grid must contain every generator node");
        double mass = 0.0, scale = 0.0;
        double x0 = path.grid[p];
        double e0 = sigma * path.values[p];
        for (std::size_t q = p + 1; q < path.size() && path.grid[q] <= right; ++q) {
            const double x1 = path.grid[q];
            const double e1 = sigma * path.values[q];
            const double dx = x1 - x0;
            mass += 0.5 * dx * (std::exp(-(a + 1.0) * x0 - e0) + std::exp(-(a + 1.0) * x1 - e1));
            scale += 0.5 * dx * (std::exp(a * x0 + e0) + std::exp(a * x1 + e1));
            x0 = x1;
            e0 = e1;
        }
        detail::require(x0 == right, "environment path grid must contain every generator node");
        detail::require(mass > 0.0 && scale > 0.0 && std::isfinite(mass) && std::isfinite(scale),
                        "cell integral out of floating-point range");
        ss.cell_mass[i] = mass;
        ss.cell_scale[i] = scale;
        ss.scale_cumulative[i + 1] = ss.scale_cumulative[i] + scale;
    }
    return ss;
}

GeneratorDiscretization build_generator(const SpeedScaleGrid& ss, FarBoundary boundary) {
    const std::size_t cells = ss.cells();
    const std::size_t unknowns = boundary == FarBoundary::Reflecting ? cells : cells - 1;
    detail::require(unknowns >= 1, "generator needs at least one interior unknown");
    GeneratorDiscretization g;
    g.boundary = boundary;
    g.node_mass.resize(unknowns);
    // Unknown j sits at node i = j + 1, between cells i - 1 and i.
    for (std::size_t j = 0; j < unknowns; ++j) {
        const std::size_t i = j + 1;
        const double right = i < cells ? ss.cell_mass[i] : 0.0;
        g.node_mass[j] = 0.5 * (ss.cell_mass[i - 1] + right);
    }
    g.matrix.diag.resize(unknowns);
    g.matrix.offdiag.resize(unknowns - 1);
    for (std::size_t j = 0; j < unknowns; ++j) {
        const std::size_t i = j + 1;
        const double s_left = ss.conductance(i - 1);
        const double s_right = i < cells ? ss.conductance(i) : 0.0;
        g.matrix.diag[j] = (s_left + s_right) / g.node_mass[j];
        if (j + 1 < unknowns)
            g.matrix.offdiag[j] = -s_right / std::sqrt(g.node_mass[j] * g.node_mass[j + 1]);
    }
    return g;
}

std::vector<double> generator_eigenvalues(const GeneratorDiscretization& g, std::size_t k) {
    return smallest_eigenvalues(g.matrix, k, 1e-300, 1e-12);
}

std::vector<double> sbo_eigenvalues(double a, double beta, double length, double h, std::size_t k,
                                    const EnvironmentPath& path, FarBoundary boundary) {
    return generator_eigenvalues(build_generator(build_speed_scale(a, beta, length, h, path), boundary), k);
}

std::vector<double> sbo_eigenvalues(double a, double beta, double length, double h, std::size_t k,
                                    RandomStream& stream, FarBoundary boundary) {
    auto grid = uniform_grid(length, h);
    const auto path = std::isinf(beta) ? EnvironmentPath::zero(std::move(grid))
                                       : sample_path(std::move(grid), stream);
    return sbo_eigenvalues(a, beta, length, h, k, path, boundary);
}

std::vector<std::vector<double>> sbo_minima_draws(double a, double beta, double length, double h, std::size_t k,
                                                  std::size_t num_paths, const StreamFamily& family,
                                                  FarBoundary boundary) {
    detail::require(num_paths >= 1 && k >= 1, "need at least one path and one eigenvalue");
    return parallel_map(num_paths, [&](std::size_t i) {
        auto stream = family.stream(i);
        return sbo_eigenvalues(a, beta, length, h, k, stream, boundary);
    });
}

std::vector<EmpiricalDistribution> sample_sbo_minima(double a, double beta, double length, double h,
                                                     std::size_t k, std::size_t num_paths,
                                                     const StreamFamily& family, FarBoundary boundary) {
    return columns_of(sbo_minima_draws(a, beta, length, h, k, num_paths, family, boundary), k);
}

CoupledMinima sample_coupled_minima(double beta, double a, const std::vector<std::size_t>& sizes,
                                    double length, double h, std::size_t num_paths,
                                    const StreamFamily& family) {
    detail::require(num_paths >= 1 && !sizes.empty(), "need paths and matrix sizes");
    for (auto n : sizes)
        detail::require(std::log(static_cast<double>(n)) <= length, "log n must not exceed L");
    const auto rows = parallel_map(num_paths, [&](std::size_t i) {
        auto stream = family.stream(i);
        const auto path = sample_path(length, h, stream);
        std::vector<double> row;
        row.reserve(sizes.size() + 1);
        row.push_back(sbo_eigenvalues(a, beta, length, h, 1, path)[0]);
        EnvironmentPath flipped = path;
        for (double& v : flipped.values) v = -v;
        for (std::size_t j = 0; j < sizes.size(); ++j) {
            const auto points = coupling_points(sizes[j]);
            auto bridge = stream.with_lane(2 + 2 * j);
            auto chi = stream.with_lane(3 + 2 * j);
            const auto refined = bridge_refine(flipped, points, bridge);
            row.push_back(scaled_minima(sample_model_coupled(sizes[j], beta, a, refined, chi), 1)[0]);
        }
        return row;
    });
    CoupledMinima out;
    out.limit.resize(num_paths);
    out.scaled.assign(sizes.size(), std::vector<double>(num_paths));
    for (std::size_t i = 0; i < num_paths; ++i) {
        out.limit[i] = rows[i][0];
        for (std::size_t j = 0; j < sizes.size(); ++j) out.scaled[j][i] = rows[i][j + 1];
    }
    return out;
}

namespace {

double scale_function(double x, const SpeedScaleGrid& ss) {
    const auto& nodes = ss.nodes;
    if (x >= nodes.back()) return ss.scale_cumulative.back();
    auto i = static_cast<std::size_t>(std::floor(x / ss.h));
    i = std::min(i, ss.cells() - 1);
    const double w = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return ss.scale_cumulative[i] + w * ss.cell_scale[i];
}

}  // namespace

double greens_value(double x, double y, const SpeedScaleGrid& ss, GreensForm form) {
    detail::require(x >= 0.0 && y >= 0.0 && x <= ss.length && y <= ss.length,
                    "Green's function arguments must lie in [0, L]");
    const double lo = scale_function(std::min(x, y), ss);
    if (form == GreensForm::Untruncated) return lo;
    const double total = ss.scale_cumulative.back();
    return lo * (total - scale_function(std::max(x, y), ss)) / total;
}

double trace_inverse(const SpeedScaleGrid& ss, FarBoundary boundary) {
    const auto g = build_generator(ss, boundary);
    const double total = ss.scale_cumulative.back();
    double trace = 0.0;
    for (std::size_t j = 0; j < g.node_mass.size(); ++j) {
        const double s = ss.scale_cumulative[j + 1];
        const double kernel = boundary == FarBoundary::Reflecting ? s : s * (total - s) / total;
        trace += kernel * g.node_mass[j];
    }
    return trace;
}

}  // namespace hardedge
