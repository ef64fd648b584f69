#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "hardedge/bessel.hpp"
#include "hardedge/sbo.hpp"
#include "oracles.hpp"

using namespace hardedge;

namespace {

double exp_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

SpeedScaleGrid toy_grid(std::vector<double> mass, std::vector<double> scale) {
    SpeedScaleGrid ss;
    ss.h = 1.0;
    for (std::size_t i = 0; i <= mass.size(); ++i) ss.nodes.push_back(double(i));
    ss.length = ss.nodes.back();
    ss.scale_cumulative.push_back(0.0);
    for (double s : scale) ss.scale_cumulative.push_back(ss.scale_cumulative.back() + s);
    ss.cell_mass = std::move(mass);
    ss.cell_scale = std::move(scale);
    return ss;
}

EnvironmentPath flat(double length, double h) { return EnvironmentPath::zero(uniform_grid(length, h)); }

}  // namespace

TEST_CASE("noise coefficient") {
    CHECK(noise_coefficient(4.0) == 1.0);
    CHECK(noise_coefficient(INFINITY) == 0.0);
    CHECK_THROWS_AS(noise_coefficient(0.0), DomainError);
}

TEST_CASE("flat speed and scale") {
    const double h = 0.125;
    const auto ss = build_speed_scale(0.0, 2.0, 4.0, h, flat(4.0, h));
    CHECK(ss.cells() == 32);
    for (std::size_t i = 0; i < ss.cells(); ++i) {
        CHECK(ss.conductance(i) == doctest::Approx(1.0 / h).epsilon(1e-14));
        const double x0 = ss.nodes[i], x1 = ss.nodes[i + 1];
        CHECK(ss.cell_mass[i] == doctest::Approx(0.5 * h * (std::exp(-x0) + std::exp(-x1))));
    }
    // beta = inf is the zero-path case whatever the path.
    RandomStream s(51, 0);
    const auto noisy = sample_path(4.0, h, s);
    const auto inf = build_speed_scale(0.0, INFINITY, 4.0, h, noisy);
    CHECK(inf.cell_mass == ss.cell_mass);
    CHECK(inf.cell_scale == ss.cell_scale);

    CHECK_THROWS_AS(build_speed_scale(0.0, 2.0, 8.0, h, flat(4.0, h)), DomainError);
    CHECK_THROWS_AS(build_speed_scale(0.0, 2.0, 4.0, h, flat(4.0, 0.3)), DomainError);
}

TEST_CASE("cell masses converge at second order on smooth segments") {
    // Deterministic part only: b = 0, a = 1.5. Halving h quarters the trapezoid error.
    const double a = 1.5;
    const auto coarse = build_speed_scale(a, 2.0, 2.0, 0.1, flat(2.0, 0.1));
    const auto fine = build_speed_scale(a, 2.0, 2.0, 0.05, flat(2.0, 0.05));
    const auto finer = build_speed_scale(a, 2.0, 2.0, 0.025, flat(2.0, 0.025));
    for (std::size_t i = 0; i < coarse.cells(); ++i) {
        const double e1 = coarse.cell_mass[i] - (fine.cell_mass[2 * i] + fine.cell_mass[2 * i + 1]);
        const double e2 = (fine.cell_mass[2 * i] + fine.cell_mass[2 * i + 1]) -
                          (finer.cell_mass[4 * i] + finer.cell_mass[4 * i + 1] + finer.cell_mass[4 * i + 2] +
                           finer.cell_mass[4 * i + 3]);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
    }
}

TEST_CASE("generator assembly") {
    SUBCASE("unit toy with Dirichlet ends") {
        const auto g = build_generator(toy_grid({1, 1, 1}, {1, 1, 1}), FarBoundary::Dirichlet);
        CHECK(g.matrix.diag == std::vector<double>{2.0, 2.0});
        CHECK(g.matrix.offdiag == std::vector<double>{-1.0});
        const auto ev = generator_eigenvalues(g, 2);
        CHECK(ev[0] == doctest::Approx(1.0));
        CHECK(ev[1] == doctest::Approx(3.0));
    }
    SUBCASE("symmetrization is a similarity of the row form") {
        RandomStream s(52, 0);
        std::vector<double> mass, scale;
        for (int i = 0; i < 7; ++i) {
            mass.push_back(0.5 + s.uniform());
            scale.push_back(0.5 + s.uniform());
        }
        for (auto boundary : {FarBoundary::Dirichlet, FarBoundary::Reflecting}) {
            const auto ss = toy_grid(mass, scale);
            const auto g = build_generator(ss, boundary);
            const std::size_t n = g.node_mass.size();
            // Row form: (Gf)_i = -[s_{i+1/2}(f_{i+1} - f_i) - s_{i-1/2}(f_i - f_{i-1})] / m_i.
            oracle::Dense row(n);
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t i = j + 1;
                const double sl = 1.0 / scale[i - 1];
                const double sr = i < mass.size() ? 1.0 / scale[i] : 0.0;
                const double m = 0.5 * (mass[i - 1] + (i < mass.size() ? mass[i] : 0.0));
                row(j, j) = (sl + sr) / m;
                if (j > 0) row(j, j - 1) = -sl / m;
                if (j + 1 < n) row(j, j + 1) = -sr / m;
            }
            oracle::Dense sym(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    sym(i, j) = std::sqrt(g.node_mass[i]) * row(i, j) / std::sqrt(g.node_mass[j]);
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(sym(j, j) == doctest::Approx(g.matrix.diag[j]));
                if (j + 1 < n) {
                    CHECK(sym(j, j + 1) == doctest::Approx(g.matrix.offdiag[j]));
                    CHECK(sym(j + 1, j) == doctest::Approx(g.matrix.offdiag[j]));
                }
            }
            const auto ref = oracle::jacobi_eigenvalues(sym);
            const auto ev = generator_eigenvalues(g, n);
            for (std::size_t k = 0; k < n; ++k) CHECK(ev[k] == doctest::Approx(ref[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("noiseless spectrum sits at j^2 / 4") {
    // e^{ax/2} J_a(2 sqrt(lambda) e^{-x/2}) solves the zero-noise problem with f(0) = 0,
    // so Lambda_k = j_{a,k+1}^2 / 4.
    const double h = std::ldexp(1.0, -10);
    for (double a : {0.0, 0.5, 2.0}) {
        CAPTURE(a);
        const auto ev = sbo_eigenvalues(a, INFINITY, 12.0, h, 3, flat(12.0, h));
        for (int k = 0; k < 3; ++k) {
            const double j = bessel_zero(a, k + 1);
            CHECK(std::abs(ev[k] - 0.25 * j * j) <= 1e-2);
        }
    }
}

TEST_CASE("spectrum is positive and increasing") {
    RandomStream s(53, 0);
    const auto ev = sbo_eigenvalues(0.3, 1.0, 10.0, 1.0 / 128, 4, s);
    CHECK(ev[0] > 0.0);
    for (int k = 1; k < 4; ++k) CHECK(ev[k] > ev[k - 1]);
}

TEST_CASE("limit law at beta = 2, a = 0 is Exp(1)") {
    // Reduced size; the full check runs in the acceptance suite.
    const auto d = sample_sbo_minima(0.0, 2.0, 16.0, 1.0 / 256, 1, 3000, StreamFamily{54, 0});
    CHECK(ks_distance(d[0], exp_cdf) <= dkw_band(3000, 0.01) + 0.014);
}

TEST_CASE("grid refinement on fixed environments") {
    // Each halving bridge-refines the same path. Cell errors of the trapezoid
    // rule on e^{sigma b} are mean-zero of size h^{3/2}, so the change in
    // Lambda_0 has RMS of order h. Single paths fluctuate; the order is read
    // from the RMS over 20 environments, with 0.1 of Monte Carlo slack.
    const int levels = 6;
    std::vector<double> sq(levels, 0.0);
    for (std::uint64_t e = 0; e < 20; ++e) {
        RandomStream s(55, e);
        auto path = sample_path(12.0, 1.0 / 32, s);
        double prev = 0.0;
        for (int level = 0; level < levels; ++level) {
            const double h = std::ldexp(1.0, -5 - level);
            if (level > 0) {
                std::vector<double> mids;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) mids.push_back(0.5 * (path.grid[i] + path.grid[i + 1]));
                auto bridge = s.with_lane(static_cast<std::uint64_t>(level));
                path = bridge_refine(path, mids, bridge);
            }
            const double l = sbo_eigenvalues(1.0, 2.0, 12.0, h, 1, path)[0];
            if (level > 0) sq[level] += (l - prev) * (l - prev);
            prev = l;
        }
    }
    std::vector<double> x, y;
    for (int level = 1; level < levels; ++level) {
        x.push_back(level);
        y.push_back(std::log2(std::sqrt(sq[level] / 20.0)));
        if (level > 1) CHECK(sq[level] < sq[level - 1]);
    }
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    CHECK(-sxy / sxx >= 0.9);
}

TEST_CASE("domain truncation") {
    RandomStream s(56, 0);
    const double h = 1.0 / 128;
    auto path = sample_path(32.0, h, s);
    std::vector<double> lambda;
    for (double length : {4.0, 8.0, 16.0, 32.0}) lambda.push_back(sbo_eigenvalues(0.0, 2.0, length, h, 1, path)[0]);
    for (std::size_t i = 1; i < lambda.size(); ++i) CHECK(lambda[i] <= lambda[i - 1]);
    CHECK(std::abs(lambda[3] - lambda[2]) <= 1e-3);
}

TEST_CASE("green's function") {
    const double h = 0.01;
    const auto ss = build_speed_scale(0.0, 2.0, 10.0, h, flat(10.0, h));
    CHECK(greens_value(0.0, 3.0, ss) == 0.0);
    CHECK(greens_value(2.5, 7.0, ss) == doctest::Approx(2.5));
    CHECK(greens_value(2.5, 7.0, ss, GreensForm::Truncated) == doctest::Approx(2.5 * 3.0 / 10.0));
    CHECK_THROWS_AS(greens_value(11.0, 1.0, ss), DomainError);

    RandomStream s(57, 0);
    const auto noisy = build_speed_scale(0.5, 1.0, 10.0, h, sample_path(10.0, h, s));
    for (double x = 0.0; x <= 10.0; x += 0.37)
        for (double y = 0.0; y <= 10.0; y += 0.53)
            CHECK(greens_value(x, y, noisy, GreensForm::Truncated) <= greens_value(x, y, noisy));
}

TEST_CASE("trace of the inverse") {
    const double h = 1.0 / 256;
    const auto ss = build_speed_scale(0.0, 2.0, 40.0, h, flat(40.0, h));
    CHECK(trace_inverse(ss) == doctest::Approx(1.0).epsilon(1e-4));

    for (std::uint64_t i = 0; i < 5; ++i) {
        RandomStream s(58, i);
        const auto noisy = build_speed_scale(0.0, 2.0, 20.0, h, sample_path(20.0, h, s));
        const double full = trace_inverse(noisy);
        CHECK(trace_inverse(noisy, FarBoundary::Dirichlet) <= full);
        const auto ev = generator_eigenvalues(build_generator(noisy), 5);
        double partial = 0.0;
        for (double l : ev) partial += 1.0 / l;
        CHECK(partial <= full * (1.0 + 1e-10));
    }
}

TEST_CASE("bessel zeros") {
    CHECK(bessel_zero(0.0, 1) == doctest::Approx(2.404826).epsilon(1e-6 / 2.4));
    for (int k = 1; k <= 5; ++k) CHECK(bessel_zero(0.5, k) == doctest::Approx(k * M_PI).epsilon(1e-10));
    for (double nu : {-0.5, 0.0, 0.3, 1.0, 2.0, 7.5}) {
        for (int k = 1; k <= 6; ++k) {
            const double z = bessel_zero(nu, k);
            CHECK(z == doctest::Approx(boost::math::cyl_bessel_j_zero(nu, k)).epsilon(1e-8));
            CHECK(std::abs(bessel_j(nu, z)) < 1e-9);
            if (k > 1) CHECK(z > bessel_zero(nu, k - 1));
            // Interlacing: j_{nu,k} < j_{nu+1,k} < j_{nu,k+1}.
            CHECK(z < bessel_zero(nu + 1.0, k));
            CHECK(bessel_zero(nu + 1.0, k) < bessel_zero(nu, k + 1));
        }
    }
    for (double x : {0.5, 3.0, 19.0, 25.0, 60.0})
        CHECK(bessel_j(1.3, x) == doctest::Approx(boost::math::cyl_bessel_j(1.3, x)).epsilon(1e-9));
    CHECK_THROWS_AS(bessel_zero(-1.0, 1), DomainError);
    CHECK_THROWS_AS(bessel_zero(0.0, 0), DomainError);
}
