#include <doctest.h>

#include <cmath>

#include "hardedge/ensemble.hpp"
#include "hardedge/stats.hpp"
#include "oracles.hpp"

using namespace hardedge;

namespace {

oracle::Dense upper_dense(const BidiagonalModel& m) {
    oracle::Dense d(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
        d(i, i) = m.diag[i];
        if (i + 1 < m.n) d(i, i + 1) = m.superdiag[i];
    }
    return d;
}

oracle::Dense lower_dense(const LowerBidiagonal& m) {
    oracle::Dense d(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        d(i, i) = m.diag[i];
        if (i + 1 < m.size()) d(i + 1, i) = m.subdiag[i];
    }
    return d;
}

BidiagonalModel hand_model(std::vector<double> diag, std::vector<double> superdiag) {
    BidiagonalModel m;
    m.n = diag.size();
    m.beta = 2.0;
    m.diag = std::move(diag);
    m.superdiag = std::move(superdiag);
    return m;
}

double exp_cdf(double rate, double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }

}  // namespace

TEST_CASE("model shape and parameter domain") {
    RandomStream s(31, 0);
    const auto m = sample_model(5, 1.5, 0.3, s);
    CHECK(m.diag.size() == 5);
    CHECK(m.superdiag.size() == 4);
    for (double x : m.diag) CHECK(x > 0.0);
    for (double y : m.superdiag) CHECK(y > 0.0);
    CHECK_THROWS_AS(sample_model(0, 2.0, 0.0, s), DomainError);
    CHECK_THROWS_AS(sample_model(3, -1.0, 0.0, s), DomainError);
    CHECK_THROWS_AS(sample_model(3, 2.0, -1.0, s), DomainError);

    RandomStream s1(31, 5), s2(31, 5);
    const auto m1 = sample_model(7, 2.0, 1.0, s1);
    const auto m2 = sample_model(7, 2.0, 1.0, s2);
    CHECK(m1.diag == m2.diag);
    CHECK(m1.superdiag == m2.superdiag);
}

TEST_CASE("chi index pattern") {
    // E x^2 = r / beta for x = chi_r / sqrt(beta).
    const int num = 40000;
    SUBCASE("n = 1") {
        std::vector<double> sq(num);
        for (int i = 0; i < num; ++i) {
            RandomStream s(32, static_cast<std::uint64_t>(i));
            const auto m = sample_model(1, 3.0, 0.7, s);
            sq[i] = m.diag[0] * m.diag[0];
        }
        CHECK(std::abs(mean_of(sq) - 1.7) < 4.0 * standard_error(sq));
    }
    SUBCASE("n = 3, beta = 2, a = 0: diag indices (6, 4, 2), superdiag (4, 2)") {
        std::vector<std::vector<double>> d(3, std::vector<double>(num)), e(2, std::vector<double>(num));
        for (int i = 0; i < num; ++i) {
            RandomStream s(33, static_cast<std::uint64_t>(i));
            const auto m = sample_model(3, 2.0, 0.0, s);
            for (int k = 0; k < 3; ++k) d[k][i] = m.diag[k] * m.diag[k];
            for (int k = 0; k < 2; ++k) e[k][i] = m.superdiag[k] * m.superdiag[k];
        }
        const double diag_means[] = {3.0, 2.0, 1.0};
        const double super_means[] = {2.0, 1.0};
        for (int k = 0; k < 3; ++k) CHECK(std::abs(mean_of(d[k]) - diag_means[k]) < 4.0 * standard_error(d[k]));
        for (int k = 0; k < 2; ++k) CHECK(std::abs(mean_of(e[k]) - super_means[k]) < 4.0 * standard_error(e[k]));
    }
}

TEST_CASE("gram tridiagonal") {
    const auto one = gram_tridiagonal(hand_model({1.5}, {}));
    CHECK(one.diag[0] == doctest::Approx(2.25));

    const auto t = gram_tridiagonal(hand_model({2.0, 3.0}, {1.0}));
    CHECK(t.diag[0] == 5.0);
    CHECK(t.diag[1] == 9.0);
    CHECK(t.offdiag[0] == 3.0);

    RandomStream s(34, 0);
    const auto m = sample_model(6, 2.5, 0.4, s);
    const auto g = gram_tridiagonal(m);
    const auto l = upper_dense(m);
    const auto ref = oracle::multiply(l, oracle::transpose(l));
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(g.diag[i] == doctest::Approx(ref(i, i)).epsilon(1e-14));
        if (i + 1 < 6) CHECK(g.offdiag[i] == doctest::Approx(ref(i, i + 1)).epsilon(1e-14));
    }
}

TEST_CASE("anti-diagonal conjugation") {
    const auto m2 = conjugate_antidiagonal(hand_model({2.0, 5.0}, {3.0}));
    CHECK(m2.diag == std::vector<double>{5.0, 2.0});
    CHECK(m2.subdiag == std::vector<double>{-3.0});

    const auto m1 = conjugate_antidiagonal(hand_model({4.0}, {}));
    CHECK(m1.diag == std::vector<double>{4.0});
    CHECK(m1.subdiag.empty());

    RandomStream s(35, 0);
    const auto l = sample_model(8, 1.0, 0.5, s);
    const auto m = conjugate_antidiagonal(l);
    const auto lm = upper_dense(l);
    const auto mm = lower_dense(m);
    const auto a = oracle::jacobi_eigenvalues(oracle::multiply(lm, oracle::transpose(lm)));
    const auto b = oracle::jacobi_eigenvalues(oracle::multiply(mm, oracle::transpose(mm)));
    for (std::size_t k = 0; k < 8; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));

    const auto back = model_from_conjugate(m, l.beta, l.a);
    CHECK(back.diag == l.diag);
    CHECK(back.superdiag == l.superdiag);
}

TEST_CASE("inverse kernel") {
    SUBCASE("n = 1") {
        const LowerBidiagonal m{{0.8}, {}};
        CHECK(inverse_kernel(m).entry(0, 0) == doctest::Approx(1.0 / 0.8));
    }
    SUBCASE("n = 5 against the dense triangular inverse") {
        RandomStream s(36, 0);
        const auto m = conjugate_antidiagonal(sample_model(5, 2.0, 0.5, s));
        const auto k = inverse_kernel(m);
        auto scaled = lower_dense(m);
        for (double& v : scaled.v) v *= std::sqrt(5.0);
        const auto inv = oracle::lower_triangular_inverse(scaled);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) {
                if (j > i) {
                    CHECK(k.entry(i, j) == 0.0);
                } else {
                    // Cell values carry the 1/n quadrature weight of the integral operator.
                    CHECK(k.entry(i, j) / 5.0 == doctest::Approx(inv(i, j)).epsilon(1e-12));
                }
            }
    }
    SUBCASE("zero diagonal") {
        CHECK_THROWS(inverse_kernel(LowerBidiagonal{{1.0, 0.0}, {-1.0}}));
    }
    SUBCASE("long products stay finite in log space") {
        RandomStream s(37, 0);
        const auto k = inverse_kernel(conjugate_antidiagonal(sample_model(3000, 1.0, 0.0, s)));
        CHECK(std::isfinite(k.log_sum(2999)));
        CHECK(std::isfinite(k.entry(2999, 0)));
    }
}

TEST_CASE("operator norm identity") {
    SUBCASE("diagonal case") {
        const double c = 1.7;
        const LowerBidiagonal m{{c, c, c, c}, {0.0, 0.0, 0.0}};
        CHECK(operator_norm_sq(inverse_kernel(m), 1e-13) == doctest::Approx(1.0 / (4.0 * c * c)).epsilon(1e-12));
    }
    SUBCASE("n = 1") {
        RandomStream s(38, 0);
        const auto l = sample_model(1, 2.0, 0.0, s);
        const double lambda = l.diag[0] * l.diag[0];
        CHECK(operator_norm_sq(inverse_kernel(conjugate_antidiagonal(l)), 1e-12) * lambda ==
              doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("random n = 30") {
        for (std::uint64_t i = 0; i < 20; ++i) {
            RandomStream s(39, i);
            const auto l = sample_model(30, 2.0, 1.0, s);
            const double lmin = smallest_eigenvalues(gram_tridiagonal(l), 1, 1e-300, 1e-15)[0];
            const double norm = operator_norm_sq(inverse_kernel(conjugate_antidiagonal(l)), 1e-12);
            CHECK(std::abs(norm * 30.0 * lmin - 1.0) <= 1e-8);
        }
    }
    SUBCASE("iteration cap") {
        RandomStream s(40, 0);
        const auto k = inverse_kernel(conjugate_antidiagonal(sample_model(10, 2.0, 0.0, s)));
        CHECK_THROWS_AS(operator_norm_sq(k, 1e-300, 3), NumericalError);
    }
}

TEST_CASE("limit kernel") {
    EnvironmentPath zero = EnvironmentPath::zero(uniform_grid(4.0, 0.01));
    CHECK(limit_kernel_value(1.0, 0.25, 2.0, 2.0, zero) == doctest::Approx(0.25));
    CHECK(limit_kernel_value(1.0, 0.25, 0.0, 2.0, zero) == doctest::Approx(1.0));
    CHECK(limit_kernel_value(0.5, 0.5, 0.0, 2.0, zero) == 0.0);
    CHECK(limit_kernel_value(0.3, 0.6, 0.0, 2.0, zero) == 0.0);

    // The stochastic integral has mean zero, so the log kernel averages to
    // -(1+a)/2 log x + a/2 log y.
    const double x = 0.8, y = 0.1, a = 0.5, beta = 2.0;
    std::vector<double> logs(10000);
    for (std::size_t i = 0; i < logs.size(); ++i) {
        RandomStream s(41, i);
        logs[i] = std::log(limit_kernel_value(x, y, a, beta, sample_path(3.0, 0.01, s)));
    }
    const double expected = -0.5 * (1.0 + a) * std::log(x) + 0.5 * a * std::log(y);
    CHECK(std::abs(mean_of(logs) - expected) < 4.0 * standard_error(logs));
}

TEST_CASE("diagonal entries approach 1 / sqrt(x)") {
    // sqrt(n beta) / chi_{(floor(n x) + a) beta}, n = 1e4, over 1e3 draws.
    const double n = 1e4, beta = 2.0, a = 0.5;
    for (double x : {0.25, 0.5, 1.0}) {
        std::vector<double> v(1000);
        for (std::size_t i = 0; i < v.size(); ++i) {
            RandomStream s(42, i);
            v[i] = std::sqrt(n * beta) / sample_chi(ChiIndex((std::floor(n * x) + a) * beta), s);
        }
        CHECK(std::abs(mean_of(v) - 1.0 / std::sqrt(x)) < 3.0 * standard_error(v));
    }
}

TEST_CASE("exact exponential law of n lambda_0") {
    SUBCASE("beta = 2, a = 0, rate 1") {
        for (std::size_t n : {4, 32}) {
            const auto d = sample_scaled_minima(n, 2.0, 0.0, 1, 10000, StreamFamily{43, n});
            CHECK(ks_distance(d[0], [](double t) { return exp_cdf(1.0, t); }) <= dkw_band(10000, 0.01));
        }
    }
    SUBCASE("beta = 4, a = -1/2, rate 2") {
        const auto d = sample_scaled_minima(16, 4.0, -0.5, 1, 10000, StreamFamily{44, 0});
        CHECK(ks_distance(d[0], [](double t) { return exp_cdf(2.0, t); }) <= dkw_band(10000, 0.01));
    }
}

TEST_CASE("scaled minima are ordered and positive") {
    const auto draws = scaled_minima_draws(20, 1.0, 0.0, 3, 200, StreamFamily{45, 0});
    for (const auto& row : draws) {
        CHECK(row[0] > 0.0);
        CHECK(row[0] < row[1]);
        CHECK(row[1] < row[2]);
    }
}

TEST_CASE("coupled model has the uncoupled law") {
    const std::size_t n = 20;
    std::vector<double> coupled(10000), plain(10000);
    for (std::size_t i = 0; i < coupled.size(); ++i) {
        RandomStream s(46, i);
        auto path = sample_path(std::log(double(n)) + 0.5, 0.05, s);
        auto bridge = s.with_lane(1);
        path = bridge_refine(path, coupling_points(n), bridge);
        auto chi = s.with_lane(2);
        coupled[i] = scaled_minima(sample_model_coupled(n, 2.0, 1.0, path, chi), 1)[0];
        RandomStream t(47, i);
        plain[i] = scaled_minima(sample_model(n, 2.0, 1.0, t), 1)[0];
    }
    CHECK(ks_distance(EmpiricalDistribution(coupled), EmpiricalDistribution(plain)) <= 0.025);
}
