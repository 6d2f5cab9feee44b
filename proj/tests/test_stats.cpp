#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "lifecast/errors.hpp"
#include "lifecast/reference.hpp"
#include "lifecast/stats.hpp"
#include "lifecast/synth.hpp"

using namespace lifecast;
using stats::Matrix;

TEST_SUITE("compensated_sum") {

TEST_CASE("recovers cancelled small terms") {
    std::vector<double> values = {1e16, 1.0, -1e16};
    CHECK(stats::compensated_sum(values) == 1.0);
}

TEST_CASE("matches plain summation on benign input") {
    std::vector<double> values(100, 0.5);
    CHECK(stats::compensated_sum(values) == 50.0);
    CHECK(stats::compensated_sum({}) == 0.0);
}

}  // compensated_sum suite

TEST_SUITE("ols") {

TEST_CASE("fits an exact line") {
    Matrix design(3, 2);
    for (std::size_t r = 0; r < 3; ++r) {
        design(r, 0) = 1.0;
        design(r, 1) = static_cast<double>(r);
    }
    std::vector<double> target = {1.0, 3.0, 5.0};
    auto fit = stats::ols(design, target);
    REQUIRE(fit.coefficients.size() == 2);
    CHECK(fit.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.coefficients[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.rss == doctest::Approx(0.0).epsilon(1e-18));
    CHECK(fit.n_obs == 3);
    CHECK(fit.n_params == 2);
    // (X^T X)^-1 diagonal for this design is [5/6, 1/2]
    CHECK(fit.cov_unscaled_diag[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(fit.cov_unscaled_diag[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("agrees with the normal-equation route on benign designs") {
    synth::Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 40, k = 4;
        Matrix design(n, k);
        std::vector<double> target(n);
        for (std::size_t r = 0; r < n; ++r) {
            design(r, 0) = 1.0;
            for (std::size_t c = 1; c < k; ++c) design(r, c) = rng.normal(0.0, 1.0);
            target[r] = rng.normal(0.0, 1.0);
        }
        auto fit = stats::ols(design, target);
        auto ref = reference::ols_normal_equations(design, target);
        REQUIRE(fit.coefficients.size() == ref.size());
        for (std::size_t c = 0; c < k; ++c) {
            CHECK(fit.coefficients[c] == doctest::Approx(ref[c]).epsilon(1e-8));
        }
    }
}

TEST_CASE("duplicate columns raise a collinearity error") {
    Matrix design(5, 2);
    for (std::size_t r = 0; r < 5; ++r) {
        design(r, 0) = static_cast<double>(r);
        design(r, 1) = 2.0 * static_cast<double>(r);
    }
    std::vector<double> target = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(stats::ols(design, target), CollinearityError);
}

}  // ols suite

TEST_SUITE("special_functions") {

TEST_CASE("log_gamma matches the standard library") {
    CHECK(stats::log_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-12));
    CHECK(stats::log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(stats::log_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(stats::log_gamma(10.3) == doctest::Approx(13.48203678613836).epsilon(1e-12));
    for (double x : {0.1, 0.9, 1.5, 3.25, 7.0, 42.0, 170.5}) {
        CHECK(stats::log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    }
}

TEST_CASE("incomplete beta hits symmetry points") {
    CHECK(stats::regularized_incomplete_beta(2.0, 2.0, 0.5) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stats::regularized_incomplete_beta(1.0, 1.0, 0.3) ==
          doctest::Approx(0.3).epsilon(1e-12));
    for (double x : {0.1, 0.4, 0.7}) {
        double lhs = stats::regularized_incomplete_beta(2.5, 4.0, x);
        double rhs = 1.0 - stats::regularized_incomplete_beta(4.0, 2.5, 1.0 - x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    CHECK(stats::regularized_incomplete_beta(3.0, 5.0, 0.0) == 0.0);
    CHECK(stats::regularized_incomplete_beta(3.0, 5.0, 1.0) == 1.0);
}

TEST_CASE("F upper tail matches pinned table values") {
    // pinned against an independent statistics package
    CHECK(stats::f_sf(4.10, 2.0, 10.0) ==
          doctest::Approx(0.05007754848108387).epsilon(1e-10));
    CHECK(stats::f_sf(1.0, 5.0, 20.0) ==
          doctest::Approx(0.44302518468487956).epsilon(1e-10));
    CHECK(stats::f_sf(3.5, 1.0, 30.0) ==
          doctest::Approx(0.07115201925913474).epsilon(1e-10));
    CHECK(stats::f_sf(2.0, 30.0, 30.0) ==
          doctest::Approx(0.031138638477376298).epsilon(1e-10));
}

TEST_CASE("F upper tail is one at or below zero and decreasing") {
    CHECK(stats::f_sf(0.0, 3.0, 7.0) == 1.0);
    CHECK(stats::f_sf(-2.0, 3.0, 7.0) == 1.0);
    double prev = 1.0;
    for (double x : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        double p = stats::f_sf(x, 3.0, 7.0);
        CHECK(p < prev);
        CHECK(p > 0.0);
        prev = p;
    }
}

TEST_CASE("F upper tail agrees with quadrature") {
    for (double d1 : {1.0, 2.0, 5.0, 30.0}) {
        for (double d2 : {1.0, 5.0, 30.0}) {
            for (double x : {0.5, 2.0, 7.5}) {
                double got = stats::f_sf(x, d1, d2);
                double want = reference::f_upper_tail_quadrature(x, d1, d2);
                CHECK(got == doctest::Approx(want).epsilon(1e-8));
            }
        }
    }
}

}  // special_functions suite

TEST_SUITE("nelder_mead") {

TEST_CASE("minimizes a separable quadratic") {
    auto f = [](std::span<const double> v) {
        return (v[0] - 3.0) * (v[0] - 3.0) + (v[1] + 1.0) * (v[1] + 1.0);
    };
    double start[] = {0.0, 0.0};
    stats::NelderMeadOptions options;
    options.tolerance = 1e-16;
    options.max_iterations = 2000;
    auto result = stats::nelder_mead(f, start, options);
    CHECK(result.converged);
    CHECK(result.argmin[0] == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(result.argmin[1] == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(result.value == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("walks the Rosenbrock valley") {
    auto f = [](std::span<const double> v) {
        double a = 1.0 - v[0];
        double b = v[1] - v[0] * v[0];
        return a * a + 100.0 * b * b;
    };
    double start[] = {-1.2, 1.0};
    stats::NelderMeadOptions options;
    options.tolerance = 1e-12;
    options.max_iterations = 5000;
    auto result = stats::nelder_mead(f, start, options);
    CHECK(result.argmin[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(result.argmin[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("never returns a value worse than the start") {
    synth::Rng rng(9);
    auto f = [](std::span<const double> v) {
        return std::sin(3.0 * v[0]) + v[0] * v[0] * 0.1 + std::cos(2.0 * v[1]);
    };
    for (int trial = 0; trial < 10; ++trial) {
        double start[] = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        stats::NelderMeadOptions options;
        options.max_iterations = 50;
        auto result = stats::nelder_mead(f, start, options);
        CHECK(result.value <= f(start) + 1e-15);
    }
}

}  // nelder_mead suite

TEST_SUITE("linear_algebra") {

TEST_CASE("power iteration recovers known spectra") {
    Matrix k2(2, 2);
    k2(0, 1) = k2(1, 0) = 1.0;
    CHECK(stats::power_iteration(k2).eigenvalue == doctest::Approx(1.0).epsilon(1e-9));

    // star with 4 leaves: dominant eigenvalue sqrt(4)
    Matrix star(5, 5);
    for (std::size_t leaf = 1; leaf < 5; ++leaf) star(0, leaf) = star(leaf, 0) = 1.0;
    CHECK(stats::power_iteration(star).eigenvalue == doctest::Approx(2.0).epsilon(1e-9));

    Matrix p3(3, 3);
    p3(0, 1) = p3(1, 0) = p3(1, 2) = p3(2, 1) = 1.0;
    CHECK(stats::power_iteration(p3).eigenvalue ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("power iteration matches Jacobi on random symmetric matrices") {
    synth::Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 6;
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double v = rng.uniform() < 0.5 ? 1.0 : 0.0;
                m(i, j) = m(j, i) = v;
            }
        }
        double via_power = stats::power_iteration(m).eigenvalue;
        double via_jacobi = reference::largest_eigenvalue_jacobi(m);
        CHECK(via_power == doctest::Approx(via_jacobi).epsilon(1e-8));
    }
}

TEST_CASE("eigenvector satisfies the residual bound") {
    Matrix star(5, 5);
    for (std::size_t leaf = 1; leaf < 5; ++leaf) star(0, leaf) = star(leaf, 0) = 1.0;
    auto result = stats::power_iteration(star, 1e-10);
    const auto& v = result.eigenvector;
    REQUIRE(v.size() == 5);
    double residual = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        double av = 0.0;
        for (std::size_t j = 0; j < 5; ++j) av += star(i, j) * v[j];
        residual += (av - result.eigenvalue * v[i]) * (av - result.eigenvalue * v[i]);
    }
    CHECK(std::sqrt(residual) < 1e-9);
}

TEST_CASE("dense solve handles a pinned system and rejects singular ones") {
    Matrix a(3, 3);
    a(0, 0) = 2.0; a(0, 1) = 1.0; a(0, 2) = 0.0;
    a(1, 0) = 1.0; a(1, 1) = 3.0; a(1, 2) = 1.0;
    a(2, 0) = 0.0; a(2, 1) = 1.0; a(2, 2) = 2.0;
    std::vector<double> b = {4.0, 8.0, 4.0};
    auto x = stats::solve_dense(a, b);
    // exact solution of the tridiagonal system is (1, 2, 1)
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(x[2] == doctest::Approx(1.0).epsilon(1e-12));

    Matrix s(2, 2);
    s(0, 0) = 1.0; s(0, 1) = 2.0;
    s(1, 0) = 2.0; s(1, 1) = 4.0;
    CHECK_THROWS_AS(stats::solve_dense(s, {1.0, 2.0}), SingularMatrixError);
}

}  // linear_algebra suite
