#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lifecast/errors.hpp"

namespace lifecast::stats {

/// Dense row-major matrix, just large enough for the regressions and
/// small eigenproblems this project runs (tens of columns, hundreds of rows).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Exact-order compensated sum (Neumaier). Used wherever two code paths
/// must produce bitwise-comparable totals of the same value sequence.
double compensated_sum(std::span<const double> values);

struct LeastSquaresFit {
    std::vector<double> coefficients;
    double rss = 0.0;                       // residual sum of squares
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
    std::vector<double> cov_unscaled_diag;  // diag of (X^T X)^-1
};

/// Ordinary least squares through Householder orthogonalization.
/// Never forms the normal equations. Throws CollinearityError on a
/// rank-deficient design.
LeastSquaresFit ols(const Matrix& design, std::span<const double> target);

/// Log of the gamma function, Lanczos approximation (g = 7, 9 terms).
double log_gamma(double x);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
/// with the usual symmetry switch; at most 200 terms.
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail P(F > x) of the F distribution with (d1, d2) degrees of
/// freedom. Returns 1 for x <= 0.
double f_sf(double x, double d1, double d2);

struct NelderMeadOptions {
    double tolerance = 1e-8;  // convergence when the simplex value spread drops below this
    int max_iterations = 500;
    std::vector<double> steps;  // initial simplex displacements; empty = automatic
};

struct NelderMeadResult {
    std::vector<double> argmin;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex minimization with coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
/// The returned value is never worse than f(start).
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> start,
                             const NelderMeadOptions& options = {});

struct PowerIterationResult {
    double eigenvalue = 0.0;
    std::vector<double> eigenvector;
    int iterations = 0;
};

/// Dominant (largest) eigenvalue of a symmetric nonnegative matrix.
/// Internally iterates on A + I so that bipartite-like +/- eigenvalue
/// pairs cannot stall the iteration. At return the pair satisfies
/// ||A v - lambda v|| < tol for the unit eigenvector v.
/// Throws ConvergenceError (carrying the last Rayleigh quotient) when the
/// residual does not drop below tol within max_iterations.
PowerIterationResult power_iteration(const Matrix& sym, double tol = 1e-10,
                                     int max_iterations = 20000);

/// Solves A x = b by LU with partial pivoting. Throws SingularMatrixError.
std::vector<double> solve_dense(Matrix a, std::vector<double> b);

}  // namespace lifecast::stats
