#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lifecast/hawkes.hpp"
#include "lifecast/metrics.hpp"
#include "lifecast/stats.hpp"
#include "lifecast/types.hpp"

// Serial reference implementations, written along independent routes from
// the optimized library. Tests and benchmarks link them; the pipeline never
// does. Where a test demands bitwise equality (intensity sums, binning) the
// inner arithmetic deliberately mirrors the optimized statement shapes; the
// selection logic stays brute force.
namespace lifecast::reference {

/// O(n^2) intensity: every prior event checked against the window predicate
/// directly, no bisection.
hawkes::HawkesCurve intensity_quadratic(const Cascade& cascade, const HistoryGraph& history,
                                        const hawkes::ReactionKernel& kernel, double p = 1.0,
                                        double alpha = 5.0);

/// Interval sums computed one bin at a time by rescanning all events.
hawkes::IntervalCurve bin_sums_by_scan(const hawkes::HawkesCurve& curve, double span,
                                       double alpha = 5.0);

std::vector<double> degree_by_edge_count(const metrics::WindowGraph& g);
std::vector<double> entropy_direct(const metrics::WindowGraph& g);
std::vector<double> clustering_triples(const metrics::WindowGraph& g);

/// PageRank as the closed-form solution of the linear system, dense solve.
std::vector<double> pagerank_dense(const metrics::WindowGraph& g, double damping = 0.85);

/// Betweenness from pairwise path counts sigma_sv * sigma_vt / sigma_st.
std::vector<double> betweenness_path_counts(const metrics::WindowGraph& g);

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations
/// (full spectrum, no iteration on a single vector).
double largest_eigenvalue_jacobi(const stats::Matrix& sym);

/// Alpha centrality through an explicitly inverted system matrix.
std::vector<double> alpha_centrality_inverse(const metrics::WindowGraph& g,
                                             double fraction = 0.5);

/// Least squares through the normal equations (numerically inferior on
/// purpose; agreement bounds the Householder path on benign designs).
std::vector<double> ols_normal_equations(const stats::Matrix& design,
                                         std::span<const double> target);

/// Upper tail P(F > x) by adaptive Simpson quadrature of the beta integrand
/// after the substitution that removes the t=0 endpoint singularity.
double f_upper_tail_quadrature(double x, double d1, double d2);

}  // namespace lifecast::reference
