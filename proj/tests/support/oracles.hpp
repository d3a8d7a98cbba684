#pragma once

// Independent reference computations for the test suites. Each oracle uses a
// different algorithm than the library routine it checks (dense general
// eigensolves, plain linear solves, fixed-point iteration, direct sums over
// joint distributions).

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "effdyn/cv.hpp"
#include "effdyn/kl_objective.hpp"
#include "effdyn/tpt.hpp"
#include "effdyn/transition_model.hpp"

namespace oracle {

using effdyn::Matrix;
using effdyn::Vector;
using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);

/// Symmetric random weights with a guaranteed spanning path, normalized by row.
effdyn::TransitionModel random_reversible(Rng& rng, std::size_t n);
/// Strictly positive random matrix; almost surely not reversible.
effdyn::TransitionModel random_nonreversible(Rng& rng, std::size_t n);

/// Surjective assignment of n states onto k bins.
effdyn::CVAssignment random_cv(Rng& rng, std::size_t n, std::size_t k);
/// Disjoint nonempty A, B leaving at least one interior state.
effdyn::SetPair random_sets(Rng& rng, std::size_t n);

/// m mean-zero, mu-orthonormal columns from random vectors.
Matrix random_constrained_tuple(Rng& rng, const Vector& mu, std::size_t m);

/// Random strictly positive member of the factorized class.
effdyn::FactorizedDensity random_candidate(Rng& rng, const effdyn::CVAssignment& cv);

/// Stationary vector from a bordered linear system (P^T - I with sum row).
Vector stationary(const Matrix& P);
/// Eigenvalues of P from the general (non-symmetric) solver, descending.
Vector eigenvalues(const Matrix& P);
/// Committor by Gauss-Seidel sweeps until the update is below 1e-15.
Vector committor_iteration(const Matrix& P, const effdyn::SetPair& sets);
/// Half the edge sum of mu_x P(x,y) (f_y - f_x)^2, written out directly.
double energy(const Matrix& P, const Vector& mu, const Vector& f);
/// Mutual information of a joint distribution over (row, column).
double mutual_information(const Matrix& joint);
/// I(X0;X1) - I(Z0;Z1) from the joint and its pushforward.
double kl_score(const effdyn::TransitionModel& model, const effdyn::CVAssignment& cv);

/// Sample mean and standard error of i.i.d. values.
struct MeanSE {
  double mean;
  double se;
};
MeanSE mean_se(const std::vector<double>& values);

}  // namespace oracle
