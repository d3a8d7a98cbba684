#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "effdyn/cv.hpp"
#include "effdyn/statistics.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

/// Member of the factorized class g(x, y) = g~(xi(x), xi(y)) * g_{xi(y)}(y):
/// a row-stochastic k x k reduced kernel and one probability vector per fiber.
struct FactorizedDensity {
  Matrix reduced;
  std::vector<Vector> conditionals;  // conditionals[z][i] weights fiber(z)[i]

  /// Throws InputError unless shapes match the CV and every row/vector sums to 1.
  void validate(const CVAssignment& cv) const;
  double operator()(const CVAssignment& cv, std::size_t x, std::size_t y) const;
};

/// KL(p || q) in nats with 0 ln 0 = 0; +infinity when q = 0 < p.
double kl_divergence(const Vector& p, const Vector& q);

/// The minimizer over the factorized class: g~ = P~ and g_z = mu_z.
FactorizedDensity optimal_factorization(const TransitionModel& model, const CVAssignment& cv);

/// E_{x~mu} KL(P(x, .) || g_opt(x, .)). Roundoff below zero (> -1e-12) is
/// reported as 0; +infinity marks a failure of absolute continuity.
double kl_score(const TransitionModel& model, const CVAssignment& cv);

/// Mutual information between consecutive states, sum mu_x P(x,y) ln(P(x,y) / mu_y).
double mutual_information(const TransitionModel& model);

struct CandidateKL {
  double value = 0.0;             // E_mu KL(P || g)
  double optimum = 0.0;           // kl_score
  double reduced_term = 0.0;      // sum_z mu~(z) KL(P~(z,.) || g~(z,.))
  double conditional_term = 0.0;  // sum_z mu~(z) KL(mu_z || g_z)
};

/// Evaluates a candidate and checks value = optimum + reduced_term +
/// conditional_term within 1e-10 (InvariantFailure otherwise).
CandidateKL kl_of_candidate(const TransitionModel& model, const CVAssignment& cv,
                            const FactorizedDensity& candidate);

struct TrajectoryLosses {
  /// -(1/N) sum ln g(X_n, X_{n+1}) with histogram estimators for g~ and g_z.
  Estimate full;
  /// -(1/N) sum ln g~(Z_n, Z_{n+1}), g~ from smoothed reduced counts.
  Estimate reduced_transition;
  /// (1/N) sum ln f~(Z_n), f~ the empirical bin histogram (exact maximizer).
  Estimate marginal;

  double combined() const noexcept { return reduced_transition.value + marginal.value; }
};

/// Plug-in negative log-likelihood losses on a chain of state indices.
/// Transition and fiber counts use additive (Laplace) smoothing `alpha`.
TrajectoryLosses trajectory_losses(std::span<const std::size_t> chain, const CVAssignment& cv,
                                   double alpha = 1.0);

/// Empirical frequencies of bins 0..k-1 over bins[0..N-1] (the last entry is excluded).
Vector empirical_histogram(std::span<const std::size_t> bins, std::size_t k);
/// (1/N) sum_{n<N} ln histogram(bins[n]); -infinity when a visited bin has mass 0.
double mean_log_likelihood(std::span<const std::size_t> bins, const Vector& histogram);

}  // namespace effdyn
