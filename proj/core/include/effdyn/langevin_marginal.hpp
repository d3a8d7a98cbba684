#pragma once

#include <cstddef>
#include <optional>

#include <nlohmann/json.hpp>

#include "effdyn/grid.hpp"
#include "effdyn/potential.hpp"
#include "effdyn/simulate.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

/// Simulates `replicas` Langevin trajectories (seeds cfg.seed + r), keeps every
/// `lag`-th position and estimates a count model without symmetrization.
TransitionModel marginal_model(const Potential& pot, const SimConfig& cfg, std::size_t lag,
                               const Grid& grid, std::size_t replicas = 1,
                               std::optional<std::size_t> threads = std::nullopt,
                               bool reversible = false);

/// Cell-averaged Gibbs weights exp(-beta V) (5-point Gauss-Legendre per axis)
/// on the model's retained cells, normalized to sum 1.
Vector gibbs_reference(const Potential& pot, double beta, const TransitionModel& model);

struct DetailedBalanceReport {
  double residual = 0.0;   // max |pi_x P(x,y) - pi_y P(y,x)|
  double std_error = 0.0;  // count-noise standard error at the worst pair
  std::size_t n_samples = 0;
  bool pass = false;
};

/// Verdict: residual < 5 * stderr + abs_tol. The standard error of each pair
/// propagates binomial noise of the row counts, pi_x sqrt(P(1-P)/C_x); models
/// without counts have zero noise and are judged against abs_tol alone.
DetailedBalanceReport detailed_balance_report(const TransitionModel& model, const Vector& reference,
                                              double abs_tol = 1e-6);

nlohmann::json detailed_balance_json(const DetailedBalanceReport& report);

}  // namespace effdyn
