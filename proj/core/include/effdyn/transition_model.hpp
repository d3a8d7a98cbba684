#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effdyn/grid.hpp"
#include "effdyn/types.hpp"

namespace effdyn {

enum class ModelSource { Analytic, Counts, Fixture, Effective, Derived };

std::string to_string(ModelSource source);
ModelSource model_source_from_string(const std::string& name);

/// Optional link from model states back to original labels. Count-estimated
/// models prune never-visited states, so labels[i] is the original index (the
/// grid cell, when a grid is attached) of state i.
struct StateMap {
  std::vector<std::size_t> labels;
  std::optional<Grid> grid;
};

namespace tolerance {
inline constexpr double kRowSum = 1e-12;
inline constexpr double kMuSum = 1e-12;
inline constexpr double kStationarity = 1e-10;
}  // namespace tolerance

/// Row-stochastic transition matrix with its (strictly positive) stationary
/// distribution. Immutable once constructed; every constructor validates.
class TransitionModel {
 public:
  /// Computes mu from P.
  static TransitionModel from_matrix(Matrix P, double lag = 1.0,
                                     ModelSource source = ModelSource::Derived,
                                     std::optional<StateMap> states = std::nullopt);
  /// Uses the supplied mu and checks stationarity.
  static TransitionModel from_matrix_and_mu(Matrix P, Vector mu, double lag = 1.0,
                                            ModelSource source = ModelSource::Derived,
                                            std::optional<StateMap> states = std::nullopt);

  const Matrix& P() const noexcept { return P_; }
  const Vector& mu() const noexcept { return mu_; }
  double lag() const noexcept { return lag_; }
  ModelSource source() const noexcept { return source_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(P_.rows()); }
  const std::optional<StateMap>& states() const noexcept { return states_; }

  /// Transition counts behind a Counts model (after any symmetrization).
  const std::optional<Matrix>& counts() const noexcept { return counts_; }
  TransitionModel with_counts(Matrix counts) const;

 private:
  TransitionModel() = default;
  void validate() const;

  Matrix P_;
  Vector mu_;
  double lag_ = 1.0;
  ModelSource source_ = ModelSource::Derived;
  std::optional<StateMap> states_;
  std::optional<Matrix> counts_;
};

/// Stationary distribution of an irreducible stochastic matrix. Uses the
/// subtraction-free Grassmann-Taksar-Heyman elimination for n <= 5000
/// (entrywise positive, high relative accuracy) and power iteration above.
/// Throws DisconnectedStateError when the chain is reducible.
Vector stationary_distribution(const Matrix& P);

/// P*(x, y) = P(y, x) mu(y) / mu(x).
Matrix adjoint(const TransitionModel& model);
TransitionModel adjoint_model(const TransitionModel& model);

struct Decomposition {
  Matrix reversible;      // (P + P*) / 2
  Matrix nonreversible;   // (P - P*) / 2
};
Decomposition decompose(const TransitionModel& model);
TransitionModel reversible_part(const TransitionModel& model);

/// max_{i,j} |mu_i P_ij - mu_j P_ji|.
double detailed_balance_residual(const TransitionModel& model);
bool is_reversible(const TransitionModel& model, double tol = 1e-8);

/// D^{1/2} M D^{-1/2} with D = diag(mu), symmetrized.
Matrix symmetrize(const Matrix& M, const Vector& mu);

struct NonnegativityResult {
  bool nonnegative = false;   // smallest eigenvalue >= -1e-10
  double min_eigenvalue = 0.0;
  bool within_spectral_bound = false;  // smallest eigenvalue > -1
};
NonnegativityResult nonnegativity_check(const TransitionModel& model);

/// Samples a discrete chain of n_steps transitions starting at `start`.
std::vector<std::size_t> simulate_chain(const TransitionModel& model, std::size_t start,
                                        std::size_t n_steps, std::uint64_t seed);

}  // namespace effdyn
