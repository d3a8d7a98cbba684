#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "effdyn/grid.hpp"
#include "effdyn/simulate.hpp"
#include "effdyn/statistics.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

/// Leading eigenpairs of a reversible transfer operator, eigenvalues in
/// descending order, eigenvectors mu-orthonormal. phi_0 is the constant 1.
/// Within a degenerate eigenspace the basis is arbitrary.
struct SpectralResult {
  Vector eigenvalues;
  Matrix eigenvectors;  // column i is phi_i
  Vector mu;
};

/// Positive, non-increasing weights omega_1 >= ... >= omega_m > 0.
class ObjectiveWeights {
 public:
  explicit ObjectiveWeights(std::vector<double> values);
  static ObjectiveWeights uniform(std::size_t m);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_.at(i); }
  const std::vector<double>& values() const noexcept { return values_; }
  double sum() const noexcept;

 private:
  std::vector<double> values_;
};

/// Eigenpairs 0..m of the reversible model (m < n). Solves the symmetric
/// problem D^{1/2} P D^{-1/2} and maps back with D^{-1/2}; each phi_i has
/// its largest-magnitude entry positive. Throws ReversibilityRequired when
/// the detailed-balance residual is >= 1e-8.
SpectralResult solve_spectrum(const TransitionModel& model, std::size_t m);

double mu_inner(const Vector& mu, const Vector& f, const Vector& h);

/// E(f, h) = 1/2 sum_{x,y} mu_x P(x,y) (f_y - f_x)(h_y - h_x). Cross-checked
/// against <(I - T_rev) f, h>_mu; a mismatch above 1e-10 (relative to
/// |f|_inf |h|_inf) throws InvariantFailure.
double dirichlet_form(const TransitionModel& model, const Vector& f, const Vector& h);
double dirichlet_energy(const TransitionModel& model, const Vector& f);
/// <(I - T_rev) f, h>_mu, the operator route to the same quantity.
double dirichlet_form_operator(const TransitionModel& model, const Vector& f, const Vector& h);

/// Columns of fs must be mean-zero and mu-orthonormal within tol. Throws
/// ConstraintError listing every offending entry; never re-orthogonalizes.
void check_constraints(const TransitionModel& model, const Matrix& fs, double tol = 1e-6);

/// sum_i omega_i E(f_i), bounded below by sum_i omega_i (1 - lambda_i).
double variational_score(const TransitionModel& model, const Matrix& fs,
                         const ObjectiveWeights& weights);
/// sum_i omega_i <f_i, T f_i>_mu. For admissible fs,
/// vamp1_score + variational_score = sum_i omega_i.
double vamp1_score(const TransitionModel& model, const Matrix& fs,
                   const ObjectiveWeights& weights);

/// (2N)^{-1} sum_n |f(X_{n+1}) - f(X_n)|^2 over a chain of state indices,
/// with a 20-batch batch-means standard error.
Estimate ergodic_energy(std::span<const std::size_t> chain, const Vector& f);
/// Weighted vector-valued version: sum_i omega_i times the per-column estimate.
Estimate ergodic_energy(std::span<const std::size_t> chain, const Matrix& fs,
                        const ObjectiveWeights& weights);
/// Continuous trajectory: positions are binned on the grid, f is indexed by cell.
Estimate ergodic_energy(const Trajectory& traj, const Grid& grid, const Vector& f);

/// -lag / ln(lambda) for 0 < lambda < 1, otherwise nullopt.
std::optional<double> implied_timescale(double lambda, double lag);
std::vector<std::optional<double>> implied_timescales(const SpectralResult& result, double lag);

/// "index,eigenvalue,timescale" rows; undefined timescales are left empty.
std::string spectrum_csv(const SpectralResult& result, double lag);
nlohmann::json spectrum_json(const SpectralResult& result, double lag);

}  // namespace effdyn
