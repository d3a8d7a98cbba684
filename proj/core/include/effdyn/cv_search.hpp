#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "effdyn/cv.hpp"
#include "effdyn/spectral.hpp"
#include "effdyn/tpt.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

enum class FamilyKind { LinearAngle2d, Coordinate, ExplicitList };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// Parametric CV family. For linear-angle the parameters are angles, for
/// coordinate they are axis indices, for explicit-list they index `list`.
struct CVFamily {
  FamilyKind kind = FamilyKind::LinearAngle2d;
  std::vector<double> params;
  std::size_t bins = 2;
  std::vector<CVAssignment> list;

  /// Angles j*pi/count for j = 0..count-1.
  static CVFamily linear_angle(std::size_t count, std::size_t bins);
  static CVFamily coordinates(std::size_t dim, std::size_t bins);
  static CVFamily explicit_list(std::vector<CVAssignment> cvs);

  std::size_t size() const noexcept { return params.size(); }
  /// Builds the CV for parameter `index` on the model's state map.
  CVAssignment assignment(std::size_t index, const TransitionModel& model) const;
};

/// The model itself when reversible, else its reversible part (same mu).
TransitionModel reversible_view(const TransitionModel& model);

struct TimescaleObjective {
  double value = 0.0;
  Vector lambda_eff;            // lambda~_1..m, missing entries set to 0
  std::size_t missing = 0;      // how many of the m were missing (k - 1 < m)
  bool used_reversible_part = false;
  std::optional<double> variational;  // sum w_i E(lift phi~_i) + missing weight
};

/// sum_i w_i (1 - lambda~_i) over the effective spectrum, m = weights.size().
/// With `verify`, recomputes the value from lifted effective eigenvectors and
/// throws InvariantFailure if the two disagree by more than 1e-10.
TimescaleObjective timescale_objective(const TransitionModel& model, const CVAssignment& cv,
                                       const ObjectiveWeights& weights, bool verify = false);

struct EigenRow {
  std::size_t index = 0;
  double lambda = 0.0;
  double lambda_eff = 0.0;
  bool missing = false;  // lambda_eff defaulted to 0
  double gap = 0.0;      // lambda - lambda_eff
};

struct EigenComparison {
  std::vector<EigenRow> rows;  // i = 1..m
  /// residual(i, j) for full index i = 0..m and effective index j = 0..min(m, k-1).
  Matrix residual;
  double max_residual = 0.0;
  bool ordered = true;  // lambda_eff_i <= lambda_i + 1e-10 for all non-missing rows
  bool used_reversible_part = false;
};

EigenComparison eigen_comparison(const TransitionModel& model, const CVAssignment& cv, std::size_t m);

struct RateComparison {
  double k_full = 0.0;
  double k_eff = 0.0;       // effective Dirichlet energy of q~
  double k_eff_flux = 0.0;  // effective flux out of A~
  double gap = 0.0;         // E(q - lift q~)
  double identity_residual = 0.0;
  Vector q;
  Vector q_eff;
  bool used_reversible_part = false;
};

/// Full and effective rates for A = xi^{-1}(A~), B = xi^{-1}(B~). Throws
/// InvariantFailure when k~ = k + gap fails by more than 1e-10.
RateComparison rate_comparison(const TransitionModel& model, const CVAssignment& cv,
                               const SetPair& reduced_sets);

enum class ScanObjective { Timescale, KL };

std::string to_string(ScanObjective objective);
ScanObjective scan_objective_from_string(const std::string& name);

struct ScanConfig {
  ScanObjective objective = ScanObjective::Timescale;
  ObjectiveWeights weights = ObjectiveWeights::uniform(1);
  /// Adds rate columns with A~ = {0} and B~ = {k-1} when k >= 3.
  bool rates = false;
  std::optional<std::size_t> threads;
};

struct ScanPoint {
  double param = 0.0;
  double objective = 0.0;
  std::size_t k = 0;
  Vector lambda_eff;
  std::size_t missing = 0;
  std::optional<double> k_full;
  std::optional<double> k_eff;
  std::optional<double> gap;
};

struct ScanResult {
  ScanObjective objective = ScanObjective::Timescale;
  std::size_t m = 0;
  std::vector<ScanPoint> points;
  std::size_t argmin = 0;
};

/// Evaluates every family member; the argmin breaks ties (objectives equal to
/// 1e-12 relative) toward the smallest parameter. Throws DegenerateFamilyError if no member has 2 bins.
ScanResult scan(const TransitionModel& model, const CVFamily& family, const ScanConfig& config);

std::string scan_csv(const ScanResult& result);
nlohmann::json scan_json(const ScanResult& result);
std::string eigen_comparison_csv(const EigenComparison& report);
nlohmann::json eigen_comparison_json(const EigenComparison& report);
nlohmann::json rate_comparison_json(const RateComparison& report);

}  // namespace effdyn
