#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "effdyn/statistics.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

/// Disjoint, nonempty reactant/product sets with a nonempty complement.
struct SetPair {
  std::vector<std::size_t> A;
  std::vector<std::size_t> B;

  /// Throws InputError unless the pair is valid on n states.
  /// Disjoint, nonempty and in range. The interior (A u B)^c must be
  /// nonempty unless `require_interior` is false.
  void validate(std::size_t n, bool require_interior = true) const;
  /// -1 for A, +1 for B, 0 for the interior.
  std::vector<int> labels(std::size_t n) const;
};

struct FluxRates {
  double via_A = 0.0;  // sum_{x in A} mu_x sum_y P(x,y) q(y)
  double via_B = 0.0;  // sum_{x in B} mu_x sum_y P(x,y) (1 - q(y))
};

struct CountedRate {
  double rate = 0.0;
  double std_error = 0.0;
  std::size_t segments = 0;
  bool visited_A = false;  // false is the zero-rate warning marker
};

struct EnergyDecomposition {
  double energy_f = 0.0;          // E(f)
  double rate = 0.0;              // k_AB = E(q)
  double energy_f_minus_q = 0.0;  // E(f - q)
};

struct TPTResult {
  Vector q;
  double k_flux_A = 0.0;
  double k_flux_B = 0.0;
  double k_energy = 0.0;
  std::optional<CountedRate> k_count;
};

/// Forward committor: q = 0 on A, q = 1 on B, (Pq)(x) = q(x) on the interior,
/// from the restricted system (I - P_II) q_I = P_IB 1 (dense LU). Throws
/// ConnectivityError when the interior cannot reach A or B.
Vector committor(const TransitionModel& model, const SetPair& sets);

FluxRates rate_flux(const TransitionModel& model, const SetPair& sets, const Vector& q);
/// k_AB = E(q).
double rate_energy(const TransitionModel& model, const Vector& q);

/// Number of reactive segments (last exit from A, then B before A) whose
/// starting step is < N, divided by N. A segment may finish after step N.
/// Batch-means standard error over 20 windows of the first N steps.
CountedRate rate_count(std::span<const std::size_t> chain, const SetPair& sets, std::size_t N);

/// E(f) = k_AB + E(f - q) for f with f|A = 0, f|B = 1 (reversible models).
/// Throws ConstraintError if f is not in that class within 1e-12 and
/// InvariantFailure if the identity is off by more than 1e-10.
EnergyDecomposition energy_decomposition(const TransitionModel& model, const SetPair& sets,
                                         const Vector& f);

/// Committor plus the three matrix rates; InvariantFailure if they disagree
/// by more than 1e-10.
TPTResult analyze_tpt(const TransitionModel& model, const SetPair& sets);

nlohmann::json tpt_json(const TPTResult& result);
/// "state,q" rows followed by nothing else; rates go to tpt_rates_csv.
std::string committor_csv(const TPTResult& result);
std::string tpt_rates_csv(const TPTResult& result);

}  // namespace effdyn
