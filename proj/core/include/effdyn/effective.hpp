#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "effdyn/cv.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

/// Effective dynamics of a model under a cell-partition CV:
///   mu~(z)      = sum_{x in fiber z} mu(x)
///   mu_z(x)     = mu(x) / mu~(z)                       (conditional measure)
///   P~(z, w)    = sum_{x in fiber z} mu_z(x) sum_{y in fiber w} P(x, y)
struct EffectiveModel {
  TransitionModel reduced;
  std::vector<Vector> conditionals;  // conditionals[z][i] = mu_z(fiber(z)[i])
  CVAssignment cv;
};

EffectiveModel build_effective(const TransitionModel& model, const CVAssignment& cv);

/// (lift f~)(x) = f~(xi(x)).
Vector lift(const CVAssignment& cv, const Vector& bin_function);
/// (project f)(z) = E_{mu_z} f.
Vector project(const EffectiveModel& eff, const Vector& state_function);

struct LiftResiduals {
  double transfer = 0.0;       // |P~ f~ - project(P lift f~)|_inf
  double inner_product = 0.0;  // |<P~ f~, h~>_mu~ - <P lift f~, lift h~>_mu|
  double energy = 0.0;         // |E~(f~) - E(lift f~)|
};
LiftResiduals lift_identity_check(const TransitionModel& model, const EffectiveModel& eff,
                                    const Vector& f_bins, const Vector& h_bins);

/// P~*(z, w) = P~(w, z) mu~(w) / mu~(z).
Matrix effective_adjoint(const TransitionModel& model, const CVAssignment& cv);
/// Max entrywise gap between effective_adjoint and the effective dynamics
/// of the adjoint process, build_effective(adjoint_model(model), cv).
double effective_adjoint_route_gap(const TransitionModel& model, const CVAssignment& cv);

/// Max entrywise gap (over P~ and mu~) between the effective dynamics for
/// coarse o fine and the effective dynamics of the fine effective model
/// under coarse.
double compose_check(const TransitionModel& model, const CVAssignment& fine,
                     const CVAssignment& coarse);

/// Largest |z-score| between empirical two-step bin transition frequencies
/// of a projected chain and the effective prediction (P~^2)(z, w), using a
/// binomial standard error. Large values witness a non-Markovian projection.
double two_step_markov_zscore(std::span<const std::size_t> bin_chain, const EffectiveModel& eff);

/// Projects a chain of states onto CV bins.
std::vector<std::size_t> project_chain(std::span<const std::size_t> chain, const CVAssignment& cv);

/// Reduced model header plus the CV and the conditional measures.
nlohmann::json effective_json(const EffectiveModel& eff);

}  // namespace effdyn
