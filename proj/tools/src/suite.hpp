#pragma once

#include "effdyn/cli/config.hpp"
#include "effdyn/cli/runner.hpp"
#include "effdyn/spectral.hpp"

namespace effdyn::cli {

/// Largest mu-weighted norm of P phi_i - lambda_i phi_i over the returned pairs.
double eigen_residual(const TransitionModel& model, const SpectralResult& spec);

/// Structural and identity checks on the configured model.
Artifacts invariant_suite(const TransitionModel& model, const RunConfig& config, const Seeds& seeds);

/// Hand-derived values on the built-in fixtures.
Artifacts fixture_suite();

}  // namespace effdyn::cli
