#pragma once

#include <string>
#include <vector>

#include "effdyn/grid.hpp"
#include "effdyn/potential.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

/// Parameters of the anisotropic 2D double well used for CV scans.
struct DoubleWellSetup {
  Potential potential = Potential::double_well_2d(1.0, 2.0);
  double beta = 2.0;
  double dt = 0.02;
  Grid grid = Grid::rect({-2.2, 2.2, 40}, {-2.0, 2.0, 36});
};

DoubleWellSetup double_well_setup();

/// Built-in models: "2st", "bd3", "bd4", "dup4", "cycle3", "cycle3-biased",
/// "double-well-2d". Unknown names throw ConfigError.
TransitionModel fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace effdyn
