#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "effdyn/cv.hpp"
#include "effdyn/cv_search.hpp"
#include "effdyn/grid.hpp"
#include "effdyn/potential.hpp"
#include "effdyn/tpt.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn::cli {

/// Where the transition model comes from. At most one of the three is set;
/// none means the config only drives langevin-check.
struct SystemSpec {
  std::optional<std::string> fixture;
  std::optional<Matrix> matrix;
  std::optional<Potential> potential;
  double beta = 1.0;
};

struct OperatorSpec {
  std::string source = "analytic";  // "analytic" or "counts"
  double dt = 0.01;
  std::size_t n_steps = 0;  // counts only
  std::size_t lag = 1;      // counts only, integrator steps per model step
  std::size_t replicas = 1;
  bool reversible = true;
};

struct CVSpec {
  enum class Kind { Bins, LinearAngle, Coordinate };
  Kind kind = Kind::Bins;
  std::vector<std::size_t> bin_of;
  double theta = 0.0;
  std::size_t axis = 0;
  std::size_t bins = 2;

  CVAssignment build(const TransitionModel& model) const;
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::LinearAngle2d;
  std::size_t count = 0;
  std::size_t bins = 2;
  bool rates = false;

  CVFamily build(std::size_t dim) const;
};

struct LangevinSpec {
  Potential potential = Potential::harmonic(1);
  double beta = 1.0;
  double dt = 0.005;
  double gamma = 1.0;
  std::size_t n_steps = 0;
  std::size_t lag = 1;
  std::size_t replicas = 1;
  Grid grid = Grid::line(-1.0, 1.0, 2);
};

/// Validated run configuration. Keys beginning with '_' are comments and
/// are ignored at every level; any other unknown key is an error.
struct RunConfig {
  std::string text;
  std::string name;  // file name, recorded in manifests
  std::uint64_t seed = 1;

  SystemSpec system;
  bool has_system() const { return system.fixture || system.matrix || system.potential; }
  std::optional<Grid> grid;
  OperatorSpec op;
  std::optional<std::size_t> spectrum_m;
  std::optional<SetPair> sets;
  std::optional<CVSpec> cv;
  std::optional<SetPair> reduced_sets;
  ScanObjective objective = ScanObjective::Timescale;
  std::vector<double> weights{1.0};
  std::optional<FamilySpec> family;
  std::optional<LangevinSpec> langevin;
  std::size_t counting_steps = 0;  // 0 disables the sampled checks
};

/// Throws ConfigError with the offending key path.
RunConfig parse_config(const std::string& text, const std::string& name = "config.json");
RunConfig load_config(const std::filesystem::path& path);

/// Per-purpose seeds derived from the base seed.
struct Seeds {
  std::uint64_t operator_sim;
  std::uint64_t chain;
  std::uint64_t langevin;
  std::uint64_t probes;
};
Seeds derive_seeds(std::uint64_t base);

/// Builds the configured transition model.
TransitionModel build_model(const RunConfig& config, std::size_t threads);

}  // namespace effdyn::cli
