#include "effdyn/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "effdyn/error.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/io_util.hpp"
#include "effdyn/fixtures.hpp"
#include "effdyn/parallel.hpp"
#include "effdyn/simulate.hpp"

namespace effdyn::cli {
namespace {

using nlohmann::json;

// Typed access to one JSON object with key-path error messages.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "must be an object");
    for (const auto& [key, value] : j_.items()) {
      if (!key.empty() && key.front() == '_') continue;
      if (!allowed.count(key)) fail(key, "unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const {
    if (!has(key)) fail(key, "is required");
    return j_.at(key);
  }
  Section section(const std::string& key, std::set<std::string> allowed) const {
    return Section(raw(key), where(key), std::move(allowed));
  }

  template <class T>
  T get(const std::string& key) const {
    try {
      return raw(key).get<T>();
    } catch (const json::exception& e) {
      fail(key, std::string("has the wrong type (") + e.what() + ")");
    }
  }
  template <class T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const double v = fallback && !has(key) ? *fallback : get<double>(key);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be a positive finite number");
    return v;
  }
  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt,
                    std::size_t min = 1) const {
    const auto v = fallback && !has(key) ? *fallback : get<std::size_t>(key);
    if (v < min) fail(key, "must be at least " + std::to_string(min));
    return v;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto at = key.empty() ? (path_.empty() ? std::string("config") : path_) : where(key);
    throw ConfigError(at + ": " + what);
  }

 private:
  const json& j_;
  std::string path_;
};

SetPair parse_sets(const Section& s) {
  return {s.get<std::vector<std::size_t>>("A"), s.get<std::vector<std::size_t>>("B")};
}

Grid parse_grid(const Section& parent, const std::string& key) {
  const auto s = parent.section(key, {"axes"});
  const auto& axes = s.raw("axes");
  if (!axes.is_array() || axes.empty() || axes.size() > 2) s.fail("axes", "must list one or two axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const Section a(axes[i], s.where("axes[" + std::to_string(i) + "]"), {"lo", "hi", "cells"});
    if (!(a.get<double>("hi") > a.get<double>("lo"))) a.fail("hi", "must exceed lo");
    a.count("cells");
  }
  return Grid::from_json(parent.raw(key));
}

Potential parse_potential(const Section& s) {
  const auto kind = s.get<std::string>("potential");
  const auto params = s.get<std::vector<double>>("params", {});
  const auto dim = s.count("dim", 1);
  try {
    return Potential::from_name(kind, params, dim);
  } catch (const Error& e) {
    s.fail("potential", e.what());
  }
}

void check_matching_dim(const Section& s, const Potential& pot, const Grid& grid, const std::string& key) {
  if (pot.dim() != grid.dim()) s.fail(key, "dimension does not match the potential");
}

}  // namespace

CVAssignment CVSpec::build(const TransitionModel& model) const {
  if (kind == Kind::Bins) {
    if (bin_of.size() != model.size()) {
      throw ConfigError("cv.bins: expected " + std::to_string(model.size()) + " entries, got " +
                        std::to_string(bin_of.size()));
    }
    const std::size_t k = bin_of.empty() ? 0 : *std::max_element(bin_of.begin(), bin_of.end()) + 1;
    return CVAssignment(bin_of, k, {{"kind", "bins"}});
  }
  if (!model.states() || !model.states()->grid) throw ConfigError("cv: needs a grid-backed model");
  const auto& states = *model.states();
  if (kind == Kind::LinearAngle) {
    if (states.grid->dim() != 2) throw ConfigError("cv.linear_angle: needs a 2D grid");
    return CVAssignment::linear_angle(*states.grid, states.labels, theta, bins);
  }
  if (axis >= states.grid->dim()) throw ConfigError("cv.coordinate: axis out of range");
  return CVAssignment::coordinate(*states.grid, states.labels, axis, bins);
}

CVFamily FamilySpec::build(std::size_t dim) const {
  switch (kind) {
    case FamilyKind::LinearAngle2d:
      if (dim != 2) throw ConfigError("family: linear-angle needs a 2D grid");
      return CVFamily::linear_angle(count, bins);
    case FamilyKind::Coordinate:
      return CVFamily::coordinates(dim, bins);
    case FamilyKind::ExplicitList:
      break;
  }
  throw ConfigError("family: explicit lists are not configurable");
}

RunConfig parse_config(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const Section root(j, "",
                     {"seed", "system", "grid", "operator", "spectrum", "sets", "cv", "reduced_sets",
                      "objective", "family", "langevin", "counting"});
  RunConfig c;
  c.text = text;
  c.name = name;
  c.seed = root.get<std::uint64_t>("seed", 1);

  if (root.has("system")) {
    const auto sys = root.section("system", {"fixture", "matrix", "potential", "params", "dim", "beta"});
    const int sources = int(sys.has("fixture")) + int(sys.has("matrix")) + int(sys.has("potential"));
    if (sources != 1) sys.fail("", "needs exactly one of fixture, matrix, potential");
    if (sys.has("fixture")) {
      const auto fixture_name = sys.get<std::string>("fixture");
      const auto names = fixture_names();
      if (std::find(names.begin(), names.end(), fixture_name) == names.end()) {
        sys.fail("fixture", "unknown fixture '" + fixture_name + "'");
      }
      c.system.fixture = fixture_name;
    } else if (sys.has("matrix")) {
      const auto rows = sys.get<std::vector<std::vector<double>>>("matrix");
      if (rows.empty()) sys.fail("matrix", "must be nonempty");
      Matrix P(rows.size(), rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) sys.fail("matrix", "must be square");
        for (std::size_t k = 0; k < rows.size(); ++k) P(Eigen::Index(i), Eigen::Index(k)) = rows[i][k];
      }
      c.system.matrix = std::move(P);
    } else {
      c.system.potential = parse_potential(sys);
      c.system.beta = sys.positive("beta");
      if (!root.has("grid")) root.fail("grid", "is required for potential systems");
      c.grid = parse_grid(root, "grid");
      check_matching_dim(root, *c.system.potential, *c.grid, "grid");
      const auto op = root.section("operator", {"source", "dt", "n_steps", "lag", "replicas", "reversible"});
      c.op.source = op.get<std::string>("source", "analytic");
      if (c.op.source != "analytic" && c.op.source != "counts") op.fail("source", "must be analytic or counts");
      c.op.dt = op.positive("dt");
      if (c.op.source == "counts") {
        c.op.n_steps = op.count("n_steps");
        c.op.lag = op.count("lag", 1);
        c.op.replicas = op.count("replicas", 1);
        c.op.reversible = op.get<bool>("reversible", true);
      }
    }
  }
  if (!c.system.potential && root.has("grid")) root.fail("grid", "only applies to potential systems");
  if (!c.system.potential && root.has("operator")) root.fail("operator", "only applies to potential systems");

  if (root.has("spectrum")) c.spectrum_m = root.section("spectrum", {"m"}).count("m");
  if (root.has("sets")) c.sets = parse_sets(root.section("sets", {"A", "B"}));
  if (root.has("reduced_sets")) c.reduced_sets = parse_sets(root.section("reduced_sets", {"A", "B"}));

  if (root.has("cv")) {
    const auto s = root.section("cv", {"bins", "linear_angle", "coordinate"});
    CVSpec cv;
    if (s.has("linear_angle")) {
      cv.kind = CVSpec::Kind::LinearAngle;
      cv.theta = s.get<double>("linear_angle");
      cv.bins = s.count("bins", std::nullopt, 2);
    } else if (s.has("coordinate")) {
      cv.kind = CVSpec::Kind::Coordinate;
      cv.axis = s.get<std::size_t>("coordinate");
      cv.bins = s.count("bins", std::nullopt, 2);
    } else {
      cv.bin_of = s.get<std::vector<std::size_t>>("bins");
    }
    if (cv.kind != CVSpec::Kind::Bins && !c.grid) s.fail("", "grid-based CVs need a potential system");
    c.cv = std::move(cv);
  }

  if (root.has("objective")) {
    const auto s = root.section("objective", {"kind", "weights"});
    try {
      c.objective = scan_objective_from_string(s.get<std::string>("kind", "timescale"));
    } catch (const Error& e) {
      s.fail("kind", e.what());
    }
    c.weights = s.get<std::vector<double>>("weights", {1.0});
    try {
      ObjectiveWeights{c.weights};
    } catch (const Error& e) {
      s.fail("weights", e.what());
    }
  }

  if (root.has("family")) {
    const auto s = root.section("family", {"kind", "count", "bins", "rates"});
    FamilySpec f;
    try {
      f.kind = family_kind_from_string(s.get<std::string>("kind"));
    } catch (const Error& e) {
      s.fail("kind", e.what());
    }
    if (f.kind == FamilyKind::ExplicitList) s.fail("kind", "explicit-list is not configurable");
    if (f.kind == FamilyKind::LinearAngle2d) f.count = s.count("count");
    f.bins = s.count("bins", std::nullopt, 2);
    f.rates = s.get<bool>("rates", false);
    if (!c.grid) s.fail("", "needs a potential system with a grid");
    c.family = f;
  }

  if (root.has("langevin")) {
    const auto s = root.section("langevin", {"potential", "params", "dim", "beta", "dt", "gamma",
                                             "n_steps", "lag", "replicas", "grid"});
    LangevinSpec l;
    l.potential = parse_potential(s);
    l.beta = s.positive("beta");
    l.dt = s.positive("dt");
    l.gamma = s.positive("gamma", 1.0);
    l.n_steps = s.count("n_steps");
    l.lag = s.count("lag", 1);
    l.replicas = s.count("replicas", 1);
    l.grid = parse_grid(s, "grid");
    check_matching_dim(s, l.potential, l.grid, "grid");
    c.langevin = std::move(l);
  }

  if (root.has("counting")) c.counting_steps = root.section("counting", {"n_steps"}).count("n_steps");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw ConfigError("cannot read config '" + path.string() + "': " + e.what());
  }
  return parse_config(text, path.filename().string());
}

Seeds derive_seeds(std::uint64_t base) {
  // XOR with fixed constants gives each purpose its own stream.
  return {base, base ^ 0x9e3779b97f4a7c15ULL, base ^ 0xc2b2ae3d27d4eb4fULL, base ^ 0x165667b19e3779f9ULL};
}

TransitionModel build_model(const RunConfig& config, std::size_t threads) {
  const auto& sys = config.system;
  if (!sys.fixture && !sys.matrix && !sys.potential) throw ConfigError("system: required by this subcommand");
  if (sys.fixture) return fixture(*sys.fixture);
  if (sys.matrix) {
    try {
      return TransitionModel::from_matrix(*sys.matrix, 1.0, ModelSource::Derived);
    } catch (const DisconnectedStateError& e) {
      throw ConfigError(std::string("system.matrix: ") + e.what());
    }
  }
  const auto& pot = *sys.potential;
  const auto& grid = *config.grid;
  if (config.op.source == "analytic") return build_analytic_em(pot, sys.beta, config.op.dt, grid);

  const auto seeds = derive_seeds(config.seed);
  std::vector<Trajectory> trajs(config.op.replicas);
  parallel_for(trajs.size(), threads, [&](std::size_t r) {
    SimConfig sim;
    sim.beta = sys.beta;
    sim.dt = config.op.dt;
    sim.seed = seeds.operator_sim + r;
    sim.n_steps = config.op.n_steps;
    sim.guard_radius = grid.guard_radius();
    trajs[r] = subsample(simulate_em(pot, sim), config.op.lag);
  });
  return build_counts(trajs, grid, config.op.reversible);
}

}  // namespace effdyn::cli
