#include "effdyn/simulate.hpp"

#include <cmath>
#include <string>

#include "effdyn/error.hpp"
#include "effdyn/rng.hpp"

namespace effdyn {

void SimConfig::validate(std::size_t dim, bool langevin) const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (langevin && (!(gamma > 0.0) || !std::isfinite(gamma))) {
    throw ConfigError("gamma must be positive for Langevin dynamics");
  }
  if (n_steps < 1) throw ConfigError("n_steps must be at least 1");
  if (!x0.empty() && x0.size() != dim) throw ConfigError("x0 has the wrong dimension");
  if (!v0.empty() && v0.size() != dim) throw ConfigError("v0 has the wrong dimension");
  for (double v : x0) {
    if (!std::isfinite(v)) throw ConfigError("x0 must be finite");
  }
  for (double v : v0) {
    if (!std::isfinite(v)) throw ConfigError("v0 must be finite");
  }
}

namespace {

void guard(std::span<const double> x, double radius, std::size_t step) {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  if (!std::isfinite(r2) || std::sqrt(r2) > radius) {
    throw SimulationBlowup(step, "simulation left the domain guard at step " + std::to_string(step));
  }
}

Trajectory start(const Potential& pot, const SimConfig& cfg, bool langevin) {
  const std::size_t d = pot.dim();
  Trajectory traj;
  traj.dim = d;
  traj.dt = cfg.dt;
  traj.positions.assign((cfg.n_steps + 1) * d, 0.0);
  if (!cfg.x0.empty()) std::copy(cfg.x0.begin(), cfg.x0.end(), traj.positions.begin());
  if (langevin) {
    traj.velocities.assign((cfg.n_steps + 1) * d, 0.0);
    if (!cfg.v0.empty()) std::copy(cfg.v0.begin(), cfg.v0.end(), traj.velocities.begin());
  }
  return traj;
}

}  // namespace

Trajectory simulate_em(const Potential& pot, const SimConfig& cfg) {
  const std::size_t d = pot.dim();
  cfg.validate(d, false);
  Trajectory traj = start(pot, cfg, false);
  Philox4x32 rng(cfg.seed);
  const double noise = std::sqrt(2.0 * cfg.dt / cfg.beta) * (cfg.flip_noise ? -1.0 : 1.0);
  std::vector<double> grad(d);

  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    const double* x = traj.positions.data() + n * d;
    double* next = traj.positions.data() + (n + 1) * d;
    pot.gradient({x, d}, grad);
    for (std::size_t i = 0; i < d; ++i) {
      next[i] = x[i] - grad[i] * cfg.dt + noise * rng.gaussian();
    }
    guard({next, d}, cfg.guard_radius, n + 1);
  }
  return traj;
}

Trajectory simulate_langevin(const Potential& pot, const SimConfig& cfg) {
  const std::size_t d = pot.dim();
  cfg.validate(d, true);
  Trajectory traj = start(pot, cfg, true);
  Philox4x32 rng(cfg.seed);
  const double noise =
      std::sqrt(2.0 * cfg.gamma * cfg.dt / cfg.beta) * (cfg.flip_noise ? -1.0 : 1.0);
  std::vector<double> grad(d);

  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    const double* x = traj.positions.data() + n * d;
    const double* v = traj.velocities.data() + n * d;
    double* x_next = traj.positions.data() + (n + 1) * d;
    double* v_next = traj.velocities.data() + (n + 1) * d;
    pot.gradient({x, d}, grad);
    for (std::size_t i = 0; i < d; ++i) {
      x_next[i] = x[i] + v[i] * cfg.dt;
      v_next[i] = v[i] - grad[i] * cfg.dt - cfg.gamma * v[i] * cfg.dt + noise * rng.gaussian();
    }
    guard({x_next, d}, cfg.guard_radius, n + 1);
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(v_next[i])) {
        throw SimulationBlowup(n + 1, "velocity diverged at step " + std::to_string(n + 1));
      }
    }
  }
  return traj;
}

Trajectory subsample(const Trajectory& traj, std::size_t lag) {
  if (lag < 1) throw InputError("subsample: lag must be at least 1");
  const std::size_t len = traj.length();
  if (lag >= len) {
    throw EmptyOutputError("subsample: lag " + std::to_string(lag) +
                           " leaves no transitions in a trajectory of length " +
                           std::to_string(len));
  }
  Trajectory out;
  out.dim = traj.dim;
  out.dt = traj.dt;
  out.lag = traj.lag * lag;
  const std::size_t kept = (len - 1) / lag + 1;
  out.positions.reserve(kept * traj.dim);
  if (traj.has_velocities()) out.velocities.reserve(kept * traj.dim);
  for (std::size_t i = 0; i < len; i += lag) {
    auto x = traj.position(i);
    out.positions.insert(out.positions.end(), x.begin(), x.end());
    if (traj.has_velocities()) {
      auto v = traj.velocity(i);
      out.velocities.insert(out.velocities.end(), v.begin(), v.end());
    }
  }
  return out;
}

}  // namespace effdyn
