#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "effdyn/potential.hpp"

namespace effdyn {

struct SimConfig {
  double beta = 1.0;
  double dt = 1e-3;
  double gamma = 1.0;  // Langevin friction; ignored by simulate_em
  std::uint64_t seed = 0;
  std::size_t n_steps = 1;
  std::vector<double> x0;  // empty means the origin
  std::vector<double> v0;  // empty means zero velocity
  // Abort once |X_n| exceeds this radius; configs set it to 10x the grid extent.
  double guard_radius = std::numeric_limits<double>::infinity();
  // Negate every Gaussian increment (antithetic stream).
  bool flip_noise = false;

  void validate(std::size_t dim, bool langevin) const;
};

/// Positions (and optionally velocities) stored row-major, one row per saved step.
struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> positions;
  std::vector<double> velocities;  // empty unless produced by simulate_langevin
  double dt = 0.0;
  std::size_t lag = 1;  // integrator steps between consecutive saved rows

  std::size_t length() const noexcept { return dim == 0 ? 0 : positions.size() / dim; }
  std::size_t n_steps() const noexcept { return length() == 0 ? 0 : length() - 1; }
  bool has_velocities() const noexcept { return !velocities.empty(); }
  std::span<const double> position(std::size_t i) const {
    return {positions.data() + i * dim, dim};
  }
  std::span<const double> velocity(std::size_t i) const {
    return {velocities.data() + i * dim, dim};
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Overdamped Brownian dynamics, X' = X - grad V(X) dt + sqrt(2 dt / beta) W.
Trajectory simulate_em(const Potential& pot, const SimConfig& cfg);

/// Underdamped Langevin dynamics, Euler-Maruyama on the (x, v) pair:
///   x' = x + v dt
///   v' = v - grad V(x) dt - gamma v dt + sqrt(2 gamma dt / beta) W
Trajectory simulate_langevin(const Potential& pot, const SimConfig& cfg);

/// Keeps rows 0, lag, 2 lag, ...
Trajectory subsample(const Trajectory& traj, std::size_t lag);

}  // namespace effdyn
