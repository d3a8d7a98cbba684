#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "effdyn/grid.hpp"
#include "effdyn/potential.hpp"
#include "effdyn/simulate.hpp"
#include "effdyn/transition_model.hpp"

namespace effdyn {

inline constexpr std::size_t kOutsideGrid = std::numeric_limits<std::size_t>::max();

/// Discrete Euler-Maruyama kernel on the grid cell centers,
///   P(x, y) ~ exp(-beta |y - x + grad V(x) dt|^2 / (4 dt)),
/// each row renormalized over the grid (midpoint quadrature). Throws
/// TruncationError naming the row if more than 10% of the exact Gaussian
/// kernel mass falls outside the grid box.
TransitionModel build_analytic_em(const Potential& pot, double beta, double dt, const Grid& grid);

/// Grid cell of each trajectory row, kOutsideGrid for rows off the grid.
std::vector<std::size_t> discretize(const Trajectory& traj, const Grid& grid);

/// Transition counts between consecutive entries; pairs touching
/// kOutsideGrid are skipped.
Matrix count_transitions(std::span<const std::vector<std::size_t>> chains, std::size_t n_states);

/// Count-based estimator. Never-visited states are pruned; the returned
/// model's StateMap (when a grid is given) maps kept states to grid cells.
/// With `reversible`, C <- (C + C^T) / 2 before row normalization.
TransitionModel build_counts_from_states(std::span<const std::vector<std::size_t>> chains,
                                         std::size_t n_states, bool reversible, double lag = 1.0,
                                         const Grid* grid = nullptr);

TransitionModel build_counts(const Trajectory& traj, const Grid& grid, bool reversible);
TransitionModel build_counts(std::span<const Trajectory> trajs, const Grid& grid, bool reversible);

}  // namespace effdyn
