#include "effdyn/estimators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "effdyn/error.hpp"

namespace effdyn {

namespace {

// P(lo <= N(mean, sd^2) <= hi)
double gaussian_box_mass(double mean, double sd, double lo, double hi) {
  const double a = (lo - mean) / (sd * std::numbers::sqrt2);
  const double b = (hi - mean) / (sd * std::numbers::sqrt2);
  return 0.5 * (std::erfc(a) - std::erfc(b));
}

}  // namespace

TransitionModel build_analytic_em(const Potential& pot, double beta, double dt, const Grid& grid) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (pot.dim() != grid.dim()) throw ConfigError("potential and grid dimensions differ");

  const std::size_t n = grid.size();
  const std::size_t d = grid.dim();
  Matrix centers(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < n; ++c) {
    const auto x = grid.center(c);
    for (std::size_t k = 0; k < d; ++k) centers(c, k) = x[k];
  }

  const double sd = std::sqrt(2.0 * dt / beta);
  Matrix P(n, n);
  std::vector<double> x(d), grad(d), mean(d);
  Vector sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) x[k] = centers(i, k);
    pot.gradient(x, grad);
    double inside = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      mean[k] = x[k] - grad[k] * dt;
      inside *= gaussian_box_mass(mean[k], sd, grid.axis(k).lo, grid.axis(k).hi);
    }
    if (1.0 - inside > 0.1) {
      std::ostringstream msg;
      msg << "kernel row " << i << " loses " << (1.0 - inside) * 100.0
          << "% of its mass outside the grid";
      throw TruncationError(i, msg.str());
    }
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = centers(j, k) - mean[k];
        r2 += diff * diff;
      }
      sq(j) = r2;
    }
    // Shift by the closest center so the largest weight is exp(0) = 1.
    const double shift = sq.minCoeff();
    for (std::size_t j = 0; j < n; ++j) P(i, j) = std::exp(-(sq(j) - shift) / (2.0 * sd * sd));
    P.row(i) /= P.row(i).sum();
  }

  std::vector<std::size_t> cells(n);
  for (std::size_t c = 0; c < n; ++c) cells[c] = c;
  return TransitionModel::from_matrix(std::move(P), dt, ModelSource::Analytic,
                                      StateMap{std::move(cells), grid});
}

std::vector<std::size_t> discretize(const Trajectory& traj, const Grid& grid) {
  if (traj.dim != grid.dim()) throw InputError("trajectory and grid dimensions differ");
  std::vector<std::size_t> out(traj.length());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = grid.locate(traj.position(i)).value_or(kOutsideGrid);
  }
  return out;
}

Matrix count_transitions(std::span<const std::vector<std::size_t>> chains, std::size_t n_states) {
  Matrix C = Matrix::Zero(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_states));
  for (const auto& chain : chains) {
    for (std::size_t t = 0; t + 1 < chain.size(); ++t) {
      const std::size_t a = chain[t], b = chain[t + 1];
      if (a == kOutsideGrid || b == kOutsideGrid) continue;
      if (a >= n_states || b >= n_states) throw InputError("chain state index out of range");
      C(a, b) += 1.0;
    }
  }
  return C;
}

TransitionModel build_counts_from_states(std::span<const std::vector<std::size_t>> chains,
                                         std::size_t n_states, bool reversible, double lag,
                                         const Grid* grid) {
  const Matrix full = count_transitions(chains, n_states);
  if (full.sum() < 1.0) throw InputError("chain has no transitions inside the state space");

  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < n_states; ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    if (full.row(i).sum() > 0.0 || full.col(i).sum() > 0.0) kept.push_back(s);
  }
  const auto m = static_cast<Eigen::Index>(kept.size());
  Matrix C(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) C(a, b) = full(kept[a], kept[b]);
  }
  if (reversible) C = 0.5 * (C + C.transpose()).eval();

  const Vector rows = C.rowwise().sum();
  for (Eigen::Index a = 0; a < m; ++a) {
    if (!(rows(a) > 0.0)) {
      throw DisconnectedStateError("state " + std::to_string(kept[a]) +
                                   " was visited but has no outgoing transitions");
    }
  }
  Matrix P = rows.cwiseInverse().asDiagonal() * C;

  std::optional<StateMap> states;
  if (grid != nullptr) {
    states = StateMap{kept, *grid};
  } else if (kept.size() != n_states) {
    states = StateMap{kept, std::nullopt};
  }

  TransitionModel model =
      reversible ? TransitionModel::from_matrix_and_mu(std::move(P), rows / rows.sum(), lag,
                                                       ModelSource::Counts, std::move(states))
                 : TransitionModel::from_matrix(std::move(P), lag, ModelSource::Counts,
                                                std::move(states));
  return model.with_counts(std::move(C));
}

TransitionModel build_counts(const Trajectory& traj, const Grid& grid, bool reversible) {
  return build_counts(std::span<const Trajectory>(&traj, 1), grid, reversible);
}

TransitionModel build_counts(std::span<const Trajectory> trajs, const Grid& grid, bool reversible) {
  std::vector<std::vector<std::size_t>> chains;
  chains.reserve(trajs.size());
  double lag = 0.0;
  for (const auto& t : trajs) {
    chains.push_back(discretize(t, grid));
    lag = t.dt * static_cast<double>(t.lag);
  }
  return build_counts_from_states(chains, grid.size(), reversible, lag > 0.0 ? lag : 1.0, &grid);
}

}  // namespace effdyn
