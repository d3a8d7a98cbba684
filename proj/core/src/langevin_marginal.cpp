#include "effdyn/langevin_marginal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "effdyn/error.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/parallel.hpp"

namespace effdyn {

TransitionModel marginal_model(const Potential& pot, const SimConfig& cfg, std::size_t lag,
                               const Grid& grid, std::size_t replicas,
                               std::optional<std::size_t> threads, bool reversible) {
  if (replicas == 0) throw ConfigError("marginal_model: at least one replica required");
  if (grid.dim() != pot.dim()) throw ConfigError("grid and potential dimensions differ");
  std::vector<Trajectory> runs(replicas);
  parallel_for(replicas, resolve_threads(threads), [&](std::size_t r) {
    SimConfig replica = cfg;
    replica.seed = cfg.seed + r;
    runs[r] = subsample(simulate_langevin(pot, replica), lag);
  });
  return build_counts(std::span<const Trajectory>(runs), grid, reversible);
}

namespace {

constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                       0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                         0.4786286704993665, 0.2369268850561891};

}  // namespace

Vector gibbs_reference(const Potential& pot, double beta, const TransitionModel& model) {
  if (!(beta > 0.0)) throw ConfigError("gibbs_reference: beta must be positive");
  if (!model.states() || !model.states()->grid) throw InputError("gibbs_reference: model has no grid");
  const Grid& grid = *model.states()->grid;
  if (grid.dim() != pot.dim()) throw ConfigError("grid and potential dimensions differ");
  const auto& labels = model.states()->labels;
  const std::size_t dim = grid.dim();
  const std::size_t points = dim == 1 ? kNodes.size() : kNodes.size() * kNodes.size();

  // Energies at every quadrature point, then weights relative to the minimum.
  std::vector<double> energy(labels.size() * points);
  std::vector<double> qweight(points);
  std::vector<double> x(dim);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    const auto c = grid.center(labels[s]);
    for (std::size_t p = 0; p < points; ++p) {
      double w = 1.0;
      for (std::size_t a = 0; a < dim; ++a) {
        const std::size_t node = a == 0 ? p % kNodes.size() : p / kNodes.size();
        x[a] = c[a] + 0.5 * grid.axis(a).width() * kNodes[node];
        w *= kWeights[node];
      }
      qweight[p] = w;
      energy[s * points + p] = pot.energy(x);
    }
  }
  const double vmin = *std::min_element(energy.begin(), energy.end());
  Vector pi(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t s = 0; s < labels.size(); ++s) {
    double total = 0.0;
    for (std::size_t p = 0; p < points; ++p) total += qweight[p] * std::exp(-beta * (energy[s * points + p] - vmin));
    pi(static_cast<Eigen::Index>(s)) = total;
  }
  const double sum = pi.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) throw InvariantFailure("Gibbs weights are not normalizable");
  return pi / sum;
}

DetailedBalanceReport detailed_balance_report(const TransitionModel& model, const Vector& reference,
                                              double abs_tol) {
  const auto n = static_cast<Eigen::Index>(model.size());
  if (reference.size() != n) throw InputError("reference density does not match the model size");
  if (reference.minCoeff() < 0.0 || std::abs(reference.sum() - 1.0) > 1e-9) {
    throw InputError("reference density must be a probability vector");
  }
  const Matrix& P = model.P();
  Vector row_counts = Vector::Zero(n);
  if (model.counts()) row_counts = model.counts()->rowwise().sum();

  auto variance = [&](Eigen::Index x, Eigen::Index y) {
    if (!model.counts()) return 0.0;
    const double c = row_counts(x);
    if (c <= 0.0) return 0.0;
    return reference(x) * reference(x) * P(x, y) * (1.0 - P(x, y)) / c;
  };

  DetailedBalanceReport out;
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = x + 1; y < n; ++y) {
      const double r = std::abs(reference(x) * P(x, y) - reference(y) * P(y, x));
      if (r > out.residual) {
        out.residual = r;
        out.std_error = std::sqrt(variance(x, y) + variance(y, x));
      }
    }
  }
  out.n_samples = model.counts() ? static_cast<std::size_t>(std::llround(model.counts()->sum())) : 0;
  out.pass = out.residual < 5.0 * out.std_error + abs_tol;
  return out;
}

nlohmann::json detailed_balance_json(const DetailedBalanceReport& report) {
  return {{"residual", report.residual},
          {"stderr", report.std_error},
          {"n_samples", report.n_samples},
          {"verdict", report.pass ? "pass" : "fail"}};
}

}  // namespace effdyn
