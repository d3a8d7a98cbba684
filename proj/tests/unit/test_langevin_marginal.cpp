#include <doctest.h>

#include <cmath>
#include <vector>

#include "effdyn/estimators.hpp"
#include "effdyn/fixtures.hpp"
#include "effdyn/langevin_marginal.hpp"
#include "effdyn/statistics.hpp"
#include "oracles.hpp"

using namespace effdyn;

namespace {

SimConfig langevin(double beta, double dt, std::size_t steps, std::uint64_t seed) {
  SimConfig cfg;
  cfg.beta = beta;
  cfg.dt = dt;
  cfg.gamma = 1.0;
  cfg.n_steps = steps;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("harmonic Langevin marginal passes the detailed-balance verdict") {
  // Wide enough that no frame leaves the grid for this seed.
  const auto grid = Grid::line(-6.0, 6.0, 24);
  const auto pot = Potential::harmonic(1);
  // tau = lag * dt = 0.5
  const auto cfg = langevin(1.0, 0.005, 10000000, 70);
  const auto model = marginal_model(pot, cfg, 100, grid);
  CHECK(model.lag() == doctest::Approx(0.5));
  const auto report = detailed_balance_report(model, gibbs_reference(pot, 1.0, model));
  MESSAGE("residual " << report.residual << " stderr " << report.std_error);
  CHECK(report.pass);
  CHECK(report.residual < 5.0 * report.std_error);
  CHECK(report.n_samples + 1 == 100001);

  const auto sym = marginal_model(pot, cfg, 100, grid, 1, std::nullopt, true);
  CHECK(detailed_balance_residual(sym) < 1e-12);
}

TEST_CASE("double-well occupation matches the cell-averaged Gibbs weights") {
  const auto grid = Grid::line(-2.0, 2.0, 20);
  const auto pot = Potential::double_well_1d();
  const double beta = 2.0;
  // Small dt keeps the integrator's O(dt) bias under the sampling error.
  auto cfg = langevin(beta, 0.001, 100000000, 71);
  const auto traj = subsample(simulate_langevin(pot, cfg), 100);
  const auto cells = discretize(traj, grid);
  const auto model = build_counts(traj, grid, false);
  const Vector pi = gibbs_reference(pot, beta, model);
  const auto& labels = model.states()->labels;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    std::vector<double> ind(cells.size());
    for (std::size_t t = 0; t < cells.size(); ++t) ind[t] = cells[t] == labels[s] ? 1.0 : 0.0;
    const auto est = batch_means(ind);
    const double expected = pi(static_cast<Eigen::Index>(s));
    CHECK(std::abs(est.value - expected) < 3.0 * est.std_error + 1e-4);
  }
  const auto report = detailed_balance_report(model, pi);
  MESSAGE("double-well residual " << report.residual << " stderr " << report.std_error);
  CHECK(report.pass);
}

TEST_CASE("residual shrinks like one over root N") {
  const auto grid = Grid::line(-4.0, 4.0, 12);
  const auto pot = Potential::harmonic(1);
  std::vector<double> residuals;
  for (std::size_t steps : {1000000u, 2000000u, 4000000u, 8000000u}) {
    // Eight replicas averaged to tame the max-over-pairs noise.
    const auto model = marginal_model(pot, langevin(1.0, 0.005, steps, 72), 100, grid, 8, 4);
    residuals.push_back(detailed_balance_report(model, gibbs_reference(pot, 1.0, model)).residual);
  }
  for (std::size_t i = 0; i < residuals.size(); ++i) MESSAGE("N_" << i << " residual " << residuals[i]);
  const double ratio = residuals.back() / residuals.front();
  CHECK(ratio > 0.5 / std::sqrt(8.0));
  CHECK(ratio < 2.0 / std::sqrt(8.0));
  for (std::size_t i = 1; i < residuals.size(); ++i) CHECK(residuals[i] < residuals[i - 1] * 1.25);
}

TEST_CASE("report verdicts on fixtures") {
  const auto harmonic = build_analytic_em(Potential::harmonic(1), 1.0, 0.05, Grid::line(-9.0, 9.0, 81));
  const auto ok = detailed_balance_report(harmonic, harmonic.mu());
  CHECK(ok.pass);
  CHECK(ok.residual < 1e-6);
  CHECK(ok.n_samples == 0);

  const auto cycle = fixture("cycle3-biased");
  const auto bad = detailed_balance_report(cycle, cycle.mu());
  CHECK_FALSE(bad.pass);
  const auto j = detailed_balance_json(bad);
  CHECK(j.at("verdict") == "fail");
  CHECK(j.contains("stderr"));
}
