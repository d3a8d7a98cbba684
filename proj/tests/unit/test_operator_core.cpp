#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "effdyn/error.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/fixtures.hpp"
#include "effdyn/io_util.hpp"
#include "effdyn/model_io.hpp"
#include "effdyn/simulate.hpp"
#include "effdyn/transition_model.hpp"
#include "oracles.hpp"

using namespace effdyn;

namespace {

double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) M(i, j++) = v;
    ++i;
  }
  return M;
}

}  // namespace

TEST_CASE("stationary distribution agrees with a bordered linear solve") {
  oracle::Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 11;
    const auto model = trial % 2 ? oracle::random_reversible(rng, n) : oracle::random_nonreversible(rng, n);
    const Vector ref = oracle::stationary(model.P());
    CHECK((stationary_distribution(model.P()) - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((model.mu().transpose() * model.P() - model.mu().transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(model.mu().minCoeff() > 0.0);
  }
}

TEST_CASE("reducible chains and malformed matrices are rejected") {
  CHECK_THROWS_AS(stationary_distribution(mat({{1, 0}, {0, 1}})), DisconnectedStateError);
  CHECK_THROWS_AS(TransitionModel::from_matrix(mat({{0.5, 0.6}, {0.5, 0.5}})), InputError);
  CHECK_THROWS_AS(TransitionModel::from_matrix(mat({{1.5, -0.5}, {0.5, 0.5}})), InputError);
  CHECK_THROWS_AS(TransitionModel::from_matrix_and_mu(mat({{0.9, 0.1}, {0.2, 0.8}}), Vector::Constant(2, 0.5)),
                  InvariantFailure);
}

TEST_CASE("adjoint examples") {
  const auto two = fixture("2st");
  CHECK(max_abs(adjoint(two) - two.P()) < 1e-12);
  CHECK(detailed_balance_residual(two) < 1e-15);

  oracle::Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = oracle::random_nonreversible(rng, 3 + trial % 8);
    const Matrix star = adjoint(model);
    CHECK((star.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK((model.mu().transpose() * star - model.mu().transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(max_abs(adjoint(adjoint_model(model)) - model.P()) < 1e-12);
    const auto rev = oracle::random_reversible(rng, 3 + trial % 8);
    CHECK(max_abs(adjoint(rev) - rev.P()) < 1e-12);
  }
}

TEST_CASE("reversible and non-reversible parts") {
  const auto cycle = fixture("cycle3");
  const auto parts = decompose(cycle);
  CHECK(max_abs(parts.reversible - 0.5 * (cycle.P() + cycle.P().transpose())) < 1e-15);
  CHECK(max_abs(parts.reversible + parts.nonreversible - cycle.P()) == 0.0);
  CHECK(detailed_balance_residual(cycle) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  oracle::Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = oracle::random_nonreversible(rng, 3 + trial % 8);
    const auto d = decompose(model);
    const Vector s = model.mu().cwiseSqrt();
    const Matrix sym = s.asDiagonal() * d.reversible * s.cwiseInverse().asDiagonal();
    CHECK(max_abs(sym - sym.transpose()) < 1e-10);
    CHECK(max_abs(d.reversible + d.nonreversible - model.P()) < 1e-15);
    CHECK(detailed_balance_residual(reversible_part(model)) < 1e-12);
    const auto rev = oracle::random_reversible(rng, 3 + trial % 8);
    CHECK(max_abs(decompose(rev).nonreversible) < 1e-12);
  }
}

TEST_CASE("nonnegativity check") {
  const auto identity = TransitionModel::from_matrix_and_mu(Matrix::Identity(3, 3), Vector::Constant(3, 1.0 / 3.0));
  const auto id = nonnegativity_check(identity);
  CHECK(id.nonnegative);
  CHECK(id.min_eigenvalue == doctest::Approx(1.0));

  const auto flip = TransitionModel::from_matrix(mat({{0, 1}, {1, 0}}));
  const auto fl = nonnegativity_check(flip);
  CHECK_FALSE(fl.nonnegative);
  CHECK(fl.min_eigenvalue == doctest::Approx(-1.0));
  CHECK_FALSE(fl.within_spectral_bound);

  const auto em = build_analytic_em(Potential::double_well_1d(), 2.0, 0.01, Grid::line(-2.0, 2.0, 40));
  const auto check = nonnegativity_check(em);
  const Vector values = oracle::eigenvalues(decompose(em).reversible);
  CHECK(check.nonnegative);
  CHECK(check.min_eigenvalue == doctest::Approx(values.minCoeff()).epsilon(1e-8));
  CHECK(values.minCoeff() >= -1e-10);
}

TEST_CASE("analytic EM kernel") {
  const auto harmonic = build_analytic_em(Potential::harmonic(1), 1.0, 0.05, Grid::line(-9.0, 9.0, 81));
  CHECK(detailed_balance_residual(harmonic) < 1e-6);
  CHECK((harmonic.P().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(harmonic.source() == ModelSource::Analytic);

  SUBCASE("stationary mass gathers in the wells at low temperature") {
    // Laplace oracle: near x = +-1, V ~ 4 (x -+ 1)^2, so each well is a Gaussian
    // of variance 1 / (8 beta) and the window |x -+ 1| < w holds erf(w sqrt(4 beta)).
    const double beta = 20.0, w = 0.25;
    const auto grid = Grid::line(-1.7, 1.7, 680);
    const auto model = build_analytic_em(Potential::double_well_1d(), beta, 1e-3, grid);
    double window = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      if (std::abs(std::abs(grid.center(c)[0]) - 1.0) < w) window += model.mu()(static_cast<Eigen::Index>(c));
    }
    const double laplace = std::erf(w * std::sqrt(4.0 * beta));
    CHECK(window > 0.99);
    CHECK(std::abs(window - laplace) < 0.01);
  }

  SUBCASE("truncation names the row") {
    try {
      build_analytic_em(Potential::harmonic(1), 1.0, 0.5, Grid::line(0.5, 2.0, 4));
      FAIL("expected truncation error");
    } catch (const TruncationError& e) {
      CHECK(e.row() < 4);
    }
  }
}

TEST_CASE("count estimator contracts") {
  const std::vector<std::vector<std::size_t>> alternating{{0, 1, 0, 1, 0}};
  const auto rev = build_counts_from_states(alternating, 2, true);
  CHECK(max_abs(rev.P() - mat({{0, 1}, {1, 0}})) == 0.0);
  CHECK(detailed_balance_residual(rev) < 1e-12);

  const std::vector<std::vector<std::size_t>> stuck{{0, 0, 1}};
  CHECK_THROWS_AS(build_counts_from_states(stuck, 2, false), DisconnectedStateError);

  // State 1 is never visited and is pruned with its label recorded.
  const std::vector<std::vector<std::size_t>> gap{{0, 2, 0, 2, 2, 0}};
  const auto pruned = build_counts_from_states(gap, 3, false);
  REQUIRE(pruned.size() == 2);
  REQUIRE(pruned.states());
  CHECK(pruned.states()->labels == std::vector<std::size_t>{0, 2});
  CHECK(pruned.mu().minCoeff() > 0.0);

  oracle::Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = oracle::random_nonreversible(rng, 5);
    const auto chain = simulate_chain(model, 0, 20000, static_cast<std::uint64_t>(trial));
    const auto sym = build_counts_from_states(std::vector<std::vector<std::size_t>>{chain}, 5, true);
    CHECK(detailed_balance_residual(sym) < 1e-12);
  }
}

TEST_CASE("count model converges to the analytic kernel") {
  const auto pot = Potential::double_well_1d();
  const double beta = 2.0, dt = 0.05;
  const auto grid = Grid::line(-2.0, 2.0, 80);
  const auto analytic = build_analytic_em(pot, beta, dt, grid);
  SimConfig cfg;
  cfg.beta = beta;
  cfg.dt = dt;
  cfg.n_steps = 2000000;
  cfg.seed = 17;
  cfg.guard_radius = grid.guard_radius();
  const auto counts = build_counts(simulate_em(pot, cfg), grid, false);
  REQUIRE(counts.counts());
  REQUIRE(counts.states());
  const auto& labels = counts.states()->labels;
  const Vector rows = counts.counts()->rowwise().sum();
  std::size_t tested = 0, within = 0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < counts.P().rows(); ++i) {
    for (Eigen::Index j = 0; j < counts.P().cols(); ++j) {
      const double p = analytic.P()(static_cast<Eigen::Index>(labels[i]), static_cast<Eigen::Index>(labels[j]));
      if (rows(i) * p < 100.0) continue;
      const double z = (counts.P()(i, j) - p) / std::sqrt(p * (1.0 - p) / rows(i));
      ++tested;
      within += std::abs(z) < 3.0 ? 1 : 0;
      worst = std::max(worst, std::abs(z));
    }
  }
  REQUIRE(tested > 200);
  // Per-entry 3-sigma coverage over hundreds of entries, plus a hard cap.
  CHECK(static_cast<double>(within) / static_cast<double>(tested) >= 0.99);
  CHECK(worst < 5.0);
}

TEST_CASE("model serialization round trip is byte identical") {
  const auto model = build_analytic_em(Potential::double_well_2d(), 1.0, 0.05, Grid::rect({-2, 2, 8}, {-1.5, 1.5, 6}));
  const auto enc = encode_model(model, "m.bin");
  const auto back = decode_model(enc.header, enc.matrix_bytes);
  CHECK(max_abs(back.P() - model.P()) == 0.0);
  CHECK((back.mu() - model.mu()).cwiseAbs().maxCoeff() == 0.0);
  const auto again = encode_model(back, "m.bin");
  CHECK(dump_json(again.header) == dump_json(enc.header));
  CHECK(again.matrix_bytes == enc.matrix_bytes);

  const auto dir = std::filesystem::temp_directory_path() / "effdyn_model_io_test";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::size_t>> chain{{0, 1, 2, 1, 0, 2, 2, 1, 0}};
  const auto counted = build_counts_from_states(chain, 3, false);
  save_model(dir, "counted", counted);
  const auto loaded = load_model(dir / "counted.json");
  REQUIRE(loaded.counts());
  CHECK(max_abs(*loaded.counts() - *counted.counts()) == 0.0);
  save_model(dir, "counted2", loaded);
  CHECK(io::read_file(dir / "counted2.bin") == io::read_file(dir / "counted.bin"));
  std::filesystem::remove_all(dir);

  CHECK(mu_csv(fixture("bd3")).rfind("state,label,mu\n", 0) == 0);
}

TEST_CASE("sampled chains visit states at stationary frequencies") {
  const auto bd3 = fixture("bd3");
  const auto chain = simulate_chain(bd3, 0, 400000, 5);
  Vector freq = Vector::Zero(3);
  for (auto s : chain) freq(static_cast<Eigen::Index>(s)) += 1.0;
  freq /= static_cast<double>(chain.size());
  CHECK((freq - bd3.mu()).cwiseAbs().maxCoeff() < 0.01);
  CHECK(simulate_chain(bd3, 0, 1000, 5) == simulate_chain(bd3, 0, 1000, 5));
}
