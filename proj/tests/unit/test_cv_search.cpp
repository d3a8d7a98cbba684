#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "effdyn/cv_search.hpp"
#include "effdyn/effective.hpp"
#include "effdyn/error.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/fixtures.hpp"
#include "effdyn/kl_objective.hpp"
#include "oracles.hpp"

using namespace effdyn;

namespace {

CVAssignment labels(std::initializer_list<std::size_t> xs) {
  const std::vector<std::size_t> l(xs);
  return CVAssignment::from_labels(l);
}

}  // namespace

TEST_CASE("timescale objective fixtures") {
  const auto bd3 = fixture("bd3");
  const auto w1 = ObjectiveWeights::uniform(1);
  const auto id = timescale_objective(bd3, CVAssignment::identity(3), ObjectiveWeights::uniform(2), true);
  CHECK(std::abs(id.value - 1.5) < 1e-12);
  const auto a = timescale_objective(bd3, labels({0, 1, 1}), w1, true);
  CHECK(std::abs(a.value - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(a.lambda_eff(0) - 1.0 / 3.0) < 1e-12);
  const auto b = timescale_objective(bd3, labels({0, 1, 0}), w1, true);
  CHECK(std::abs(b.value - 1.0) < 1e-12);

  // Two bins give one eigenvalue; the second is missing and counts as 0.
  const auto missing = timescale_objective(bd3, labels({0, 1, 1}), ObjectiveWeights::uniform(2), true);
  CHECK(missing.missing == 1);
  CHECK(std::abs(missing.value - (2.0 / 3.0 + 1.0)) < 1e-12);
}

TEST_CASE("timescale objective equals the variational value on random instances") {
  oracle::Rng rng(60);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const auto model = oracle::random_reversible(rng, n);
    const auto cv = oracle::random_cv(rng, n, 2 + trial % (n - 2));
    const auto r = timescale_objective(model, cv, ObjectiveWeights({3.0, 2.0, 1.0}), true);
    REQUIRE(r.variational.has_value());
    CHECK(std::abs(*r.variational - r.value) < 1e-10);
  }
}

TEST_CASE("eigenvalue comparison fixtures") {
  const auto bd3 = fixture("bd3");
  const auto keep = eigen_comparison(bd3, labels({0, 1, 0}), 2);
  // {0,2}|{1} keeps the zero eigenvalue exactly and loses the slow one.
  REQUIRE(keep.rows.size() == 2);
  CHECK(keep.rows[0].lambda == doctest::Approx(0.5));
  CHECK(std::abs(keep.rows[0].lambda_eff) < 1e-12);
  CHECK(keep.rows[1].missing);
  const auto eff = build_effective(bd3, labels({0, 1, 0}));
  const auto s = solve_spectrum(eff.reduced, 1);
  Vector lifted = lift(labels({0, 1, 0}), s.eigenvectors.col(1));
  Vector expected(3);
  expected << 1, -1, 1;
  expected /= std::sqrt(bd3.mu().dot(expected.cwiseAbs2()));
  CHECK(std::min((lifted - expected).cwiseAbs().maxCoeff(), (lifted + expected).cwiseAbs().maxCoeff()) < 1e-12);
  CHECK(keep.max_residual < 1e-8);

  const auto lump = eigen_comparison(bd3, labels({0, 1, 1}), 1);
  CHECK(std::abs(lump.rows[0].lambda_eff - 1.0 / 3.0) < 1e-12);
  CHECK(lump.rows[0].lambda_eff <= lump.rows[0].lambda);
  CHECK(lump.ordered);

  const auto id = eigen_comparison(bd3, CVAssignment::identity(3), 2);
  for (const auto& row : id.rows) CHECK(std::abs(row.gap) < 1e-10);
}

TEST_CASE("eigenvalue comparison on random reversible chains") {
  oracle::Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const auto model = oracle::random_reversible(rng, n);
    const auto cv = oracle::random_cv(rng, n, 2 + trial % (n - 2));
    const auto r = eigen_comparison(model, cv, 3);
    CHECK(r.ordered);
    CHECK(r.max_residual < 1e-8);
  }
}

TEST_CASE("rate comparison fixtures") {
  const auto bd4 = fixture("bd4");
  const auto r = rate_comparison(bd4, labels({0, 1, 1, 2}), {{0}, {2}});
  CHECK(std::abs(r.k_full - 1.0 / 48.0) < 1e-15);
  CHECK(std::abs(r.k_eff - 1.0 / 32.0) < 1e-15);
  CHECK(std::abs(r.k_eff_flux - 1.0 / 32.0) < 1e-15);
  CHECK(std::abs(r.gap - 1.0 / 96.0) < 1e-15);
  CHECK(std::abs(r.q_eff(1) - 0.5) < 1e-15);
  CHECK(r.identity_residual < 1e-12);

  const auto id = rate_comparison(bd4, CVAssignment::identity(4), {{0}, {3}});
  CHECK(std::abs(id.k_eff - id.k_full) < 1e-15);
  CHECK(std::abs(id.gap) < 1e-15);

  const auto dup = fixture("dup4");
  const auto cv = labels({0, 1, 1, 2});
  const auto d = rate_comparison(dup, cv, {{0}, {2}});
  CHECK(std::abs(d.k_eff - d.k_full) < 1e-12);
  CHECK((lift(cv, d.q_eff) - d.q).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(rate_comparison(bd4, labels({0, 1, 1, 0}), {{0}, {1}}), InputError);
}

TEST_CASE("rate comparison identity on random reversible chains") {
  oracle::Rng rng(62);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const auto model = oracle::random_reversible(rng, n);
    const std::size_t k = 3 + trial % (n - 3);
    const auto cv = oracle::random_cv(rng, n, k);
    const auto sets = oracle::random_sets(rng, k);
    const auto r = rate_comparison(model, cv, sets);
    CHECK(r.k_eff >= r.k_full - 1e-10);
    CHECK(r.identity_residual < 1e-10);
    CHECK(std::abs(r.k_eff - r.k_eff_flux) < 1e-10);
  }
}

TEST_CASE("scan selects the slow coordinate of the anisotropic double well") {
  const auto setup = double_well_setup();
  // Coarser than the acceptance grid to keep the unit test fast.
  const auto model = build_analytic_em(setup.potential, setup.beta, setup.dt, Grid::rect({-2.2, 2.2, 22}, {-2.0, 2.0, 16}));
  const auto family = CVFamily::linear_angle(12, 8);
  ScanConfig cfg;
  cfg.rates = true;
  const auto ts = scan(model, family, cfg);
  const double step = std::numbers::pi / 12.0;
  const double best = ts.points[ts.argmin].param;
  CHECK((best <= step + 1e-12 || best >= std::numbers::pi - step - 1e-12));
  CHECK(ts.points[0].objective < ts.points[6].objective);
  CHECK(ts.points[0].k_full.has_value());

  cfg.objective = ScanObjective::KL;
  const auto kl = scan(model, family, cfg);
  CHECK(kl.points[0].objective < kl.points[6].objective);
  const double kbest = kl.points[kl.argmin].param;
  CHECK((kbest <= step + 1e-12 || kbest >= std::numbers::pi - step - 1e-12));

  SUBCASE("deterministic regardless of thread count") {
    ScanConfig one = cfg, many = cfg;
    one.threads = 1;
    many.threads = 4;
    CHECK(scan_csv(scan(model, family, one)) == scan_csv(scan(model, family, many)));
  }
}

TEST_CASE("isotropic potential gives a flat curve") {
  const auto model = build_analytic_em(Potential::harmonic(2), 1.0, 0.2, Grid::rect({-5, 5, 16}, {-5, 5, 16}));
  ScanConfig cfg;
  cfg.weights = ObjectiveWeights::uniform(1);
  // Angles related by a symmetry of the square grid.
  CVFamily family;
  family.kind = FamilyKind::LinearAngle2d;
  family.bins = 6;
  family.params = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0, 3.0 * std::numbers::pi / 4.0};
  const auto r = scan(model, family, cfg);
  CHECK(std::abs(r.points[0].objective - r.points[2].objective) < 1e-6);
  CHECK(std::abs(r.points[1].objective - r.points[3].objective) < 1e-6);
}

TEST_CASE("ties pick the smallest parameter and degenerate families fail") {
  const auto bd3 = fixture("bd3");
  const auto family = CVFamily::explicit_list({labels({0, 1, 1}), labels({0, 0, 1}), labels({0, 1, 1})});
  const auto r = scan(bd3, family, ScanConfig{});
  // {0}|{1,2} and {0,1}|{2} are mirror images with equal objectives.
  CHECK(r.argmin == 0);
  CHECK(scan_json(r).at("argmin_param") == 0.0);
  const auto csv = scan_csv(r);
  CHECK(csv.rfind("param,objective,lambda_1,k_full,k_eff,gap\n", 0) == 0);

  const auto degenerate = CVFamily::explicit_list({CVAssignment::single_bin(3), CVAssignment::single_bin(3)});
  CHECK_THROWS_AS(scan(bd3, degenerate, ScanConfig{}), DegenerateFamilyError);
  CHECK_THROWS_AS(scan(bd3, CVFamily::linear_angle(4, 3), ScanConfig{}), ConfigError);
}
