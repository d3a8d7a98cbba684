#include <doctest.h>

#include <cmath>
#include <vector>

#include "effdyn/cv.hpp"
#include "effdyn/effective.hpp"
#include "effdyn/error.hpp"
#include "effdyn/fixtures.hpp"
#include "effdyn/grid.hpp"
#include "effdyn/spectral.hpp"
#include "effdyn/tpt.hpp"
#include "oracles.hpp"

using namespace effdyn;

namespace {

Vector v(std::initializer_list<double> xs) {
  Vector out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

CVAssignment labels(std::initializer_list<std::size_t> xs) {
  const std::vector<std::size_t> l(xs);
  return CVAssignment::from_labels(l);
}

Vector random_vector(oracle::Rng& rng, std::size_t n) {
  Vector f(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = oracle::uniform(rng, -1.0, 1.0);
  return f;
}

}  // namespace

TEST_CASE("CV assignments") {
  CHECK_THROWS_AS(CVAssignment({0, 2, 2}, 3), AssignmentError);
  CHECK_THROWS_AS(CVAssignment({0, 1, 3}, 3), AssignmentError);
  const auto cv = labels({1, 0, 1, 2});
  CHECK(cv.k() == 3);
  CHECK(cv.fiber(1) == std::vector<std::size_t>{0, 2});
  CHECK(cv.position_in_fiber(2) == 1);
  const auto back = CVAssignment::from_json(cv.to_json());
  CHECK(back.bin_of() == cv.bin_of());
  CHECK(back.to_json().dump() == cv.to_json().dump());
}

TEST_CASE("linear CVs merge empty bins and keep surjectivity") {
  const auto grid = Grid::rect({-1, 1, 4}, {-1, 1, 4});
  std::vector<std::size_t> cells(grid.size());
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = c;
  for (int j = 0; j < 16; ++j) {
    const double theta = 3.14159265358979 * j / 16.0;
    const auto cv = CVAssignment::linear_angle(grid, cells, theta, 12);
    CHECK(cv.n() == 16);
    CHECK(cv.k() >= 2);
    CHECK(cv.k() <= 12);
    for (std::size_t z = 0; z < cv.k(); ++z) CHECK_FALSE(cv.fiber(z).empty());
  }
  const auto x = CVAssignment::coordinate(grid, cells, 0, 4);
  CHECK(x.k() == 4);
  for (std::size_t c = 0; c < 16; ++c) CHECK(x(c) == grid.axis_index(c, 0));
  const auto angle0 = CVAssignment::linear_angle(grid, cells, 0.0, 4);
  CHECK(angle0.bin_of() == x.bin_of());
}

TEST_CASE("effective model of the bd3 lump") {
  const auto bd3 = fixture("bd3");
  const auto eff = build_effective(bd3, labels({0, 1, 1}));
  CHECK((eff.reduced.mu() - v({0.25, 0.75})).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((eff.conditionals[1] - v({2.0 / 3, 1.0 / 3})).cwiseAbs().maxCoeff() < 1e-15);
  Matrix expected(2, 2);
  expected << 0.5, 0.5, 1.0 / 6, 5.0 / 6;
  CHECK((eff.reduced.P() - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(detailed_balance_residual(eff.reduced) < 1e-15);
  CHECK((project(eff, v({0, 1, 4})) - v({0, 2})).cwiseAbs().maxCoeff() < 1e-15);

  const auto res = lift_identity_check(bd3, eff, v({0, 1}), v({1, -1}));
  CHECK(res.transfer < 1e-15);
  CHECK(res.inner_product < 1e-15);
  CHECK(std::abs(dirichlet_energy(eff.reduced, v({0, 1})) - 0.125) < 1e-15);
  CHECK(std::abs(dirichlet_energy(bd3, v({0, 1, 1})) - 0.125) < 1e-15);
}

TEST_CASE("identity and single-bin CVs") {
  oracle::Rng rng(40);
  const auto model = oracle::random_nonreversible(rng, 7);
  const auto id = build_effective(model, CVAssignment::identity(7));
  CHECK((id.reduced.P() - model.P()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((id.reduced.mu() - model.mu()).cwiseAbs().maxCoeff() == 0.0);
  const auto one = build_effective(model, CVAssignment::single_bin(7));
  CHECK(one.reduced.size() == 1);
  CHECK(std::abs(one.reduced.P()(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(one.reduced.mu()(0) - 1.0) < 1e-15);
  CHECK(std::abs(effective_adjoint(model, CVAssignment::single_bin(7))(0, 0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(build_effective(model, CVAssignment::identity(6)), AssignmentError);
}

TEST_CASE("lift and project") {
  oracle::Rng rng(41);
  const auto model = oracle::random_reversible(rng, 9);
  const auto cv = oracle::random_cv(rng, 9, 4);
  const auto eff = build_effective(model, cv);
  CHECK((lift(cv, Vector::Constant(4, 2.5)).array() - 2.5).abs().maxCoeff() == 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector f = random_vector(rng, 4);
    CHECK((project(eff, lift(cv, f)) - f).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("structural identities on random instances") {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + trial % 10;
    const std::size_t k = 2 + trial % (n - 1);
    const bool reversible = trial % 2 == 0;
    const auto model = reversible ? oracle::random_reversible(rng, n) : oracle::random_nonreversible(rng, n);
    const auto cv = oracle::random_cv(rng, n, k);
    const auto eff = build_effective(model, cv);

    for (std::size_t z = 0; z < k; ++z) {
      double mass = 0.0;
      for (auto x : cv.fiber(z)) mass += model.mu()(static_cast<Eigen::Index>(x));
      CHECK(std::abs(eff.reduced.mu()(static_cast<Eigen::Index>(z)) - mass) < 1e-15);
      CHECK(std::abs(eff.conditionals[z].sum() - 1.0) < 1e-14);
    }
    CHECK((eff.reduced.P().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((eff.reduced.mu().transpose() * eff.reduced.P() - eff.reduced.mu().transpose()).cwiseAbs().maxCoeff() <
          1e-10);
    if (reversible) CHECK(detailed_balance_residual(eff.reduced) < 1e-10);

    const auto res = lift_identity_check(model, eff, random_vector(rng, k), random_vector(rng, k));
    CHECK(res.transfer < 1e-10);
    CHECK(res.inner_product < 1e-10);
    CHECK(res.energy < 1e-10);
    CHECK(effective_adjoint_route_gap(model, cv) < 1e-12);
    if (reversible) {
      CHECK((effective_adjoint(model, cv) - eff.reduced.P()).cwiseAbs().maxCoeff() < 1e-12);
    }

    if (k >= 3) {
      const auto coarse = oracle::random_cv(rng, k, 2);
      CHECK(compose_check(model, cv, coarse) < 1e-12);
    }
  }
}

TEST_CASE("effective adjoint of the biased cycle by two routes") {
  const auto biased = fixture("cycle3-biased");
  const auto cv = labels({0, 1, 1});
  CHECK(effective_adjoint_route_gap(biased, cv) < 1e-12);
  const Matrix star = effective_adjoint(biased, cv);
  const auto eff = build_effective(biased, cv);
  for (Eigen::Index z = 0; z < 2; ++z) {
    for (Eigen::Index w = 0; w < 2; ++w) {
      CHECK(std::abs(star(z, w) - eff.reduced.P()(w, z) * eff.reduced.mu()(w) / eff.reduced.mu()(z)) < 1e-15);
    }
  }
}

TEST_CASE("composition fixtures") {
  const auto bd4 = fixture("bd4");
  const auto fine = labels({0, 1, 1, 2});
  CHECK(compose_check(bd4, fine, CVAssignment::identity(3)) == 0.0);
  CHECK(compose_check(bd4, fine, labels({0, 1, 1})) < 1e-12);
  oracle::Rng rng(43);
  const auto model = oracle::random_reversible(rng, 10);
  CHECK(compose_check(model, oracle::random_cv(rng, 10, 5), oracle::random_cv(rng, 5, 2)) < 1e-12);
}

TEST_CASE("composition can only lose slow modes and raise rates") {
  oracle::Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6 + trial % 7;
    const auto model = oracle::random_reversible(rng, n);
    const auto fine = oracle::random_cv(rng, n, 5);
    const auto coarse = oracle::random_cv(rng, 5, 3);
    const auto eff = build_effective(model, fine);
    const auto eff2 = build_effective(model, compose(coarse, fine));
    const auto s1 = solve_spectrum(eff.reduced, 2);
    const auto s2 = solve_spectrum(eff2.reduced, 2);
    for (Eigen::Index i = 1; i <= 2; ++i) CHECK(s2.eigenvalues(i) <= s1.eigenvalues(i) + 1e-10);
    // Bins 0 and 2 of the coarse map pulled back to the fine bins.
    SetPair fine_sets, coarse_sets{{0}, {2}};
    for (std::size_t z = 0; z < 5; ++z) {
      if (coarse(z) == 0) fine_sets.A.push_back(z);
      if (coarse(z) == 2) fine_sets.B.push_back(z);
    }
    const double k1 = analyze_tpt(eff.reduced, fine_sets).k_energy;
    const double k2 = analyze_tpt(eff2.reduced, coarse_sets).k_energy;
    CHECK(k2 >= k1 - 1e-10);
  }
}

TEST_CASE("projected bd4 chain is visibly non-Markovian") {
  const auto bd4 = fixture("bd4");
  const auto cv = labels({0, 1, 1, 2});
  const auto eff = build_effective(bd4, cv);
  const auto chain = simulate_chain(bd4, 0, 2000000, 45);
  const auto z = two_step_markov_zscore(project_chain(chain, cv), eff);
  CHECK(z > 5.0);

  // The identity CV is Markov by construction.
  const auto zid = two_step_markov_zscore(project_chain(chain, CVAssignment::identity(4)),
                                          build_effective(bd4, CVAssignment::identity(4)));
  CHECK(zid < 5.0);
}

TEST_CASE("effective model export") {
  const auto eff = build_effective(fixture("bd3"), labels({0, 1, 1}));
  const auto j = effective_json(eff);
  CHECK(j.contains("conditionals"));
  CHECK(j.contains("cv"));
}
