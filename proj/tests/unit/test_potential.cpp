#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "effdyn/error.hpp"
#include "effdyn/potential.hpp"

using effdyn::Potential;

TEST_CASE("double-well and harmonic values") {
  const auto dw = Potential::double_well_1d();
  CHECK(effdyn::eval_potential(dw, std::vector<double>{1.0}) == 0.0);
  CHECK(effdyn::eval_potential(dw, std::vector<double>{-1.0}) == 0.0);
  CHECK(effdyn::eval_potential(dw, std::vector<double>{0.0}) == 1.0);
  const auto dw2 = Potential::double_well_2d();
  CHECK(effdyn::eval_potential(dw2, std::vector<double>{-1.0, 0.0}) == 0.0);
  CHECK(effdyn::eval_potential(dw2, std::vector<double>{0.0, 1.0}) == doctest::Approx(3.0));
  const auto h = Potential::harmonic(2, 3.0);
  CHECK(effdyn::eval_potential(h, std::vector<double>{1.0, 2.0}) == doctest::Approx(7.5));
}

TEST_CASE("unknown kinds and bad inputs are rejected") {
  CHECK_THROWS_AS(Potential::from_name("quartic", {}, 1), effdyn::ConfigError);
  const auto dw = Potential::double_well_1d();
  CHECK_THROWS_AS(effdyn::eval_potential(dw, std::vector<double>{std::nan("")}), effdyn::InputError);
  CHECK_THROWS_AS(effdyn::eval_potential(dw, std::vector<double>{0.0, 0.0}), effdyn::InputError);
  CHECK(Potential::from_name("double-well-2d", {1.0, 2.0}, 2).name() == "double-well-2d");
}

TEST_CASE("analytic gradients agree with central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  const std::vector<Potential> pots{Potential::double_well_1d(1.5), Potential::double_well_2d(1.0, 2.0),
                                    Potential::harmonic(1, 2.0), Potential::harmonic(2, 0.5),
                                    Potential::triple_well_2d()};
  for (const auto& pot : pots) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(pot.dim()), grad(pot.dim());
      for (auto& c : x) c = coord(rng);
      pot.gradient(x, grad);
      for (std::size_t a = 0; a < pot.dim(); ++a) {
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const double fd = (pot.energy(xp) - pot.energy(xm)) / (2.0 * h);
        CHECK(std::abs(fd - grad[a]) <= 1e-6 * std::max(1.0, std::abs(grad[a])));
      }
    }
  }
}

TEST_CASE("even potentials are flagged") {
  CHECK(Potential::double_well_1d().is_even());
  CHECK(Potential::harmonic(2).is_even());
  CHECK_FALSE(Potential::triple_well_2d().is_even());
}
