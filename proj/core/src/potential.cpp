#include "effdyn/potential.hpp"

#include <cmath>

#include "effdyn/error.hpp"

namespace effdyn {

namespace {

void check_dim(const Potential& pot, std::size_t got) {
  if (got != pot.dim()) {
    throw InputError(pot.name() + ": expected a point of dimension " + std::to_string(pot.dim()) +
                     ", got " + std::to_string(got));
  }
}

// Gaussian bump A exp(-(x-cx)^2 - (y-cy)^2) and its gradient contribution.
inline double bump(double amp, double cx, double cy, double x, double y, double& gx, double& gy) {
  const double dx = x - cx;
  const double dy = y - cy;
  const double value = amp * std::exp(-dx * dx - dy * dy);
  gx += -2.0 * dx * value;
  gy += -2.0 * dy * value;
  return value;
}

}  // namespace

Potential Potential::double_well_1d(double barrier) {
  return Potential(PotentialKind::DoubleWell1d, 1, {barrier});
}

Potential Potential::double_well_2d(double barrier, double transverse) {
  return Potential(PotentialKind::DoubleWell2d, 2, {barrier, transverse});
}

Potential Potential::harmonic(std::size_t dim, double stiffness) {
  if (dim != 1 && dim != 2) throw ConfigError("harmonic potential supports d = 1 or 2");
  return Potential(PotentialKind::Harmonic, dim, {stiffness});
}

Potential Potential::triple_well_2d() { return Potential(PotentialKind::TripleWell2d, 2, {}); }

Potential Potential::from_name(std::string_view kind, const std::vector<double>& params,
                               std::size_t dim) {
  auto need = [&](std::size_t count) {
    if (!params.empty() && params.size() != count) {
      throw ConfigError(std::string(kind) + " takes " + std::to_string(count) + " parameter(s)");
    }
  };
  if (kind == "double-well-1d") {
    need(1);
    return params.empty() ? double_well_1d() : double_well_1d(params[0]);
  }
  if (kind == "double-well-2d") {
    need(2);
    return params.empty() ? double_well_2d() : double_well_2d(params[0], params[1]);
  }
  if (kind == "harmonic") {
    need(1);
    return params.empty() ? harmonic(dim) : harmonic(dim, params[0]);
  }
  if (kind == "triple-well-2d") {
    need(0);
    return triple_well_2d();
  }
  throw ConfigError("unknown potential kind '" + std::string(kind) + "'");
}

std::string Potential::name() const {
  switch (kind_) {
    case PotentialKind::DoubleWell1d: return "double-well-1d";
    case PotentialKind::DoubleWell2d: return "double-well-2d";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::TripleWell2d: return "triple-well-2d";
  }
  return "unknown";
}

bool Potential::is_even() const noexcept { return kind_ != PotentialKind::TripleWell2d; }

double Potential::energy(std::span<const double> x) const {
  check_dim(*this, x.size());
  switch (kind_) {
    case PotentialKind::DoubleWell1d: {
      const double s = x[0] * x[0] - 1.0;
      return params_[0] * s * s;
    }
    case PotentialKind::DoubleWell2d: {
      const double s = x[0] * x[0] - 1.0;
      return params_[0] * s * s + params_[1] * x[1] * x[1];
    }
    case PotentialKind::Harmonic: {
      double r2 = 0.0;
      for (double xi : x) r2 += xi * xi;
      return 0.5 * params_[0] * r2;
    }
    case PotentialKind::TripleWell2d: {
      double gx = 0.0, gy = 0.0;
      const double a = x[0], b = x[1];
      const double y1 = b - 1.0 / 3.0;
      return bump(3.0, 0.0, 1.0 / 3.0, a, b, gx, gy) - bump(3.0, 0.0, 5.0 / 3.0, a, b, gx, gy) -
             bump(5.0, 1.0, 0.0, a, b, gx, gy) - bump(5.0, -1.0, 0.0, a, b, gx, gy) +
             0.2 * a * a * a * a + 0.2 * y1 * y1 * y1 * y1;
    }
  }
  throw ConfigError("unknown potential kind");
}

void Potential::gradient(std::span<const double> x, std::span<double> grad) const {
  check_dim(*this, x.size());
  check_dim(*this, grad.size());
  switch (kind_) {
    case PotentialKind::DoubleWell1d:
      grad[0] = 4.0 * params_[0] * x[0] * (x[0] * x[0] - 1.0);
      return;
    case PotentialKind::DoubleWell2d:
      grad[0] = 4.0 * params_[0] * x[0] * (x[0] * x[0] - 1.0);
      grad[1] = 2.0 * params_[1] * x[1];
      return;
    case PotentialKind::Harmonic:
      for (std::size_t i = 0; i < x.size(); ++i) grad[i] = params_[0] * x[i];
      return;
    case PotentialKind::TripleWell2d: {
      const double a = x[0], b = x[1];
      double gx = 0.0, gy = 0.0;
      double nx = 0.0, ny = 0.0;  // gradients of the subtracted wells
      bump(3.0, 0.0, 1.0 / 3.0, a, b, gx, gy);
      bump(3.0, 0.0, 5.0 / 3.0, a, b, nx, ny);
      bump(5.0, 1.0, 0.0, a, b, nx, ny);
      bump(5.0, -1.0, 0.0, a, b, nx, ny);
      const double y1 = b - 1.0 / 3.0;
      grad[0] = gx - nx + 0.8 * a * a * a;
      grad[1] = gy - ny + 0.8 * y1 * y1 * y1;
      return;
    }
  }
}

double eval_potential(const Potential& pot, std::span<const double> x) {
  for (double xi : x) {
    if (!std::isfinite(xi)) throw InputError("eval_potential: non-finite coordinate");
  }
  return pot.energy(x);
}

}  // namespace effdyn
