#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace effdyn {

enum class PotentialKind { DoubleWell1d, DoubleWell2d, Harmonic, TripleWell2d };

/// Analytic test potentials driving the toy dynamics.
///
///   double-well-1d   V(x)   = a (x^2 - 1)^2                      params {a}
///   double-well-2d   V(x,y) = a (x^2 - 1)^2 + c y^2              params {a, c}
///   harmonic         V(x)   = k |x|^2 / 2   (d = 1 or 2)         params {k}
///   triple-well-2d   Metzner-Schuette-Vanden-Eijnden three-well  params {}
class Potential {
 public:
  static Potential double_well_1d(double barrier = 1.0);
  static Potential double_well_2d(double barrier = 1.0, double transverse = 2.0);
  static Potential harmonic(std::size_t dim = 1, double stiffness = 1.0);
  static Potential triple_well_2d();

  /// Builds a potential from its configuration name. Empty params select the
  /// defaults above; dim is only consulted for the harmonic kind.
  static Potential from_name(std::string_view kind, const std::vector<double>& params,
                             std::size_t dim = 1);

  PotentialKind kind() const noexcept { return kind_; }
  std::string name() const;
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  /// True when V(-x) = V(x) holds for every x.
  bool is_even() const noexcept;

  double energy(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> grad) const;

 private:
  Potential(PotentialKind kind, std::size_t dim, std::vector<double> params)
      : kind_(kind), dim_(dim), params_(std::move(params)) {}

  PotentialKind kind_;
  std::size_t dim_;
  std::vector<double> params_;
};

double eval_potential(const Potential& pot, std::span<const double> x);

}  // namespace effdyn
