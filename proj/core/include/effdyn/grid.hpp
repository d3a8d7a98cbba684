#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace effdyn {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t cells = 2;

  double width() const noexcept { return (hi - lo) / static_cast<double>(cells); }
  double center(std::size_t i) const noexcept {
    return lo + (static_cast<double>(i) + 0.5) * width();
  }

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Rectangular cell grid in one or two dimensions. Cells are numbered with
/// the first axis fastest: cell = i0 + cells0 * i1.
class Grid {
 public:
  explicit Grid(std::vector<Axis> axes);
  static Grid line(double lo, double hi, std::size_t cells);
  static Grid rect(Axis x, Axis y);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  const Axis& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }

  double cell_volume() const noexcept;
  std::vector<double> center(std::size_t cell) const;
  std::size_t axis_index(std::size_t cell, std::size_t axis) const;
  std::optional<std::size_t> locate(std::span<const double> x) const;

  /// Largest |coordinate| covered by the grid.
  double extent() const noexcept;
  /// Simulation guard radius, 10x the grid extent.
  double guard_radius() const noexcept { return 10.0 * extent(); }

  nlohmann::json to_json() const;
  static Grid from_json(const nlohmann::json& j);

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

}  // namespace effdyn
