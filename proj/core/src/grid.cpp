#include "effdyn/grid.hpp"

#include <cmath>

#include "effdyn/error.hpp"

namespace effdyn {

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2) throw ConfigError("grid dimension must be 1 or 2");
  size_ = 1;
  for (const auto& a : axes_) {
    if (a.cells < 2) throw ConfigError("grid axes need at least 2 cells");
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi)) {
      throw ConfigError("grid axis extent must be finite with lo < hi");
    }
    size_ *= a.cells;
  }
}

Grid Grid::line(double lo, double hi, std::size_t cells) { return Grid({Axis{lo, hi, cells}}); }

Grid Grid::rect(Axis x, Axis y) { return Grid({x, y}); }

double Grid::cell_volume() const noexcept {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.width();
  return v;
}

std::size_t Grid::axis_index(std::size_t cell, std::size_t axis) const {
  if (axis == 0) return cell % axes_[0].cells;
  return cell / axes_[0].cells;
}

std::vector<double> Grid::center(std::size_t cell) const {
  std::vector<double> c(dim());
  for (std::size_t k = 0; k < dim(); ++k) c[k] = axes_[k].center(axis_index(cell, k));
  return c;
}

std::optional<std::size_t> Grid::locate(std::span<const double> x) const {
  if (x.size() != dim()) throw InputError("grid: point dimension mismatch");
  std::size_t cell = 0;
  std::size_t stride = 1;
  for (std::size_t k = 0; k < dim(); ++k) {
    const Axis& a = axes_[k];
    if (!(x[k] >= a.lo && x[k] <= a.hi)) return std::nullopt;
    auto i = static_cast<std::size_t>((x[k] - a.lo) / a.width());
    if (i >= a.cells) i = a.cells - 1;
    cell += i * stride;
    stride *= a.cells;
  }
  return cell;
}

double Grid::extent() const noexcept {
  double e = 0.0;
  for (const auto& a : axes_) e = std::max({e, std::abs(a.lo), std::abs(a.hi)});
  return e;
}

nlohmann::json Grid::to_json() const {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : axes_) axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"cells", a.cells}});
  return {{"axes", axes}};
}

Grid Grid::from_json(const nlohmann::json& j) {
  try {
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes")) {
      axes.push_back({a.at("lo").get<double>(), a.at("hi").get<double>(),
                      a.at("cells").get<std::size_t>()});
    }
    return Grid(std::move(axes));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

}  // namespace effdyn
