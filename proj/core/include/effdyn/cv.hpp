#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "effdyn/grid.hpp"
#include "effdyn/types.hpp"

namespace effdyn {

/// Surjective map xi from n states onto bins {0, ..., k-1}; fibers are the
/// preimages xi^{-1}(z), listed in increasing state order.
class CVAssignment {
 public:
  /// Throws AssignmentError unless every bin in 0..k-1 is hit.
  CVAssignment(std::vector<std::size_t> bin_of, std::size_t k,
               nlohmann::json provenance = nlohmann::json::object());

  static CVAssignment identity(std::size_t n);
  static CVAssignment single_bin(std::size_t n);
  /// Relabels the distinct values of `labels` to 0..k-1 in increasing order.
  static CVAssignment from_labels(std::span<const std::size_t> labels,
                                  nlohmann::json provenance = nlohmann::json::object());

  /// xi_theta(x) = x . (cos theta, sin theta) on the 2D grid cell centers of
  /// `cells`, cut into `bins` uniform bins over the projected range of all
  /// grid centers. Bins left empty are merged into their nearest nonempty
  /// neighbour; the merge is recorded in the provenance.
  static CVAssignment linear_angle(const Grid& grid, std::span<const std::size_t> cells,
                                   double theta, std::size_t bins);
  /// Uniform bins along one grid axis.
  static CVAssignment coordinate(const Grid& grid, std::span<const std::size_t> cells,
                                 std::size_t axis, std::size_t bins);

  std::size_t n() const noexcept { return bin_of_.size(); }
  std::size_t k() const noexcept { return k_; }
  std::size_t operator()(std::size_t state) const { return bin_of_.at(state); }
  const std::vector<std::size_t>& bin_of() const noexcept { return bin_of_; }
  const std::vector<std::size_t>& fiber(std::size_t z) const { return fibers_.at(z); }
  const std::vector<std::vector<std::size_t>>& fibers() const noexcept { return fibers_; }
  /// Position of `state` inside its fiber list.
  std::size_t position_in_fiber(std::size_t state) const { return position_.at(state); }
  const nlohmann::json& provenance() const noexcept { return provenance_; }

  nlohmann::json to_json() const;
  static CVAssignment from_json(const nlohmann::json& j);

 private:
  std::vector<std::size_t> bin_of_;
  std::size_t k_;
  std::vector<std::vector<std::size_t>> fibers_;
  std::vector<std::size_t> position_;
  nlohmann::json provenance_;
};

/// (coarse o fine)(x) = coarse(fine(x)); coarse must be defined on fine's bins.
CVAssignment compose(const CVAssignment& coarse, const CVAssignment& fine);

}  // namespace effdyn
