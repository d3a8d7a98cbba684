#include "effdyn/cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "effdyn/error.hpp"

namespace effdyn {

CVAssignment::CVAssignment(std::vector<std::size_t> bin_of, std::size_t k, nlohmann::json provenance)
    : bin_of_(std::move(bin_of)), k_(k), provenance_(std::move(provenance)) {
  if (bin_of_.empty()) throw AssignmentError("CV assignment over zero states");
  if (k_ == 0) throw AssignmentError("CV assignment needs at least one bin");
  fibers_.assign(k_, {});
  position_.resize(bin_of_.size());
  for (std::size_t x = 0; x < bin_of_.size(); ++x) {
    if (bin_of_[x] >= k_) {
      throw AssignmentError("state " + std::to_string(x) + " maps to bin " +
                            std::to_string(bin_of_[x]) + " outside 0.." + std::to_string(k_ - 1));
    }
    position_[x] = fibers_[bin_of_[x]].size();
    fibers_[bin_of_[x]].push_back(x);
  }
  for (std::size_t z = 0; z < k_; ++z) {
    if (fibers_[z].empty()) throw AssignmentError("bin " + std::to_string(z) + " has an empty fiber");
  }
}

CVAssignment CVAssignment::identity(std::size_t n) {
  std::vector<std::size_t> bins(n);
  for (std::size_t i = 0; i < n; ++i) bins[i] = i;
  return CVAssignment(std::move(bins), n, {{"kind", "identity"}});
}

CVAssignment CVAssignment::single_bin(std::size_t n) {
  return CVAssignment(std::vector<std::size_t>(n, 0), 1, {{"kind", "single-bin"}});
}

CVAssignment CVAssignment::from_labels(std::span<const std::size_t> labels, nlohmann::json provenance) {
  std::map<std::size_t, std::size_t> relabel;
  for (auto l : labels) relabel.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, index] : relabel) index = next++;
  std::vector<std::size_t> bins(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) bins[i] = relabel.at(labels[i]);
  return CVAssignment(std::move(bins), relabel.size(), std::move(provenance));
}

namespace {

CVAssignment bin_projection(const Grid& grid, std::span<const std::size_t> cells,
                            const std::vector<double>& direction, std::size_t bins,
                            nlohmann::json provenance) {
  if (bins < 1) throw ConfigError("CV bin count must be positive");
  if (direction.size() != grid.dim()) throw ConfigError("CV direction does not match grid dimension");
  auto project = [&](std::size_t cell) {
    const auto c = grid.center(cell);
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * direction[k];
    return s;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const double s = project(cell);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<std::size_t> raw(cells.size());
  std::vector<bool> used(bins, false);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((project(cells[i]) - lo) / width) : 0;
    raw[i] = std::min(b, bins - 1);
    used[raw[i]] = true;
  }

  // Empty bins hold no states, so merging them into the nearest nonempty
  // neighbour amounts to renumbering the nonempty bins consecutively.
  nlohmann::json merged = nlohmann::json::array();
  std::vector<std::size_t> remap(bins, 0);
  std::size_t next = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (used[b]) {
      remap[b] = next++;
    } else {
      merged.push_back(b);
    }
  }
  for (auto& r : raw) r = remap[r];
  provenance["requested_bins"] = bins;
  provenance["bin_lo"] = lo;
  provenance["bin_width"] = width;
  provenance["merged_empty_bins"] = merged;
  return CVAssignment(std::move(raw), next, std::move(provenance));
}

}  // namespace

CVAssignment CVAssignment::linear_angle(const Grid& grid, std::span<const std::size_t> cells,
                                        double theta, std::size_t bins) {
  if (grid.dim() != 2) throw ConfigError("linear-angle CVs need a 2D grid");
  return bin_projection(grid, cells, {std::cos(theta), std::sin(theta)}, bins,
                        {{"kind", "linear-angle-2d"}, {"theta", theta}});
}

CVAssignment CVAssignment::coordinate(const Grid& grid, std::span<const std::size_t> cells,
                                      std::size_t axis, std::size_t bins) {
  if (axis >= grid.dim()) throw ConfigError("coordinate CV axis out of range");
  std::vector<double> dir(grid.dim(), 0.0);
  dir[axis] = 1.0;
  return bin_projection(grid, cells, dir, bins, {{"kind", "coordinate"}, {"axis", axis}});
}

nlohmann::json CVAssignment::to_json() const {
  return {{"k", k_}, {"bin_of", bin_of_}, {"provenance", provenance_}};
}

CVAssignment CVAssignment::from_json(const nlohmann::json& j) {
  try {
    auto bins = j.at("bin_of").get<std::vector<std::size_t>>();
    std::size_t k = j.contains("k") ? j.at("k").get<std::size_t>()
                                    : (bins.empty() ? 0 : *std::max_element(bins.begin(), bins.end()) + 1);
    return CVAssignment(std::move(bins), k, j.value("provenance", nlohmann::json::object()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("CV assignment: ") + e.what());
  }
}

CVAssignment compose(const CVAssignment& coarse, const CVAssignment& fine) {
  if (coarse.n() != fine.k()) {
    throw AssignmentError("compose: coarse map is defined on " + std::to_string(coarse.n()) +
                          " bins but the fine CV has " + std::to_string(fine.k()));
  }
  std::vector<std::size_t> bins(fine.n());
  for (std::size_t x = 0; x < fine.n(); ++x) bins[x] = coarse(fine(x));
  return CVAssignment(std::move(bins), coarse.k(),
                      {{"kind", "composed"}, {"fine", fine.provenance()}, {"coarse", coarse.provenance()}});
}

}  // namespace effdyn
