#pragma once

#include <cstddef>
#include <span>

namespace effdyn {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Mean with a batch-means standard error (contiguous, equal-sized batches;
/// a remainder shorter than one batch is folded into the mean only).
Estimate batch_means(std::span<const double> samples, std::size_t batches = 20);

}  // namespace effdyn
