#include "effdyn/statistics.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "effdyn/error.hpp"

namespace effdyn {

Estimate batch_means(std::span<const double> samples, std::size_t batches) {
  if (samples.empty()) throw InputError("batch_means: no samples");
  if (batches < 2) throw InputError("batch_means: need at least two batches");
  Estimate est;
  est.value = std::accumulate(samples.begin(), samples.end(), 0.0) /
              static_cast<double>(samples.size());
  const std::size_t per = samples.size() / batches;
  if (per == 0) {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    auto first = samples.begin() + static_cast<std::ptrdiff_t>(b * per);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(per), 0.0) /
               static_cast<double>(per);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  est.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  return est;
}

}  // namespace effdyn
