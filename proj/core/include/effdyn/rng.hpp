#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace effdyn {

/// Counter-based Philox4x32-10 generator (Salmon et al., Random123).
///
/// The stream is fully determined by (seed, stream id); the n-th 128-bit
/// block is philox(counter = n). Uniforms take the top 53 bits of a 64-bit
/// word and land in the open interval (0, 1). Gaussians use the Box-Muller
/// transform, consuming two uniforms per pair of normals.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  /// Raw keyed bijection; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

  result_type operator()() noexcept;
  double uniform() noexcept;
  double gaussian() noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_words_ = 0;  // remaining 64-bit words in buffer_
  double spare_gaussian_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace effdyn
