#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace effdyn::io {

/// Writes via a sibling temp file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Shortest-form-independent double formatting: %.17g, round-trips exactly.
std::string format_double(double value);

void append_u32_le(std::string& out, std::uint32_t value);
void append_u64_le(std::string& out, std::uint64_t value);
void append_f64_le(std::string& out, double value);

/// Little-endian cursor over a byte buffer; throws InputError on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string_view take(std::size_t count);
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

/// 64-bit FNV-1a, used for config fingerprints in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace effdyn::io
