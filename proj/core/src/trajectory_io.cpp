#include "effdyn/trajectory_io.hpp"

#include "effdyn/error.hpp"
#include "effdyn/io_util.hpp"

namespace effdyn {

namespace {
constexpr std::string_view kMagic = "EFDYNTRJ";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string encode_trajectory(const Trajectory& traj) {
  std::string out(kMagic);
  io::append_u32_le(out, kVersion);
  io::append_u32_le(out, static_cast<std::uint32_t>(traj.dim));
  io::append_u64_le(out, traj.n_steps());
  io::append_f64_le(out, traj.dt);
  io::append_u64_le(out, traj.lag);
  io::append_u32_le(out, traj.has_velocities() ? 1u : 0u);
  io::append_u32_le(out, 0u);
  out.reserve(out.size() + 8 * (traj.positions.size() + traj.velocities.size()));
  for (double v : traj.positions) io::append_f64_le(out, v);
  for (double v : traj.velocities) io::append_f64_le(out, v);
  return out;
}

Trajectory decode_trajectory(std::string_view bytes) {
  io::ByteReader in(bytes);
  if (in.take(kMagic.size()) != kMagic) throw InputError("not an effdyn trajectory file");
  if (in.u32() != kVersion) throw InputError("unsupported trajectory file version");
  Trajectory traj;
  traj.dim = in.u32();
  const std::uint64_t rows = in.u64() + 1;
  traj.dt = in.f64();
  traj.lag = in.u64();
  const bool has_v = in.u32() != 0;
  in.u32();
  if (traj.dim == 0) throw InputError("trajectory dimension is zero");
  const std::size_t count = rows * traj.dim;
  if (in.remaining() != count * 8 * (has_v ? 2 : 1)) {
    throw InputError("trajectory payload size does not match header");
  }
  traj.positions.resize(count);
  for (auto& v : traj.positions) v = in.f64();
  if (has_v) {
    traj.velocities.resize(count);
    for (auto& v : traj.velocities) v = in.f64();
  }
  return traj;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  io::write_file_atomic(path, encode_trajectory(traj));
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  return decode_trajectory(io::read_file(path));
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "step";
  for (std::size_t i = 0; i < traj.dim; ++i) out += ",x" + std::to_string(i);
  if (traj.has_velocities()) {
    for (std::size_t i = 0; i < traj.dim; ++i) out += ",v" + std::to_string(i);
  }
  out += '\n';
  for (std::size_t n = 0; n < traj.length(); ++n) {
    out += std::to_string(n * traj.lag);
    for (double x : traj.position(n)) out += ',' + io::format_double(x);
    if (traj.has_velocities()) {
      for (double v : traj.velocity(n)) out += ',' + io::format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace effdyn
