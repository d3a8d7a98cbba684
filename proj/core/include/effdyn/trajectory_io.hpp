#pragma once

#include <filesystem>
#include <string>

#include "effdyn/simulate.hpp"

namespace effdyn {

// Binary column file, all fields little-endian:
//   char[8]  magic "EFDYNTRJ"
//   u32      format version (1)
//   u32      d
//   u64      n_steps           (rows = n_steps + 1)
//   f64      dt
//   u64      lag
//   u32      has_velocities (0/1)
//   u32      reserved (0)
//   f64[rows*d] positions, row-major; then f64[rows*d] velocities if present
std::string encode_trajectory(const Trajectory& traj);
Trajectory decode_trajectory(std::string_view bytes);

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

/// One row per step: step,x0[,x1][,v0[,v1]].
std::string trajectory_csv(const Trajectory& traj);

}  // namespace effdyn
