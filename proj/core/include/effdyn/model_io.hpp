#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "effdyn/transition_model.hpp"

namespace effdyn {

/// On-disk form of a TransitionModel: a JSON header (grid, lag, source, mu,
/// state labels) plus a binary file holding P row-major as little-endian
/// float64, followed by the count matrix when the model carries one.
struct EncodedModel {
  nlohmann::json header;
  std::string matrix_bytes;
};

EncodedModel encode_model(const TransitionModel& model, const std::string& matrix_file);
TransitionModel decode_model(const nlohmann::json& header, std::string_view matrix_bytes);

/// Writes <dir>/<stem>.json and <dir>/<stem>.bin.
void save_model(const std::filesystem::path& dir, const std::string& stem,
                const TransitionModel& model);
/// Reads a header written by save_model; the matrix file is resolved relative to it.
TransitionModel load_model(const std::filesystem::path& header_path);

/// "state,label,mu" rows.
std::string mu_csv(const TransitionModel& model);

/// Header text exactly as save_model writes it.
std::string dump_json(const nlohmann::json& j);

}  // namespace effdyn
