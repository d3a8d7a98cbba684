#include "effdyn/model_io.hpp"

#include "effdyn/error.hpp"
#include "effdyn/io_util.hpp"

namespace effdyn {

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

EncodedModel encode_model(const TransitionModel& model, const std::string& matrix_file) {
  const auto n = static_cast<Eigen::Index>(model.size());
  nlohmann::json header;
  header["format"] = "effdyn-transition-model";
  header["version"] = 1;
  header["n"] = model.size();
  header["lag"] = model.lag();
  header["source"] = to_string(model.source());
  header["matrix_file"] = matrix_file;
  header["has_counts"] = model.counts().has_value();
  header["mu"] = std::vector<double>(model.mu().data(), model.mu().data() + n);
  if (model.states()) {
    header["labels"] = model.states()->labels;
    if (model.states()->grid) header["grid"] = model.states()->grid->to_json();
  }

  EncodedModel out{std::move(header), {}};
  out.matrix_bytes.reserve(static_cast<std::size_t>(8 * n * n * (model.counts() ? 2 : 1)));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) io::append_f64_le(out.matrix_bytes, model.P()(i, j));
  }
  if (model.counts()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) io::append_f64_le(out.matrix_bytes, (*model.counts())(i, j));
    }
  }
  return out;
}

TransitionModel decode_model(const nlohmann::json& header, std::string_view matrix_bytes) {
  try {
    if (header.at("format") != "effdyn-transition-model") throw InputError("not a transition model header");
    if (header.at("version") != 1) throw InputError("unsupported transition model version");
    const auto n = header.at("n").get<Eigen::Index>();
    const bool has_counts = header.value("has_counts", false);
    io::ByteReader in(matrix_bytes);
    if (in.remaining() != static_cast<std::size_t>(8 * n * n * (has_counts ? 2 : 1))) {
      throw InputError("matrix file size does not match header");
    }
    Matrix P(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) P(i, j) = in.f64();
    }
    const auto mu_values = header.at("mu").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(mu_values.size()) != n) throw InputError("mu length mismatch");
    Vector mu = Eigen::Map<const Vector>(mu_values.data(), n);

    std::optional<StateMap> states;
    if (header.contains("labels")) {
      StateMap map{header.at("labels").get<std::vector<std::size_t>>(), std::nullopt};
      if (header.contains("grid")) map.grid = Grid::from_json(header.at("grid"));
      states = std::move(map);
    }
    auto model = TransitionModel::from_matrix_and_mu(
        std::move(P), std::move(mu), header.at("lag").get<double>(),
        model_source_from_string(header.at("source").get<std::string>()), std::move(states));
    if (has_counts) {
      Matrix C(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) C(i, j) = in.f64();
      }
      model = model.with_counts(std::move(C));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("transition model header: ") + e.what());
  }
}

void save_model(const std::filesystem::path& dir, const std::string& stem,
                const TransitionModel& model) {
  auto encoded = encode_model(model, stem + ".bin");
  io::write_file_atomic(dir / (stem + ".bin"), encoded.matrix_bytes);
  io::write_file_atomic(dir / (stem + ".json"), dump_json(encoded.header));
}

TransitionModel load_model(const std::filesystem::path& header_path) {
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(io::read_file(header_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("cannot parse model header: ") + e.what());
  }
  const auto matrix_path = header_path.parent_path() / header.value("matrix_file", "");
  return decode_model(header, io::read_file(matrix_path));
}

std::string mu_csv(const TransitionModel& model) {
  std::string out = "state,label,mu\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    const std::size_t label = model.states() ? model.states()->labels[i] : i;
    out += std::to_string(i) + ',' + std::to_string(label) + ',' +
           io::format_double(model.mu()(static_cast<Eigen::Index>(i))) + '\n';
  }
  return out;
}

}  // namespace effdyn
