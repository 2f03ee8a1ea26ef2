#include "qrc/serialization.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrc/error.hpp"

namespace qrc::io {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "model files assume little-endian");

namespace {

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json to_json(const qcore::CircuitLayout& layout) {
  return {{"n", layout.n_qubits},
          {"input_dim", layout.input_dim},
          {"alpha", layout.alpha},
          {"encoding_layers", layout.encoding_layers()},
          {"entangler", "full"},
          {"slot_fill", qcore::to_string(layout.fill)},
          {"angle_scale", layout.angle_scale},
          {"angle_offset", layout.angle_offset},
          {"seed", layout.seed}};
}

qcore::CircuitLayout layout_from_json(const json& j) {
  qcore::CircuitLayout layout;
  layout.n_qubits = j.at("n").get<int>();
  layout.input_dim = j.at("input_dim").get<int>();
  layout.alpha = j.at("alpha").get<std::vector<double>>();
  layout.fill = qcore::slot_fill_from_string(j.value("slot_fill", std::string("cycle")));
  layout.angle_scale = j.value("angle_scale", qcore::kDefaultAngleScale);
  layout.angle_offset = j.value("angle_offset", qcore::kDefaultAngleOffset);
  layout.seed = j.value("seed", std::uint64_t{0});
  require(j.value("entangler", std::string("full")) == "full", "only the full entangler exists");
  layout.validate();
  if (j.contains("encoding_layers"))
    require(j.at("encoding_layers").get<int>() == layout.encoding_layers(),
            "encoding_layers disagrees with n and input_dim");
  return layout;
}

json to_json(const qcore::NoiseModel& noise) {
  return {{"kind", qcore::to_string(noise.kind)},
          {"shots", noise.shots},
          {"p", noise.p},
          {"seed", noise.seed}};
}

qcore::NoiseModel noise_from_json(const json& j) {
  qcore::NoiseModel noise;
  noise.kind = qcore::noise_kind_from_string(j.value("kind", std::string("none")));
  noise.shots = j.value("shots", 1L);
  noise.p = j.value("p", 0.0);
  noise.seed = j.value("seed", std::uint64_t{0});
  noise.validate();
  return noise;
}

json to_json(const dynamics::MinMaxScaler& scaler) {
  return {{"min", vector_json(scaler.min)}, {"max", vector_json(scaler.max)}};
}

dynamics::MinMaxScaler scaler_from_json(const json& j) {
  dynamics::MinMaxScaler s{vector_from(j.at("min")), vector_from(j.at("max"))};
  require(s.min.size() == s.max.size(), "scaler min/max sizes differ");
  return s;
}

json to_json(const reservoir::ReservoirConfig& config) {
  json j{{"layout", to_json(config.layout)},
         {"epsilon", config.epsilon},
         {"variant", reservoir::to_string(config.variant)},
         {"beta_grid", config.beta_grid},
         {"noise", to_json(config.noise)}};
  if (config.recurrent()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < config.projection.rows(); ++i)
      rows.push_back(vector_json(config.projection.row(i).transpose()));
    j["projection"] = rows;
  }
  return j;
}

reservoir::ReservoirConfig reservoir_config_from_json(const json& j) {
  reservoir::ReservoirConfig c;
  c.layout = layout_from_json(j.at("layout"));
  c.epsilon = j.at("epsilon").get<double>();
  c.variant = reservoir::variant_from_string(j.value("variant", std::string("rfqrc")));
  c.beta_grid = j.value("beta_grid", c.beta_grid);
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  if (c.recurrent()) {
    const auto& rows = j.at("projection");
    c.projection.resize(static_cast<Eigen::Index>(rows.size()), c.reservoir_dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Eigen::VectorXd row = vector_from(rows[i]);
      require(row.size() == c.reservoir_dim(), "projection row has the wrong length");
      c.projection.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
  }
  c.validate();
  return c;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + target.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename onto " + target.string() + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_model(const reservoir::TrainedModel& model, const std::string& dir) {
  const Eigen::Index rows = model.w_out.rows(), cols = model.w_out.cols();
  std::string blob;
  blob.resize(static_cast<std::size_t>(rows * cols + model.final_state.size()) * sizeof(double));
  auto* out = reinterpret_cast<double*>(blob.data());
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) *out++ = model.w_out(i, k);
  for (Eigen::Index i = 0; i < model.final_state.size(); ++i) *out++ = model.final_state(i);

  const json meta{{"format", "qrc-model-1"},
                  {"config", to_json(model.config)},
                  {"scaler", to_json(model.scaler)},
                  {"beta", model.beta},
                  {"w_out", {{"rows", rows}, {"cols", cols}, {"order", "row-major"}, {"offset", 0}}},
                  {"final_state", {{"size", model.final_state.size()}, {"offset", rows * cols}}},
                  {"data", "model.bin"}};
  write_file_atomic((fs::path(dir) / "model.bin").string(), blob);
  write_file_atomic((fs::path(dir) / "model.json").string(), meta.dump(2) + "\n");
}

reservoir::TrainedModel load_model(const std::string& dir) {
  const json meta = json::parse(read_file((fs::path(dir) / "model.json").string()));
  require(meta.value("format", std::string()) == "qrc-model-1", "unrecognised model format");
  reservoir::TrainedModel model;
  model.config = reservoir_config_from_json(meta.at("config"));
  model.scaler = scaler_from_json(meta.at("scaler"));
  model.beta = meta.value("beta", 0.0);
  const auto rows = meta.at("w_out").at("rows").get<Eigen::Index>();
  const auto cols = meta.at("w_out").at("cols").get<Eigen::Index>();
  const auto size = meta.at("final_state").at("size").get<Eigen::Index>();
  const std::string blob =
      read_file((fs::path(dir) / meta.value("data", std::string("model.bin"))).string());
  if (blob.size() != static_cast<std::size_t>(rows * cols + size) * sizeof(double))
    throw Error(ErrorCode::Io, "model.bin size does not match model.json");
  const auto* in = reinterpret_cast<const double*>(blob.data());
  model.w_out.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) model.w_out(i, k) = *in++;
  model.final_state.resize(size);
  for (Eigen::Index i = 0; i < size; ++i) model.final_state(i) = *in++;
  return model;
}

}  // namespace qrc::io
