#pragma once

#include <json.hpp>
#include <string>

#include "qrc/dynamics.hpp"
#include "qrc/qcore.hpp"
#include "qrc/reservoir.hpp"

namespace qrc::io {

using nlohmann::json;

json to_json(const qcore::CircuitLayout& layout);
qcore::CircuitLayout layout_from_json(const json& j);

json to_json(const qcore::NoiseModel& noise);
qcore::NoiseModel noise_from_json(const json& j);

json to_json(const dynamics::MinMaxScaler& scaler);
dynamics::MinMaxScaler scaler_from_json(const json& j);

/// Reservoir configuration; the projection (if any) is stored inline.
json to_json(const reservoir::ReservoirConfig& config);
reservoir::ReservoirConfig reservoir_config_from_json(const json& j);

/// Writes `dir/model.json` and `dir/model.bin` (W_out row-major, then the
/// final state, little-endian float64). Creates `dir` if needed.
void save_model(const reservoir::TrainedModel& model, const std::string& dir);
reservoir::TrainedModel load_model(const std::string& dir);

/// Write-to-temporary then rename, so readers never see partial files.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace qrc::io
