#pragma once

#include <string>
#include <vector>

#include "qrc/harness.hpp"

namespace qrc::harness {

struct Preset {
  std::string name;
  std::string description;
  /// Long-running; only executed with --extended.
  bool extended = false;
  ExperimentConfig config;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

}  // namespace qrc::harness
