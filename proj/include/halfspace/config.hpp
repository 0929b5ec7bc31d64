#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "halfspace/model_catalog.hpp"
#include "halfspace/penalization.hpp"

namespace halfspace {

/// Perturbation of the far-field state used as wall data.
struct WallConfig {
  double temperature = 1.1;  ///< factor on T
  double density = 0.95;     ///< factor on every species density
  double velocity = 0.05;    ///< added to the second velocity component (d >= 2)
};

struct SourceConfig {
  double rate = 1.0;
  double amplitude = 1.0;
  bool operator==(const SourceConfig&) const = default;
};

/// Run configuration. Sections: model, grid, boundary, penalty, run, output.
struct RunConfig {
  std::string preset = "monatomic";
  ModelSpec model;
  GridSpec grid;
  std::string boundary = "absorb";  ///< absorb | accommodate
  double accommodation = 0.0;
  PenaltyOptions penalty;
  std::optional<double> u;
  std::optional<std::array<double, 3>> u_range;  ///< a, b, samples
  std::string u0 = "plus";  ///< minus | zero | plus | numeric value
  double delta = 0.0;
  int samples_per_side = 9;
  bool extra_conditions = false;
  WallConfig wall;
  std::vector<SourceConfig> sources;
  std::string out_dir;
  std::string format = "json";
};

/// Model and grid defaults for a named preset: monatomic, mixture, mixture3,
/// polyatomic-discrete, polyatomic-continuous, polyatomic-mixture, fermion, boson.
RunConfig preset_config(const std::string& name);

/// Flat "section.key" -> value text.
using KeyMap = std::map<std::string, std::string>;

KeyMap read_ini(const std::string& text);
KeyMap read_json(const std::string& text);

/// Applies keys on top of the preset named by model.preset (default monatomic).
/// Unknown keys and malformed values are usage errors.
RunConfig config_from_keys(const KeyMap& keys);

RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);
KeyMap to_keys(const RunConfig& cfg);
/// Canonical JSON text (sorted keys).
std::string normalized(const RunConfig& cfg);

/// "a:b:n"
std::array<double, 3> parse_range(const std::string& text);

}  // namespace halfspace
