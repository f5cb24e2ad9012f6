#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vastzones/pipeline.hpp"
#include "vastzones/room.hpp"

namespace vz {

struct SignalSpec {
  enum class Kind { wav, noise, tone };
  Kind kind = Kind::noise;
  std::string path;
  double seconds = 6.0;
  double freq_hz = 0.0;
};

struct ExperimentConfig {
  RoomSpec room;
  SceneGeometry scene;
  std::size_t k_taps = 3200;
  int max_order = 10;

  SignalSpec sig_alpha, sig_beta;
  bool calibrate_energy = true;

  ScenarioConfig scenario;
  bool metric_on_monitor = true;

  bool has_sweep = false;
  std::vector<std::size_t> v_grid;  // empty means the default 18-point grid
  std::vector<double> mu_grid;

  std::string out_dir = "out";
  std::uint64_t seed = 1;

  std::string source_name;  // for error context
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Overrides use dotted paths, e.g. "method.mu=0.5"; they append to the
// section, and the last occurrence of a scalar key wins.
ExperimentConfig parse_config_file(const std::string& path,
                                   const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_text(const std::string& text, const std::string& name,
                                   const std::vector<std::string>& overrides = {});

struct Finding {
  bool error = false;
  std::string message;
};

std::vector<Finding> validate_config(const ExperimentConfig& cfg);

}  // namespace vz
