#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vastzones/config.hpp"
#include "vastzones/room.hpp"
#include "vastzones/signal.hpp"

namespace vz {

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> emitted;  // paths, relative to the output directory
  std::vector<std::string> errors;   // recorded per-stage failures
};

RunResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

// Content hash over room, scene, tap count and image order; names cache files.
std::string rir_cache_key(const RoomSpec& room, const SceneGeometry& scene,
                          std::size_t k_taps, int max_order);

// Obtains RIRs for the scene, consulting the VASTZONES_CACHE directory when set.
RIRSet obtain_rirs(const ExperimentConfig& cfg, bool* cache_hit = nullptr);

// Deterministic signal synthesis; `seed` is ignored for WAV input.
AudioSignal synthesize_signal(const SignalSpec& spec, double sample_rate,
                              std::uint64_t seed);

}  // namespace vz
