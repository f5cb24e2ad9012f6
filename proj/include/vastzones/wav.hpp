#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vz::wav {

struct WavData {
  std::vector<std::vector<double>> channels;  // one vector per channel, +-1.0 full scale
  double sample_rate = 0.0;
};

// Reads PCM 16-bit or IEEE float32 WAV, any channel count.
WavData read(const std::string& path);

// bits: 16 (PCM) or 32 (IEEE float). Returns the number of clipped samples.
std::size_t write(const std::string& path, const WavData& data, int bits = 16);

}  // namespace vz::wav
