#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vz {

struct MaskingCurve {
  std::vector<double> amplitude;  // linear, full-scale relative, N/2+1 bins
  double sample_rate = 0.0;
  std::size_t n_fft = 0;
  std::size_t segment_index = 0;
};

struct WeightingFilter {
  std::vector<double> taps;
  std::size_t point = 0;
  std::size_t segment = 0;
};

// Simplified Bark-domain masking model: windowed-segment power spectrum,
// 0.5-Bark band integration, triangular spreading (+25/-10 dB per Bark),
// -14 dB margin, floored at the threshold in quiet.
MaskingCurve masking_curve(const std::vector<double>& windowed_segment, double sample_rate);

// Linear-phase FIR whose magnitude tracks 1/curve, normalized to peak 1.
// n_taps must be odd and <= the curve's FFT length.
WeightingFilter weighting_filter(const MaskingCurve& curve, std::size_t n_taps);

// Per-bin power mean.
MaskingCurve averaged_masking_curve(const std::vector<MaskingCurve>& curves);

// Terhardt approximation in dB SPL; f floored at 20 Hz.
double threshold_in_quiet_db_spl(double f_hz);

double bark_scale(double f_hz);

// 0 dB SPL anchored at -96 dBFS.
constexpr double kSplAnchorDbfs = -96.0;

void write_masking_csv(const std::string& path, const std::vector<MaskingCurve>& curves);

}  // namespace vz
