#include "vastzones/percept.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "vastzones/fft.hpp"

namespace vz {

namespace {

constexpr double kBandWidthBark = 0.5;
constexpr double kSlopeLowerDbPerBark = 25.0;   // toward lower frequencies
constexpr double kSlopeUpperDbPerBark = 10.0;   // toward higher frequencies
constexpr double kMaskingMarginDb = 14.0;
// Coherent gain of the sine analysis window; the model assumes its input is a
// WOLA-windowed segment.
const double kWindowGain = 2.0 / std::numbers::pi;

}  // namespace

double bark_scale(double f_hz) {
  return 13.0 * std::atan(0.00076 * f_hz) +
         3.5 * std::atan((f_hz / 7500.0) * (f_hz / 7500.0));
}

double threshold_in_quiet_db_spl(double f_hz) {
  const double f = std::max(f_hz, 20.0) / 1000.0;
  return 3.64 * std::pow(f, -0.8) - 6.5 * std::exp(-0.6 * (f - 3.3) * (f - 3.3)) +
         1e-3 * f * f * f * f;
}

MaskingCurve masking_curve(const std::vector<double>& windowed_segment, double sample_rate) {
  const std::size_t n = windowed_segment.size();
  if (n < 64 || n % 2 != 0)
    throw std::invalid_argument("masking_curve: segment length must be even and >= 64");
  if (sample_rate <= 0.0) throw std::invalid_argument("masking_curve: bad sample rate");

  const std::size_t n_bins = n / 2 + 1;
  const auto spec = fft::rfft(windowed_segment, n);

  // Full-scale-relative power: a unit-amplitude bin-centered sine maps to 0 dBFS.
  const double amp_scale = 2.0 / (static_cast<double>(n) * kWindowGain);
  std::vector<double> power(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double a = std::abs(spec[k]) * amp_scale;
    power[k] = a * a;
  }

  const double df = sample_rate / static_cast<double>(n);
  const std::size_t n_bands =
      static_cast<std::size_t>(bark_scale(sample_rate / 2.0) / kBandWidthBark) + 1;
  std::vector<std::size_t> band_of(n_bins);
  std::vector<double> band_power(n_bands, 0.0);
  for (std::size_t k = 0; k < n_bins; ++k) {
    std::size_t b = static_cast<std::size_t>(bark_scale(df * static_cast<double>(k)) /
                                             kBandWidthBark);
    if (b >= n_bands) b = n_bands - 1;
    band_of[k] = b;
    band_power[b] += power[k];
  }

  // Triangular spreading, summed in power across masker bands.
  std::vector<double> spread(n_bands, 0.0);
  for (std::size_t i = 0; i < n_bands; ++i) {
    if (band_power[i] <= 0.0) continue;
    for (std::size_t j = 0; j < n_bands; ++j) {
      const double dz = kBandWidthBark *
                        std::abs(static_cast<double>(j) - static_cast<double>(i));
      const double atten_db = (j < i ? kSlopeLowerDbPerBark : kSlopeUpperDbPerBark) * dz;
      spread[j] += band_power[i] * std::pow(10.0, -atten_db / 10.0);
    }
  }

  MaskingCurve curve;
  curve.sample_rate = sample_rate;
  curve.n_fft = n;
  curve.amplitude.resize(n_bins);
  const double margin = std::pow(10.0, -kMaskingMarginDb / 10.0);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double masked_pow = spread[band_of[k]] * margin;
    const double masked_db =
        masked_pow > 0.0 ? 10.0 * std::log10(masked_pow)
                         : -std::numeric_limits<double>::infinity();
    const double quiet_db =
        threshold_in_quiet_db_spl(df * static_cast<double>(k)) + kSplAnchorDbfs;
    curve.amplitude[k] = std::pow(10.0, std::max(masked_db, quiet_db) / 20.0);
  }
  return curve;
}

WeightingFilter weighting_filter(const MaskingCurve& curve, std::size_t n_taps) {
  const std::size_t n = curve.n_fft;
  if (n_taps > n) throw std::invalid_argument("weighting_filter: n_taps exceeds FFT length");
  if (n_taps < 1 || n_taps % 2 == 0)
    throw std::invalid_argument("weighting_filter: n_taps must be odd");
  if (curve.amplitude.size() != n / 2 + 1)
    throw std::invalid_argument("weighting_filter: malformed curve");

  std::vector<std::complex<double>> target(n / 2 + 1);
  double peak = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (curve.amplitude[k] <= 0.0)
      throw std::invalid_argument("weighting_filter: curve must be strictly positive");
    peak = std::max(peak, 1.0 / curve.amplitude[k]);
  }
  for (std::size_t k = 0; k < target.size(); ++k)
    target[k] = 1.0 / curve.amplitude[k] / peak;

  // Zero-phase impulse response, rotated to causal and tapered.
  const auto h0 = fft::irfft(target, n);
  WeightingFilter w;
  w.taps.resize(n_taps);
  const std::size_t center = n / 2;
  const std::size_t half = (n_taps - 1) / 2;
  for (std::size_t t = 0; t < n_taps; ++t) {
    const std::size_t src = (center - half + t + n / 2) % n;  // h0 index after rotation
    const double taper =
        n_taps == 1 ? 1.0
                    : 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) /
                                           static_cast<double>(n_taps - 1));
    w.taps[t] = h0[src] * taper;
  }
  return w;
}

MaskingCurve averaged_masking_curve(const std::vector<MaskingCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("averaged_masking_curve: empty list");
  const std::size_t n_bins = curves[0].amplitude.size();
  MaskingCurve avg;
  avg.sample_rate = curves[0].sample_rate;
  avg.n_fft = curves[0].n_fft;
  avg.amplitude.assign(n_bins, 0.0);
  for (const auto& c : curves) {
    if (c.amplitude.size() != n_bins)
      throw std::invalid_argument("averaged_masking_curve: bin count mismatch");
    for (std::size_t k = 0; k < n_bins; ++k)
      avg.amplitude[k] += c.amplitude[k] * c.amplitude[k];
  }
  for (std::size_t k = 0; k < n_bins; ++k)
    avg.amplitude[k] = std::sqrt(avg.amplitude[k] / static_cast<double>(curves.size()));
  return avg;
}

void write_masking_csv(const std::string& path, const std::vector<MaskingCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("masking: cannot open " + path);
  out << "curve,segment,bin_freq_hz,threshold_db\n";
  char buf[128];
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c];
    const double df = curve.sample_rate / static_cast<double>(curve.n_fft);
    for (std::size_t k = 0; k < curve.amplitude.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.12g,%.12g\n", c, curve.segment_index,
                    df * static_cast<double>(k),
                    20.0 * std::log10(curve.amplitude[k]));
      out << buf;
    }
  }
}

}  // namespace vz
