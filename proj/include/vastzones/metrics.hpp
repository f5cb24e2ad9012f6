#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vz {

struct ObservationWindow {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  std::size_t length() const { return end > begin ? end - begin : 0; }
};

// dB sentinels are +-infinity in memory and clamp to +-200 dB in CSV output.
constexpr double kDbSentinel = 200.0;

// Eq. 30 with the M_D/M_B normalization; bright/dark are per-point series.
double acoustic_contrast_db(const std::vector<std::vector<double>>& bright,
                            const std::vector<std::vector<double>>& dark,
                            const ObservationWindow& w);

// Eq. 31 at one point.
double nsdp_db(const std::vector<double>& p, const std::vector<double>& d,
               const ObservationWindow& w);

// Eq. 32 at one point: target program energy vs interferer leakage.
double tir_db(const std::vector<double>& target, const std::vector<double>& interferer,
              const ObservationWindow& w);

struct Aggregate {
  double mean = 0.0;
  double ci_half = 0.0;  // 1.96 * sample std / sqrt(n); 0 when n < 2
  std::size_t n = 0;
  std::size_t excluded = 0;  // non-finite sentinels dropped
  bool has_ci = false;
};

Aggregate aggregate(const std::vector<double>& values);

struct MetricRow {
  std::string method, zone, signal, metric;
  double mean = 0.0;
  double ci_half = 0.0;
  std::size_t n_points = 0;
};

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows);

double clamp_db(double v);

}  // namespace vz
