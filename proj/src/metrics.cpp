#include "vastzones/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace vz {

namespace {

double window_energy(const std::vector<double>& s, const ObservationWindow& w) {
  double e = 0.0;
  const std::size_t end = std::min(w.end, s.size());
  for (std::size_t n = w.begin; n < end; ++n) e += s[n] * s[n];
  return e;
}

}  // namespace

double acoustic_contrast_db(const std::vector<std::vector<double>>& bright,
                            const std::vector<std::vector<double>>& dark,
                            const ObservationWindow& w) {
  if (w.length() == 0) throw std::invalid_argument("acoustic_contrast_db: empty window");
  if (bright.empty() || dark.empty())
    throw std::invalid_argument("acoustic_contrast_db: empty zone");
  double eb = 0.0, ed = 0.0;
  for (const auto& s : bright) eb += window_energy(s, w);
  for (const auto& s : dark) ed += window_energy(s, w);
  if (ed <= 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = static_cast<double>(dark.size()) / static_cast<double>(bright.size());
  return 10.0 * std::log10(ratio * eb / ed);
}

double nsdp_db(const std::vector<double>& p, const std::vector<double>& d,
               const ObservationWindow& w) {
  if (w.length() == 0) throw std::invalid_argument("nsdp_db: empty window");
  const double e_d = window_energy(d, w);
  if (e_d <= 0.0) throw std::invalid_argument("nsdp_db: zero desired energy at point");
  double e_err = 0.0;
  const std::size_t end = std::min({w.end, p.size(), d.size()});
  for (std::size_t n = w.begin; n < end; ++n) {
    const double e = p[n] - d[n];
    e_err += e * e;
  }
  if (e_err <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(e_err / e_d);
}

double tir_db(const std::vector<double>& target, const std::vector<double>& interferer,
              const ObservationWindow& w) {
  if (w.length() == 0) throw std::invalid_argument("tir_db: empty window");
  const double e_i = window_energy(interferer, w);
  if (e_i <= 0.0) return std::numeric_limits<double>::infinity();
  const double e_t = window_energy(target, w);
  if (e_t <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(e_t / e_i);
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate agg;
  double sum = 0.0;
  std::vector<double> kept;
  kept.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++agg.excluded;
      continue;
    }
    kept.push_back(v);
    sum += v;
  }
  agg.n = kept.size();
  if (agg.n == 0) return agg;
  agg.mean = sum / static_cast<double>(agg.n);
  if (agg.n >= 2) {
    double ss = 0.0;
    for (double v : kept) ss += (v - agg.mean) * (v - agg.mean);
    const double sample_std = std::sqrt(ss / static_cast<double>(agg.n - 1));
    agg.ci_half = 1.96 * sample_std / std::sqrt(static_cast<double>(agg.n));
    agg.has_ci = true;
  }
  return agg;
}

double clamp_db(double v) {
  if (std::isnan(v)) return v;
  if (v > kDbSentinel) return kDbSentinel;
  if (v < -kDbSentinel) return -kDbSentinel;
  return v;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("metrics: cannot open " + path);
  out << "method,zone,signal,metric,mean,ci_half_width,n_points\n";
  char buf[256];
  for (const MetricRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%s,%.12g,%.12g,%zu\n", r.method.c_str(),
                  r.zone.c_str(), r.signal.c_str(), r.metric.c_str(), clamp_db(r.mean),
                  r.ci_half, r.n_points);
    out << buf;
  }
}

}  // namespace vz
