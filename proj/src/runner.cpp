#include "vastzones/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vastzones/metrics.hpp"
#include "vastzones/percept.hpp"
#include "vastzones/pipeline.hpp"
#include "vastzones/stats.hpp"
#include "vastzones/vast.hpp"
#include "vastzones/wav.hpp"

namespace fs = std::filesystem;

namespace vz {

namespace {

// FNV-1a over the byte image of the doubles and integers that determine a RIR set.
struct Hasher {
  std::uint64_t state = 1469598103934665603ull;

  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= b[i];
      state *= 1099511628211ull;
    }
  }
  void add(double v) { bytes(&v, sizeof v); }
  void add(std::uint64_t v) { bytes(&v, sizeof v); }
  void add(const Vec3& v) {
    add(v[0]);
    add(v[1]);
    add(v[2]);
  }
  void add(const std::vector<Vec3>& pts) {
    add(static_cast<std::uint64_t>(pts.size()));
    for (const Vec3& p : pts) add(p);
  }
};

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::vector<double>> gather(const std::vector<std::vector<double>>& field,
                                        const std::vector<std::size_t>& idx) {
  std::vector<std::vector<double>> out;
  out.reserve(idx.size());
  for (const std::size_t m : idx) out.push_back(field[m]);
  return out;
}

void append_metric_rows(std::vector<MetricRow>& rows, const std::string& method,
                        const std::string& zone, const std::string& signal,
                        const RenderedField& field, const ZoneRender& own,
                        const ZoneRender& other,
                        const std::vector<std::size_t>& own_idx,
                        const std::vector<std::size_t>& other_idx) {
  const ObservationWindow& w = field.metric_window;

  MetricRow ac;
  ac.method = method;
  ac.zone = zone;
  ac.signal = signal;
  ac.metric = "ac_db";
  ac.mean = clamp_db(
      acoustic_contrast_db(gather(own.p, own_idx), gather(own.p, other_idx), w));
  ac.n_points = own_idx.size() + other_idx.size();
  rows.push_back(ac);

  std::vector<double> nsdp, tir;
  for (const std::size_t m : own_idx) {
    nsdp.push_back(nsdp_db(own.p[m], own.d[m], w));
    tir.push_back(tir_db(own.p[m], other.p[m], w));
  }
  const Aggregate an = aggregate(nsdp);
  rows.push_back({method, zone, signal, "nsdp_db", clamp_db(an.mean), an.ci_half, an.n});
  const Aggregate at = aggregate(tir);
  rows.push_back({method, zone, signal, "tir_db", clamp_db(at.mean), at.ci_half, at.n});
}

void write_wav(const std::string& path, const std::vector<std::vector<double>>& channels,
               double fs) {
  wav::WavData data;
  data.channels = channels;
  data.sample_rate = fs;
  wav::write(path, data, 32);
}

std::vector<MaskingCurve> masking_trace(const std::vector<double>& desired,
                                        const ScenarioConfig& sc, double fs) {
  Segmenter seg = make_sine_segmenter(sc.n_seg, sc.eta);
  std::vector<Frame> frames = segment(desired, seg);
  std::vector<MaskingCurve> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    MaskingCurve c = masking_curve(frames[i].data, fs);
    c.segment_index = i;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::string rir_cache_key(const RoomSpec& room, const SceneGeometry& scene,
                          std::size_t k_taps, int max_order) {
  Hasher h;
  h.add(static_cast<std::uint64_t>(room.bounded ? 1 : 0));
  if (room.bounded) h.add(room.dimensions);
  h.add(room.t60);
  h.add(room.speed_of_sound);
  h.add(room.sample_rate);
  h.add(scene.loudspeakers);
  h.add(scene.control_alpha);
  h.add(scene.control_beta);
  h.add(scene.monitor_alpha);
  h.add(scene.monitor_beta);
  h.add(scene.virtual_source);
  h.add(static_cast<std::uint64_t>(k_taps));
  h.add(static_cast<std::uint64_t>(max_order));
  return hex64(h.state);
}

RIRSet obtain_rirs(const ExperimentConfig& cfg, bool* cache_hit) {
  if (cache_hit) *cache_hit = false;
  const bool reverberant = cfg.room.bounded && cfg.room.t60 > 0.0;
  std::string cache_path;
  if (const char* dir = std::getenv("VASTZONES_CACHE"); dir && *dir) {
    fs::create_directories(dir);
    const std::string key =
        rir_cache_key(cfg.room, cfg.scene, cfg.k_taps, reverberant ? cfg.max_order : 0);
    cache_path = (fs::path(dir) / (key + ".vzrir")).string();
    if (fs::exists(cache_path)) {
      RIRSet rirs = load_rirs(cache_path);
      if (rirs.k_taps == cfg.k_taps && rirs.l_count == cfg.scene.loudspeakers.size()) {
        if (cache_hit) *cache_hit = true;
        return rirs;
      }
    }
  }
  RIRSet rirs = reverberant
                    ? generate_image_source_rirs(cfg.scene, cfg.room, cfg.k_taps,
                                                 cfg.max_order)
                    : generate_anechoic_rirs(cfg.scene, cfg.room, cfg.k_taps);
  if (!cache_path.empty()) save_rirs(cache_path, rirs);
  return rirs;
}

AudioSignal synthesize_signal(const SignalSpec& spec, double sample_rate,
                              std::uint64_t seed) {
  AudioSignal out;
  out.sample_rate = sample_rate;
  switch (spec.kind) {
    case SignalSpec::Kind::noise: {
      const auto n = static_cast<std::size_t>(std::llround(spec.seconds * sample_rate));
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> dist(0.0, 0.1);
      out.samples.resize(n);
      for (double& s : out.samples) s = dist(rng);
      break;
    }
    case SignalSpec::Kind::tone: {
      const auto n = static_cast<std::size_t>(std::llround(spec.seconds * sample_rate));
      out.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = 0.5 * std::sin(2.0 * std::numbers::pi * spec.freq_hz *
                                        static_cast<double>(i) / sample_rate);
      break;
    }
    case SignalSpec::Kind::wav: {
      wav::WavData data = wav::read(spec.path);
      if (data.channels.empty())
        throw std::runtime_error(spec.path + ": no audio channels");
      if (std::abs(data.sample_rate - sample_rate) > 0.5)
        throw std::runtime_error(spec.path + ": sample rate " +
                                 std::to_string(data.sample_rate) +
                                 " does not match configured fs " +
                                 std::to_string(sample_rate));
      out.samples = std::move(data.channels[0]);
      break;
    }
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  RunResult result;
  const std::vector<Finding> findings = validate_config(cfg);
  for (const Finding& f : findings)
    if (f.error) result.errors.push_back("config: " + f.message);
  if (!result.errors.empty()) {
    result.exit_code = 2;
    return result;
  }

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  auto emit = [&](const std::string& rel) { result.emitted.push_back(rel); };

  const double fs_hz = cfg.room.sample_rate;
  StageTimings run_timings;

  const auto t0 = std::chrono::steady_clock::now();
  bool cache_hit = false;
  RIRSet rirs = obtain_rirs(cfg, &cache_hit);
  run_timings.rir_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();

  AudioSignal x_alpha = synthesize_signal(cfg.sig_alpha, fs_hz, cfg.seed);
  AudioSignal x_beta = synthesize_signal(cfg.sig_beta, fs_hz, cfg.seed + 1);
  if (cfg.calibrate_energy) {
    double ea = 0.0, eb = 0.0;
    for (const double s : x_alpha.samples) ea += s * s;
    for (const double s : x_beta.samples) eb += s * s;
    if (ea > 0.0 && eb > 0.0) {
      const double g = std::sqrt(ea / eb);
      for (double& s : x_beta.samples) s *= g;
    }
  }

  const ReceiverLayout layout = layout_of(cfg.scene);
  RenderedField field;
  if (cfg.scenario.method == Method::ap_vast)
    field = render_ap_vast(x_alpha, x_beta, rirs, layout, cfg.scenario);
  else
    field = render_static(x_alpha, x_beta, rirs, layout, cfg.scenario);

  const bool monitor_ok =
      cfg.metric_on_monitor && layout.mon_alpha > 0 && layout.mon_beta > 0;
  const std::vector<std::size_t> eval_alpha =
      monitor_ok ? layout.monitor_alpha_idx() : layout.control_alpha_idx();
  const std::vector<std::size_t> eval_beta =
      monitor_ok ? layout.monitor_beta_idx() : layout.control_beta_idx();

  const std::string method = method_name(cfg.scenario.method);
  std::vector<MetricRow> rows;
  append_metric_rows(rows, method, "alpha", "alpha", field, field.alpha, field.beta,
                     eval_alpha, eval_beta);
  append_metric_rows(rows, method, "beta", "beta", field, field.beta, field.alpha,
                     eval_beta, eval_alpha);
  write_metrics_csv((out / "metrics.csv").string(), rows);
  emit("metrics.csv");

  // Per-point audio at the evaluation points, one channel per point
  // (own zone first, then the opposite zone).
  std::vector<std::size_t> eval_all(eval_alpha);
  eval_all.insert(eval_all.end(), eval_beta.begin(), eval_beta.end());
  write_wav((out / "desired_alpha.wav").string(), gather(field.alpha.d, eval_alpha),
            fs_hz);
  emit("desired_alpha.wav");
  write_wav((out / "desired_beta.wav").string(), gather(field.beta.d, eval_beta), fs_hz);
  emit("desired_beta.wav");
  write_wav((out / "field_alpha.wav").string(), gather(field.alpha.p, eval_all), fs_hz);
  emit("field_alpha.wav");
  write_wav((out / "field_beta.wav").string(), gather(field.beta.p, eval_all), fs_hz);
  emit("field_beta.wav");
  write_wav((out / "superposed.wav").string(), gather(field.superposed, eval_all), fs_hz);
  emit("superposed.wav");

  if (cfg.scenario.method == Method::p_vast || cfg.scenario.method == Method::ap_vast) {
    const std::size_t pa = layout.control_alpha_idx().front();
    const std::size_t pb = layout.control_beta_idx().front();
    try {
      write_masking_csv((out / "masking_alpha.csv").string(),
                        masking_trace(field.alpha.d[pa], cfg.scenario, fs_hz));
      emit("masking_alpha.csv");
      write_masking_csv((out / "masking_beta.csv").string(),
                        masking_trace(field.beta.d[pb], cfg.scenario, fs_hz));
      emit("masking_beta.csv");
    } catch (const std::exception& e) {
      result.errors.push_back(std::string("masking trace: ") + e.what());
    }
  }

  if (cfg.has_sweep) {
    try {
      const std::size_t lj = rirs.l_count * cfg.scenario.j_len;
      UncontrolledResponses resp_b = build_uncontrolled(
          x_alpha.samples, rirs, layout.control_alpha_idx(), cfg.scenario.j_len);
      UncontrolledResponses resp_d = build_uncontrolled(
          x_alpha.samples, rirs, layout.control_beta_idx(), cfg.scenario.j_len);
      std::vector<std::vector<double>> desired = gather(
          desired_field(x_alpha.samples, rirs, layout.control_alpha_idx(),
                        x_alpha.samples.size()),
          layout.control_alpha_idx());
      SpatialStats stats =
          build_stats(desired, resp_b, resp_d, 0, x_alpha.samples.size());
      JointDiag jd = diagonalize_with_fallback(stats, cfg.scenario.regularization,
                                               nullptr);
      const std::vector<std::size_t> v_grid =
          cfg.v_grid.empty() ? default_v_grid(lj) : cfg.v_grid;
      const std::vector<double>& mu_grid = cfg.mu_grid;

      std::vector<std::vector<SweepRow>> per_mu(mu_grid.size());
      const std::size_t workers = std::max<std::size_t>(
          1, std::min(jobs, mu_grid.size()));
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < mu_grid.size(); i += workers)
            per_mu[i] = sweep(jd, stats, v_grid, {mu_grid[i]});
        });
      }
      for (std::thread& t : pool) t.join();
      std::vector<SweepRow> all;
      for (const auto& part : per_mu) all.insert(all.end(), part.begin(), part.end());
      write_sweep_csv((out / "sweep.csv").string(), all);
      emit("sweep.csv");
    } catch (const std::exception& e) {
      result.errors.push_back(std::string("sweep: ") + e.what());
    }
  }

  std::ostringstream manifest;
  manifest << "config: " << cfg.source_name << "\n";
  manifest << "method: " << method << "\n";
  manifest << "seed: " << cfg.seed << "\n";
  manifest << "signal_len_alpha: " << x_alpha.samples.size() << "\n";
  manifest << "signal_len_beta: " << x_beta.samples.size() << "\n";
  manifest << "rir_cache_hit: " << (cache_hit ? "yes" : "no") << "\n";
  manifest << "segments: " << field.info.segments << "\n";
  manifest << "gevd_fallbacks: " << field.info.fallbacks << "\n";
  manifest << "timing_rir_ms: " << fmt(run_timings.rir_ms) << "\n";
  manifest << "timing_stats_ms: " << fmt(field.info.timings.stats_ms) << "\n";
  manifest << "timing_gevd_ms: " << fmt(field.info.timings.gevd_ms) << "\n";
  manifest << "timing_solve_ms: " << fmt(field.info.timings.solve_ms) << "\n";
  manifest << "timing_filter_ms: " << fmt(field.info.timings.filter_ms) << "\n";
  manifest << "timing_percept_ms: " << fmt(field.info.timings.percept_ms) << "\n";
  for (const std::string& err : result.errors) manifest << "error: " << err << "\n";
  for (const std::string& f : result.emitted) manifest << "file: " << f << "\n";
  manifest << "file: manifest.txt\n";
  {
    std::ofstream mf(out / "manifest.txt");
    if (!mf) throw std::runtime_error("cannot write manifest");
    mf << manifest.str();
  }
  emit("manifest.txt");
  return result;
}

}  // namespace vz
