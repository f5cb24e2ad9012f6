#include "vastzones/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vastzones/eig.hpp"
#include "vastzones/percept.hpp"

namespace vz {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> slice_padded(const std::vector<double>& v, std::ptrdiff_t a,
                                 std::ptrdiff_t b) {
  std::vector<double> out(static_cast<std::size_t>(b - a), 0.0);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(a, 0);
  const std::ptrdiff_t hi = std::min(b, static_cast<std::ptrdiff_t>(v.size()));
  for (std::ptrdiff_t i = lo; i < hi; ++i) out[static_cast<std::size_t>(i - a)] = v[i];
  return out;
}

void add_into(std::vector<double>& dst, const std::vector<double>& src) {
  const std::size_t n = std::min(dst.size(), src.size());
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

// u_l = x * q_l, p_m = sum_l u_l * h_ml.
std::vector<std::vector<double>> apply_bank(const std::vector<double>& x,
                                            const ControlFilterBank& bank,
                                            const RIRSet& rirs, std::size_t out_len) {
  std::vector<std::vector<double>> p(rirs.m_count, std::vector<double>(out_len, 0.0));
  for (std::size_t l = 0; l < rirs.l_count; ++l) {
    const std::vector<double> u = convolve(x, bank.filter(l));
    for (std::size_t m = 0; m < rirs.m_count; ++m)
      add_into(p[m], convolve(u, rirs.rir_vec(m, l)));
  }
  return p;
}

std::vector<std::vector<double>> render_speaker_feeds(
    const std::vector<std::vector<double>>& u, const RIRSet& rirs, std::size_t out_len) {
  std::vector<std::vector<double>> p(rirs.m_count, std::vector<double>(out_len, 0.0));
  for (std::size_t l = 0; l < rirs.l_count; ++l)
    for (std::size_t m = 0; m < rirs.m_count; ++m)
      add_into(p[m], convolve(u[l], rirs.rir_vec(m, l)));
  return p;
}

ControlFilterBank delta_bank(std::size_t l_count, std::size_t j_len) {
  ControlFilterBank bank;
  bank.l_count = l_count;
  bank.j_len = j_len;
  bank.q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l_count * j_len));
  for (std::size_t l = 0; l < l_count; ++l)
    bank.q[static_cast<Eigen::Index>(l * j_len)] = 1.0;
  return bank;
}

// Average masking curve over all segments of the masker signal, then the
// reciprocal FIR. Used by the static perceptual method.
std::vector<double> averaged_weighting(const std::vector<double>& masker,
                                       const Segmenter& seg, double fs,
                                       std::size_t w_taps) {
  const auto frames = segment(masker, seg);
  std::vector<MaskingCurve> curves;
  curves.reserve(frames.size());
  for (const Frame& f : frames) curves.push_back(masking_curve(f.data, fs));
  if (curves.empty()) {
    curves.push_back(masking_curve(std::vector<double>(seg.n_len, 0.0), fs));
  }
  return weighting_filter(averaged_masking_curve(curves), w_taps).taps;
}

struct DesignInputs {
  const std::vector<double>* x = nullptr;
  std::vector<std::size_t> bright_ctrl;  // receiver indices
  std::vector<std::size_t> dark_ctrl;
  std::vector<const std::vector<double>*> desired_bright;  // own program at bright_ctrl
  std::vector<const std::vector<double>*> masker_bright;   // per bright point
  std::vector<const std::vector<double>*> masker_dark;     // per dark point
};

ControlFilterBank design_static(const DesignInputs& in, const RIRSet& rirs,
                                const ScenarioConfig& cfg, RenderInfo& info) {
  const std::size_t len = in.x->size();
  const std::size_t l_count = rirs.l_count;
  const std::size_t j_len = cfg.j_len;

  const std::vector<std::vector<double>>* wb = nullptr;
  const std::vector<std::vector<double>>* wd = nullptr;
  std::vector<std::vector<double>> w_bright, w_dark;
  std::vector<std::vector<double>> desired(in.desired_bright.size());

  if (cfg.method == Method::p_vast && cfg.weighting) {
    const auto t0 = Clock::now();
    const Segmenter seg = make_sine_segmenter(cfg.n_seg, cfg.eta);
    const std::vector<double> silence(len, 0.0);
    for (std::size_t i = 0; i < in.bright_ctrl.size(); ++i)
      w_bright.push_back(averaged_weighting(
          in.masker_bright[i] ? *in.masker_bright[i] : silence, seg, rirs.sample_rate,
          cfg.w_taps));
    for (std::size_t i = 0; i < in.dark_ctrl.size(); ++i)
      w_dark.push_back(averaged_weighting(in.masker_dark[i] ? *in.masker_dark[i] : silence,
                                          seg, rirs.sample_rate, cfg.w_taps));
    wb = &w_bright;
    wd = &w_dark;
    info.timings.percept_ms += ms_since(t0);
    const std::ptrdiff_t d_comp = static_cast<std::ptrdiff_t>((cfg.w_taps - 1) / 2);
    for (std::size_t i = 0; i < desired.size(); ++i) {
      const auto dw = convolve(w_bright[i], *in.desired_bright[i]);
      desired[i] = slice_padded(dw, d_comp, d_comp + static_cast<std::ptrdiff_t>(len));
    }
  } else {
    for (std::size_t i = 0; i < desired.size(); ++i)
      desired[i] = slice_padded(*in.desired_bright[i], 0,
                                static_cast<std::ptrdiff_t>(len));
  }

  auto t0 = Clock::now();
  const auto resp_b = build_uncontrolled(*in.x, rirs, in.bright_ctrl, j_len, wb);
  const auto resp_d = build_uncontrolled(*in.x, rirs, in.dark_ctrl, j_len, wd);
  const SpatialStats st = build_stats(desired, resp_b, resp_d, 0, len);
  info.timings.stats_ms += ms_since(t0);

  t0 = Clock::now();
  JointDiag jd;
  try {
    jd = diagonalize_with_fallback(st, cfg.regularization, &info.fallbacks);
  } catch (const std::exception& e) {
    const auto diag = rank_condition(st, st.m_d, st.n_obs, rirs.k_taps, st.l_count, st.j_len);
    throw std::runtime_error(
        std::string(e.what()) + "; rank condition M_D*min(N, K+J-1) >= LJ gives " +
        std::to_string(diag.bound_lhs) + " vs LJ = " + std::to_string(diag.lj) +
        (diag.condition ? " (satisfied)" : " (violated)"));
  }
  info.timings.gevd_ms += ms_since(t0);

  t0 = Clock::now();
  ControlFilterBank bank = solve_vast(jd, st.r_b, cfg.params, l_count, j_len);
  info.timings.solve_ms += ms_since(t0);
  return bank;
}

void check_static_method(const ScenarioConfig& cfg) {
  if (cfg.method == Method::ap_vast)
    throw std::invalid_argument("render_static: use render_ap_vast for the adaptive method");
  if (cfg.j_len < 1) throw std::invalid_argument("render: j_len must be >= 1");
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::no_control: return "no_control";
    case Method::vast: return "vast";
    case Method::p_vast: return "p_vast";
    case Method::ap_vast: return "ap_vast";
  }
  return "?";
}

std::vector<std::vector<double>> desired_field(const std::vector<double>& x,
                                               const RIRSet& rirs,
                                               const std::vector<std::size_t>& bright_points,
                                               std::size_t out_len) {
  if (rirs.h_virtual.empty())
    throw std::invalid_argument("desired_field: virtual-source RIRs missing");
  std::vector<std::vector<double>> d(rirs.m_count, std::vector<double>(out_len, 0.0));
  for (const std::size_t m : bright_points) {
    if (m >= rirs.m_count) throw std::invalid_argument("desired_field: point out of range");
    add_into(d[m], convolve(x, rirs.vrir_vec(m)));
  }
  return d;
}

JointDiag diagonalize_with_fallback(const SpatialStats& stats, double regularization,
                                    std::size_t* fallback_count) {
  try {
    return joint_diagonalize(stats, regularization);
  } catch (const std::runtime_error&) {
    const double tr = stats.R_d.trace();
    double reg = 1e-10 * tr / static_cast<double>(stats.lj());
    if (!(reg > 0.0)) reg = 1e-12;  // all-zero statistics still get a usable floor
    if (fallback_count) ++(*fallback_count);
    return joint_diagonalize(stats, regularization + reg);
  }
}

ZoneRender render_static(const AudioSignal& x, bool alpha_bright, const RIRSet& rirs,
                         const ReceiverLayout& layout, const ScenarioConfig& config,
                         RenderInfo* info_out) {
  check_static_method(config);
  if (rirs.m_count != layout.total())
    throw std::invalid_argument("render_static: layout/RIR mismatch");
  const std::size_t len = x.samples.size();
  if (len == 0) throw std::invalid_argument("render_static: empty input");

  RenderInfo info;
  const auto bright_ctrl =
      alpha_bright ? layout.control_alpha_idx() : layout.control_beta_idx();
  const auto dark_ctrl =
      alpha_bright ? layout.control_beta_idx() : layout.control_alpha_idx();
  auto bright_all = bright_ctrl;
  const auto mon =
      alpha_bright ? layout.monitor_alpha_idx() : layout.monitor_beta_idx();
  bright_all.insert(bright_all.end(), mon.begin(), mon.end());

  ZoneRender out;
  out.d = desired_field(x.samples, rirs, bright_all, len);

  ControlFilterBank bank;
  if (config.method == Method::no_control) {
    bank = delta_bank(rirs.l_count, config.j_len);
  } else {
    DesignInputs in;
    in.x = &x.samples;
    in.bright_ctrl = bright_ctrl;
    in.dark_ctrl = dark_ctrl;
    for (const std::size_t m : bright_ctrl) {
      in.desired_bright.push_back(&out.d[m]);
      in.masker_bright.push_back(&out.d[m]);
    }
    in.masker_dark.assign(dark_ctrl.size(), nullptr);  // other program silent
    bank = design_static(in, rirs, config, info);
  }

  const auto t0 = Clock::now();
  out.p = apply_bank(x.samples, bank, rirs, len);
  info.timings.filter_ms += ms_since(t0);
  if (config.capture_filters) info.filters.push_back(bank.q);
  if (info_out) *info_out = info;
  return out;
}

RenderedField render_static(const AudioSignal& x_alpha, const AudioSignal& x_beta,
                            const RIRSet& rirs, const ReceiverLayout& layout,
                            const ScenarioConfig& config) {
  check_static_method(config);
  if (rirs.m_count != layout.total())
    throw std::invalid_argument("render_static: layout/RIR mismatch");
  const std::size_t len = std::max(x_alpha.samples.size(), x_beta.samples.size());
  if (len == 0) throw std::invalid_argument("render_static: empty input");

  RenderedField field;
  field.len = len;
  field.metric_window = {0, len};
  std::vector<double> xa = x_alpha.samples;
  std::vector<double> xb = x_beta.samples;
  xa.resize(len, 0.0);
  xb.resize(len, 0.0);

  auto bright_a = layout.control_alpha_idx();
  {
    const auto mon = layout.monitor_alpha_idx();
    bright_a.insert(bright_a.end(), mon.begin(), mon.end());
  }
  auto bright_b = layout.control_beta_idx();
  {
    const auto mon = layout.monitor_beta_idx();
    bright_b.insert(bright_b.end(), mon.begin(), mon.end());
  }
  field.alpha.d = desired_field(xa, rirs, bright_a, len);
  field.beta.d = desired_field(xb, rirs, bright_b, len);

  for (int pass = 0; pass < 2; ++pass) {
    const bool is_alpha = pass == 0;
    const std::vector<double>& x = is_alpha ? xa : xb;
    ZoneRender& zr = is_alpha ? field.alpha : field.beta;
    const auto& d_own = is_alpha ? field.alpha.d : field.beta.d;
    const auto& d_other = is_alpha ? field.beta.d : field.alpha.d;

    ControlFilterBank bank;
    if (config.method == Method::no_control) {
      bank = delta_bank(rirs.l_count, config.j_len);
    } else {
      DesignInputs in;
      in.x = &x;
      in.bright_ctrl = is_alpha ? layout.control_alpha_idx() : layout.control_beta_idx();
      in.dark_ctrl = is_alpha ? layout.control_beta_idx() : layout.control_alpha_idx();
      for (const std::size_t m : in.bright_ctrl) {
        in.desired_bright.push_back(&d_own[m]);
        in.masker_bright.push_back(&d_own[m]);
      }
      // Table I: a dark point's masker is that zone's own desired signal.
      for (const std::size_t m : in.dark_ctrl) in.masker_dark.push_back(&d_other[m]);
      bank = design_static(in, rirs, config, field.info);
    }
    const auto t0 = Clock::now();
    zr.p = apply_bank(x, bank, rirs, len);
    field.info.timings.filter_ms += ms_since(t0);
    if (config.capture_filters && is_alpha) field.info.filters.push_back(bank.q);
  }

  field.superposed.assign(rirs.m_count, std::vector<double>(len, 0.0));
  for (std::size_t m = 0; m < rirs.m_count; ++m)
    for (std::size_t n = 0; n < len; ++n)
      field.superposed[m][n] = field.alpha.p[m][n] + field.beta.p[m][n];
  return field;
}

std::size_t ap_vast_segment_count(std::size_t len, std::size_t n_seg, std::size_t eta) {
  const std::size_t hop = n_seg - eta;
  return (len + eta + hop - 1) / hop;
}

RenderedField render_ap_vast(const AudioSignal& x_alpha, const AudioSignal& x_beta,
                             const RIRSet& rirs, const ReceiverLayout& layout,
                             const ScenarioConfig& config) {
  if (config.method != Method::ap_vast)
    throw std::invalid_argument("render_ap_vast: config.method must be ap_vast");
  if (config.eta * 2 != config.n_seg)
    throw std::invalid_argument("render_ap_vast: requires eta = N/2");
  if (rirs.m_count != layout.total())
    throw std::invalid_argument("render_ap_vast: layout/RIR mismatch");
  const std::size_t len = std::max(x_alpha.samples.size(), x_beta.samples.size());
  if (len == 0) throw std::invalid_argument("render_ap_vast: empty input");

  const std::size_t n_seg = config.n_seg;
  const std::size_t hop = n_seg - config.eta;
  const std::size_t j_len = config.j_len;
  const std::size_t l_count = rirs.l_count;
  const std::vector<double> g = sine_window(n_seg);
  const std::size_t n_segments = ap_vast_segment_count(len, n_seg, config.eta);

  RenderedField field;
  field.len = len;
  field.metric_window = {std::min(n_seg, len), len > n_seg ? len - n_seg : 0};
  if (field.metric_window.end < field.metric_window.begin)
    field.metric_window.end = field.metric_window.begin;
  field.info.segments = n_segments;

  std::vector<double> xs[2] = {x_alpha.samples, x_beta.samples};
  xs[0].resize(len, 0.0);
  xs[1].resize(len, 0.0);

  auto bright_a = layout.control_alpha_idx();
  auto mon_a = layout.monitor_alpha_idx();
  auto bright_b = layout.control_beta_idx();
  auto mon_b = layout.monitor_beta_idx();
  auto bright_all_a = bright_a;
  bright_all_a.insert(bright_all_a.end(), mon_a.begin(), mon_a.end());
  auto bright_all_b = bright_b;
  bright_all_b.insert(bright_all_b.end(), mon_b.begin(), mon_b.end());

  field.alpha.d = desired_field(xs[0], rirs, bright_all_a, len);
  field.beta.d = desired_field(xs[1], rirs, bright_all_b, len);

  // Full uncontrolled responses per program over the control points, reused by
  // every segment (unweighted path) and sliced by the weighted path.
  const std::vector<std::size_t> ctrl[2] = {bright_a, bright_b};
  UncontrolledResponses resp[2][2];  // [program][0 = alpha pts, 1 = beta pts]
  {
    const auto t0 = Clock::now();
    for (int p = 0; p < 2; ++p)
      for (int z = 0; z < 2; ++z)
        resp[p][z] = build_uncontrolled(xs[p], rirs, ctrl[z], j_len);
    field.info.timings.stats_ms += ms_since(t0);
  }
  std::vector<std::vector<double>> desired_unweighted[2];
  if (!config.weighting) {
    for (int p = 0; p < 2; ++p) {
      const auto& d_own = p == 0 ? field.alpha.d : field.beta.d;
      for (const std::size_t m : ctrl[p]) desired_unweighted[p].push_back(d_own[m]);
    }
  }

  const std::size_t feed_len = len + config.eta + n_seg + j_len;
  std::vector<std::vector<double>> u[2];
  u[0].assign(l_count, std::vector<double>(feed_len, 0.0));
  u[1].assign(l_count, std::vector<double>(feed_len, 0.0));

  const std::ptrdiff_t d_comp =
      config.weighting ? static_cast<std::ptrdiff_t>((config.w_taps - 1) / 2) : 0;
  const std::ptrdiff_t big_n = static_cast<std::ptrdiff_t>(n_seg);
  const std::ptrdiff_t big_j = static_cast<std::ptrdiff_t>(j_len);
  const std::ptrdiff_t n_w = config.weighting ? static_cast<std::ptrdiff_t>(config.w_taps) : 1;

  for (std::size_t i = 0; i < n_segments; ++i) {
    const std::ptrdiff_t s =
        static_cast<std::ptrdiff_t>(i * hop) - static_cast<std::ptrdiff_t>(config.eta);

    // Per-point weighting filters from the zone's own desired segment.
    std::vector<std::vector<double>> w_ctrl[2];
    if (config.weighting) {
      const auto t0 = Clock::now();
      for (int z = 0; z < 2; ++z) {
        const auto& d_zone = z == 0 ? field.alpha.d : field.beta.d;
        for (const std::size_t m : ctrl[z]) {
          std::vector<double> seg = slice_padded(d_zone[m], s, s + big_n);
          for (std::size_t n = 0; n < n_seg; ++n) seg[n] *= g[n];
          MaskingCurve curve = masking_curve(seg, rirs.sample_rate);
          curve.segment_index = i;
          w_ctrl[z].push_back(weighting_filter(curve, config.w_taps).taps);
        }
      }
      field.info.timings.percept_ms += ms_since(t0);
    }

    for (int p = 0; p < 2; ++p) {
      const int zb = p;       // bright zone index for this program
      const int zd = 1 - p;
      const auto& d_own = p == 0 ? field.alpha.d : field.beta.d;

      SpatialStats st;
      {
        const auto t0 = Clock::now();
        if (!config.weighting) {
          st = build_stats(desired_unweighted[p], resp[p][zb], resp[p][zd], s, n_seg);
        } else {
          // Weighted slices around the segment window, group delay compensated.
          const std::ptrdiff_t a = s - big_j + 1 - n_w;
          const std::ptrdiff_t b_hi = s + big_n + d_comp + 1;
          auto make_sliced = [&](int z) {
            UncontrolledResponses r;
            r.l_count = l_count;
            r.j_len = j_len;
            r.origin = a;
            r.delay = d_comp;
            r.seq.resize(ctrl[z].size());
            for (std::size_t v = 0; v < ctrl[z].size(); ++v) {
              r.seq[v].resize(l_count);
              for (std::size_t l = 0; l < l_count; ++l)
                r.seq[v][l] = convolve(w_ctrl[z][v],
                                       slice_padded(resp[p][z].seq[v][l], a, b_hi));
            }
            return r;
          };
          UncontrolledResponses rb = make_sliced(zb);
          UncontrolledResponses rd = make_sliced(zd);

          std::vector<std::vector<double>> desired(ctrl[zb].size());
          for (std::size_t v = 0; v < ctrl[zb].size(); ++v) {
            const auto dw =
                convolve(w_ctrl[zb][v], slice_padded(d_own[ctrl[zb][v]], a, b_hi));
            desired[v].assign(n_seg, 0.0);
            for (std::size_t n = 0; n < n_seg; ++n) {
              const std::ptrdiff_t t =
                  s + static_cast<std::ptrdiff_t>(n) + d_comp - a;
              if (t >= 0 && t < static_cast<std::ptrdiff_t>(dw.size()))
                desired[v][n] = dw[t];
            }
          }
          st = build_stats(desired, rb, rd, s, n_seg, s);
        }
        field.info.timings.stats_ms += ms_since(t0);
      }

      JointDiag jd;
      {
        const auto t0 = Clock::now();
        jd = diagonalize_with_fallback(st, config.regularization, &field.info.fallbacks);
        field.info.timings.gevd_ms += ms_since(t0);
      }

      ControlFilterBank bank;
      {
        const auto t0 = Clock::now();
        bank = solve_vast(jd, st.r_b, config.params, l_count, j_len);
        field.info.timings.solve_ms += ms_since(t0);
      }
      if (config.capture_filters && p == 0) field.info.filters.push_back(bank.q);

      // Filter the windowed input segment and weighted-overlap-add into the
      // loudspeaker feeds: synthesis window on the first N samples, the
      // convolution tail added as-is.
      const auto t0 = Clock::now();
      std::vector<double> xw = slice_padded(xs[p], s, s + big_n);
      for (std::size_t n = 0; n < n_seg; ++n) xw[n] *= g[n];
      for (std::size_t l = 0; l < l_count; ++l) {
        const std::vector<double> v = convolve_fft(xw, bank.filter(l));
        auto& feed = u[p][l];
        for (std::size_t n = 0; n < v.size(); ++n) {
          const std::ptrdiff_t idx = s + static_cast<std::ptrdiff_t>(n);
          if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(feed_len)) continue;
          feed[static_cast<std::size_t>(idx)] += n < n_seg ? g[n] * v[n] : v[n];
        }
      }
      field.info.timings.filter_ms += ms_since(t0);
    }
  }

  {
    const auto t0 = Clock::now();
    field.alpha.p = render_speaker_feeds(u[0], rirs, len);
    field.beta.p = render_speaker_feeds(u[1], rirs, len);
    field.info.timings.filter_ms += ms_since(t0);
  }

  field.superposed.assign(rirs.m_count, std::vector<double>(len, 0.0));
  for (std::size_t m = 0; m < rirs.m_count; ++m)
    for (std::size_t n = 0; n < len; ++n)
      field.superposed[m][n] = field.alpha.p[m][n] + field.beta.p[m][n];
  return field;
}

}  // namespace vz
