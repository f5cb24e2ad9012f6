#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "vastzones/metrics.hpp"
#include "vastzones/room.hpp"
#include "vastzones/signal.hpp"
#include "vastzones/stats.hpp"
#include "vastzones/vast.hpp"

namespace vz {

enum class Method { no_control, vast, p_vast, ap_vast };

const char* method_name(Method m);

struct ScenarioConfig {
  Method method = Method::vast;
  VastParams params;
  std::size_t j_len = 240;
  std::size_t n_seg = 960;  // segment length N
  std::size_t eta = 480;    // overlap
  bool weighting = true;    // perceptual weighting for p_vast / ap_vast
  std::size_t w_taps = 129;
  double regularization = 0.0;
  bool capture_filters = false;  // keep per-segment q (program alpha) for diagnostics
};

struct StageTimings {
  double stats_ms = 0.0;
  double gevd_ms = 0.0;
  double solve_ms = 0.0;
  double filter_ms = 0.0;
  double percept_ms = 0.0;
  double rir_ms = 0.0;
};

struct RenderInfo {
  std::size_t segments = 1;
  std::size_t fallbacks = 0;
  StageTimings timings;
  std::vector<Eigen::VectorXd> filters;
};

// One program's field: per-receiver reproduced and desired series on the
// global time axis, trimmed to the input length.
struct ZoneRender {
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> d;
};

struct RenderedField {
  ZoneRender alpha, beta;
  std::vector<std::vector<double>> superposed;
  std::size_t len = 0;
  ObservationWindow metric_window;
  RenderInfo info;
};

// Eq. 9: bright points get the virtual-source convolution, everything else 0.
std::vector<std::vector<double>> desired_field(const std::vector<double>& x,
                                               const RIRSet& rirs,
                                               const std::vector<std::size_t>& bright_points,
                                               std::size_t out_len);

// Single-program static render (no_control, vast, p_vast). The other
// program is taken as silent, so dark-zone maskers sit at the quiet floor.
ZoneRender render_static(const AudioSignal& x, bool alpha_bright, const RIRSet& rirs,
                         const ReceiverLayout& layout, const ScenarioConfig& config,
                         RenderInfo* info = nullptr);

// Two-program static render with superposition.
RenderedField render_static(const AudioSignal& x_alpha, const AudioSignal& x_beta,
                            const RIRSet& rirs, const ReceiverLayout& layout,
                            const ScenarioConfig& config);

// Per-segment adaptive render (Fig. 3 loop) for both programs.
RenderedField render_ap_vast(const AudioSignal& x_alpha, const AudioSignal& x_beta,
                             const RIRSet& rirs, const ReceiverLayout& layout,
                             const ScenarioConfig& config);

// joint_diagonalize with the documented regularization fallback.
JointDiag diagonalize_with_fallback(const SpatialStats& stats, double regularization,
                                    std::size_t* fallback_count);

std::size_t ap_vast_segment_count(std::size_t len, std::size_t n_seg, std::size_t eta);

}  // namespace vz
