#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "vastzones/room.hpp"

namespace vz {

// Per-point, per-loudspeaker filtered input sequences s_ml = (w_m * x * h_ml)
// on a shared global time axis. The stacked regressor of Eq. 2 is read out of
// these as y_m[n](lJ + j) = s_ml[n + delay - j], loudspeaker-major.
struct UncontrolledResponses {
  std::vector<std::vector<std::vector<double>>> seq;  // [point][speaker][n]
  std::size_t l_count = 0;
  std::size_t j_len = 0;
  std::ptrdiff_t delay = 0;   // weighting-filter group delay compensation
  std::ptrdiff_t origin = 0;  // global time of seq[...][0]

  std::size_t lj() const { return l_count * j_len; }
  double sample(std::size_t point, std::size_t l, std::ptrdiff_t n) const {
    const auto& s = seq[point][l];
    const std::ptrdiff_t idx = n + delay - origin;
    if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(s.size())) return 0.0;
    return s[static_cast<std::size_t>(idx)];
  }
  void fill_y(std::size_t point, std::ptrdiff_t n, Eigen::Ref<Eigen::VectorXd> y) const;
};

UncontrolledResponses build_uncontrolled(
    const std::vector<double>& x, const RIRSet& rirs,
    const std::vector<std::size_t>& point_set, std::size_t j_len,
    const std::vector<std::vector<double>>* weighting = nullptr);

struct SpatialStats {
  double sigma_d_sq = 0.0;
  Eigen::VectorXd r_b;
  Eigen::MatrixXd R_b;
  Eigen::MatrixXd R_d;
  std::size_t m_b = 0, m_d = 0, n_obs = 0;
  std::size_t l_count = 0, j_len = 0;

  std::size_t lj() const { return l_count * j_len; }
};

// Accumulates Eqs. 15-17 over n in [n_begin, n_begin + n_obs). desired holds
// one sequence per bright point, delay-aligned with resp_b; its value at
// global time n is desired[p][n - desired_origin].
SpatialStats build_stats(const std::vector<std::vector<double>>& desired,
                         const UncontrolledResponses& resp_b,
                         const UncontrolledResponses& resp_d, std::ptrdiff_t n_begin,
                         std::size_t n_obs, std::ptrdiff_t desired_origin = 0);

struct RankDiagnostic {
  bool condition = false;  // M_D * min(N, K+J-1) >= LJ
  std::size_t bound_lhs = 0;
  std::size_t lj = 0;
  std::size_t estimated_rank = 0;
};

RankDiagnostic rank_condition(const SpatialStats& stats, std::size_t m_d, std::size_t n_obs,
                              std::size_t k_taps, std::size_t l_count, std::size_t j_len);

}  // namespace vz
