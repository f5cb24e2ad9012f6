#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "vastzones/eig.hpp"
#include "vastzones/stats.hpp"

namespace vz {

struct VastParams {
  std::size_t v = 1;
  double mu = 1.0;
};

struct ControlFilterBank {
  Eigen::VectorXd q;        // stacked LJ, loudspeaker-major
  Eigen::VectorXd coeff_a;  // a_V = (Lambda_V + mu I)^-1 U_V^T r_b
  std::size_t l_count = 0, j_len = 0;

  std::vector<double> filter(std::size_t l) const;
};

// Eq. 27: q = sum_{v<=V} (u_v^T r_b)/(lambda_v + mu) u_v.
ControlFilterBank solve_vast(const JointDiag& jd, const Eigen::VectorXd& r_b,
                             const VastParams& params, std::size_t l_count,
                             std::size_t j_len);

// 10 log10[(M_D/M_B) (q^T R_b q)/(q^T R_d q)]; +inf when the dark-zone power is 0.
double acoustic_contrast(const ControlFilterBank& bank, const SpatialStats& stats);

struct ClosedFormPowers {
  double s_b = 0.0;
  double s_d = 0.0;
  double lagrangian = 0.0;  // without the constant -mu*eps term
};

ClosedFormPowers closed_form_powers(const JointDiag& jd, const Eigen::VectorXd& r_b,
                                    double sigma_d_sq, const VastParams& params);

struct SweepRow {
  std::size_t v = 0;
  double mu = 0.0;
  double s_b = 0.0;
  double s_d = 0.0;
  double lagrangian = 0.0;
  double ac_db = 0.0;
  double q_l2 = 0.0;
  bool ok = true;
  std::string error;
};

// One row per (V, mu). The contrast column is evaluated against eval_stats when
// given (weighted-design case); otherwise it comes from the eigencoefficients,
// which is the same quantity when design and evaluation statistics coincide.
std::vector<SweepRow> sweep(const JointDiag& jd, const SpatialStats& design,
                            const std::vector<std::size_t>& v_grid,
                            const std::vector<double>& mu_grid,
                            const SpatialStats* eval_stats = nullptr);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

std::vector<double> default_mu_grid();
std::vector<std::size_t> default_v_grid(std::size_t lj);

}  // namespace vz
