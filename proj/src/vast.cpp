#include "vastzones/vast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace vz {

std::vector<double> ControlFilterBank::filter(std::size_t l) const {
  if (l >= l_count) throw std::out_of_range("ControlFilterBank::filter");
  std::vector<double> taps(j_len);
  for (std::size_t j = 0; j < j_len; ++j)
    taps[j] = q[static_cast<Eigen::Index>(l * j_len + j)];
  return taps;
}

ControlFilterBank solve_vast(const JointDiag& jd, const Eigen::VectorXd& r_b,
                             const VastParams& params, std::size_t l_count,
                             std::size_t j_len) {
  const std::size_t lj = static_cast<std::size_t>(jd.lambda.size());
  if (lj != l_count * j_len || r_b.size() != jd.lambda.size())
    throw std::invalid_argument("solve_vast: dimension mismatch");
  if (params.v < 1 || params.v > lj)
    throw std::invalid_argument("solve_vast: V must be in [1, LJ]");
  if (params.mu < 0.0) throw std::invalid_argument("solve_vast: mu must be >= 0");

  const Eigen::Index v = static_cast<Eigen::Index>(params.v);
  for (Eigen::Index i = 0; i < v; ++i)
    if (jd.lambda[i] + params.mu <= 0.0)
      throw std::runtime_error("solve_vast: lambda_v + mu = 0, singular trade-off");

  ControlFilterBank bank;
  bank.l_count = l_count;
  bank.j_len = j_len;
  bank.coeff_a = (jd.u.leftCols(v).transpose() * r_b).array() /
                 (jd.lambda.head(v).array() + params.mu);
  bank.q = jd.u.leftCols(v) * bank.coeff_a;
  return bank;
}

double acoustic_contrast(const ControlFilterBank& bank, const SpatialStats& stats) {
  const double pb = bank.q.dot(stats.R_b * bank.q);
  const double pd = bank.q.dot(stats.R_d * bank.q);
  if (pd <= 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = static_cast<double>(stats.m_d) / static_cast<double>(stats.m_b);
  return 10.0 * std::log10(ratio * std::max(pb, 0.0) / pd);
}

ClosedFormPowers closed_form_powers(const JointDiag& jd, const Eigen::VectorXd& r_b,
                                    double sigma_d_sq, const VastParams& params) {
  const std::size_t lj = static_cast<std::size_t>(jd.lambda.size());
  if (params.v < 1 || params.v > lj)
    throw std::invalid_argument("closed_form_powers: V must be in [1, LJ]");
  ClosedFormPowers out;
  out.s_b = sigma_d_sq;
  out.lagrangian = sigma_d_sq;
  for (std::size_t v = 0; v < params.v; ++v) {
    const Eigen::Index i = static_cast<Eigen::Index>(v);
    const double denom = jd.lambda[i] + params.mu;
    if (denom <= 0.0)
      throw std::runtime_error("closed_form_powers: lambda_v + mu = 0");
    const double c = jd.u.col(i).dot(r_b);
    const double c2 = c * c;
    out.s_b -= (jd.lambda[i] + 2.0 * params.mu) / (denom * denom) * c2;
    out.s_d += c2 / (denom * denom);
    out.lagrangian -= c2 / denom;
  }
  return out;
}

std::vector<SweepRow> sweep(const JointDiag& jd, const SpatialStats& design,
                            const std::vector<std::size_t>& v_grid,
                            const std::vector<double>& mu_grid,
                            const SpatialStats* eval_stats) {
  if (v_grid.empty() || mu_grid.empty())
    throw std::invalid_argument("sweep: empty grid");
  const std::size_t lj = static_cast<std::size_t>(jd.lambda.size());
  std::vector<std::size_t> vs(v_grid);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());

  std::vector<double> c2(lj);
  for (std::size_t v = 0; v < lj; ++v) {
    const double c = jd.u.col(static_cast<Eigen::Index>(v)).dot(design.r_b);
    c2[v] = c * c;
  }

  std::vector<SweepRow> rows;
  rows.reserve(vs.size() * mu_grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double zone_ratio =
      static_cast<double>(design.m_d) / static_cast<double>(design.m_b);

  for (const double mu : mu_grid) {
    Eigen::VectorXd q_run = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lj));
    double sb_sum = 0.0, sd_sum = 0.0, lag_sum = 0.0;
    double gamma_num = 0.0, gamma_den = 0.0;
    std::size_t vcur = 0;
    bool singular = false;
    for (const std::size_t v_target : vs) {
      SweepRow row;
      row.v = v_target;
      row.mu = mu;
      if (v_target < 1 || v_target > lj) {
        row.ok = false;
        row.error = "V out of range";
        row.s_b = row.s_d = row.lagrangian = row.ac_db = row.q_l2 = nan;
        rows.push_back(std::move(row));
        continue;
      }
      while (!singular && vcur < v_target) {
        const Eigen::Index i = static_cast<Eigen::Index>(vcur);
        const double denom = jd.lambda[i] + mu;
        if (denom <= 0.0) {
          singular = true;
          break;
        }
        const double a = jd.u.col(i).dot(design.r_b) / denom;
        q_run += a * jd.u.col(i);
        sb_sum += (jd.lambda[i] + 2.0 * mu) / (denom * denom) * c2[vcur];
        sd_sum += c2[vcur] / (denom * denom);
        lag_sum += c2[vcur] / denom;
        gamma_num += a * a * jd.lambda[i];
        gamma_den += a * a;
        ++vcur;
      }
      if (singular) {
        row.ok = false;
        row.error = "lambda_v + mu = 0, singular trade-off";
        row.s_b = row.s_d = row.lagrangian = row.ac_db = row.q_l2 = nan;
        rows.push_back(std::move(row));
        continue;
      }
      row.s_b = design.sigma_d_sq - sb_sum;
      row.s_d = sd_sum;
      row.lagrangian = design.sigma_d_sq - lag_sum;
      row.q_l2 = q_run.norm();
      if (eval_stats) {
        ControlFilterBank bank;
        bank.q = q_run;
        bank.l_count = design.l_count;
        bank.j_len = design.j_len;
        row.ac_db = acoustic_contrast(bank, *eval_stats);
      } else {
        row.ac_db = gamma_den > 0.0
                        ? 10.0 * std::log10(zone_ratio * gamma_num / gamma_den)
                        : nan;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("sweep: cannot open " + path);
  out << "v,mu,s_b,s_d,lagrangian,ac_db,q_l2_norm\n";
  char buf[256];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.v, r.mu,
                  r.s_b, r.s_d, r.lagrangian, r.ac_db, r.q_l2);
    out << buf;
  }
}

std::vector<double> default_mu_grid() { return {0.0, 0.1, 1.0, 10.0, 100.0}; }

std::vector<std::size_t> default_v_grid(std::size_t lj) {
  std::vector<std::size_t> grid;
  for (int i = 0; i < 18; ++i) {
    const double t = static_cast<double>(i) / 17.0;
    const std::size_t v =
        1 + static_cast<std::size_t>(std::llround(t * static_cast<double>(lj - 1)));
    if (grid.empty() || grid.back() != v) grid.push_back(v);
  }
  return grid;
}

}  // namespace vz
