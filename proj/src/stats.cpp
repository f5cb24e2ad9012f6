#include "vastzones/stats.hpp"

#include <stdexcept>

#include "vastzones/signal.hpp"

namespace vz {

void UncontrolledResponses::fill_y(std::size_t point, std::ptrdiff_t n,
                                   Eigen::Ref<Eigen::VectorXd> y) const {
  for (std::size_t l = 0; l < l_count; ++l)
    for (std::size_t j = 0; j < j_len; ++j)
      y[static_cast<Eigen::Index>(l * j_len + j)] =
          sample(point, l, n - static_cast<std::ptrdiff_t>(j));
}

UncontrolledResponses build_uncontrolled(const std::vector<double>& x, const RIRSet& rirs,
                                         const std::vector<std::size_t>& point_set,
                                         std::size_t j_len,
                                         const std::vector<std::vector<double>>* weighting) {
  if (j_len < 1) throw std::invalid_argument("build_uncontrolled: j_len must be >= 1");
  if (weighting && weighting->size() != point_set.size())
    throw std::invalid_argument("build_uncontrolled: missing weighting filter for a point");
  UncontrolledResponses resp;
  resp.l_count = rirs.l_count;
  resp.j_len = j_len;
  resp.seq.resize(point_set.size());
  for (std::size_t p = 0; p < point_set.size(); ++p) {
    const std::size_t m = point_set[p];
    if (m >= rirs.m_count) throw std::invalid_argument("build_uncontrolled: point out of range");
    resp.seq[p].resize(rirs.l_count);
    for (std::size_t l = 0; l < rirs.l_count; ++l) {
      std::vector<double> s = convolve(x, rirs.rir_vec(m, l));
      if (weighting) s = convolve((*weighting)[p], s);
      resp.seq[p][l] = std::move(s);
    }
  }
  if (weighting && !weighting->empty())
    resp.delay = static_cast<std::ptrdiff_t>(((*weighting)[0].size() - 1) / 2);
  return resp;
}

namespace {

constexpr std::size_t kChunk = 2048;

// R += Y Y^T and optionally r += Y d over one block of observation columns.
void accumulate_zone(const UncontrolledResponses& resp, std::ptrdiff_t n_begin,
                     std::size_t n_obs, Eigen::MatrixXd& R,
                     const std::vector<std::vector<double>>* desired, Eigen::VectorXd* r,
                     double* sigma, std::ptrdiff_t desired_origin = 0) {
  const std::size_t lj = resp.lj();
  Eigen::MatrixXd Y(lj, kChunk);
  Eigen::VectorXd d(kChunk);
  for (std::size_t p = 0; p < resp.seq.size(); ++p) {
    for (std::size_t off = 0; off < n_obs; off += kChunk) {
      const std::size_t cols = std::min(kChunk, n_obs - off);
      for (std::size_t c = 0; c < cols; ++c)
        resp.fill_y(p, n_begin + static_cast<std::ptrdiff_t>(off + c),
                    Y.col(static_cast<Eigen::Index>(c)));
      auto Yb = Y.leftCols(static_cast<Eigen::Index>(cols));
      R.selfadjointView<Eigen::Lower>().rankUpdate(Yb, 1.0);
      if (desired) {
        const auto& dm = (*desired)[p];
        for (std::size_t c = 0; c < cols; ++c) {
          const std::ptrdiff_t idx =
              n_begin + static_cast<std::ptrdiff_t>(off + c) - desired_origin;
          d[static_cast<Eigen::Index>(c)] =
              (idx >= 0 && idx < static_cast<std::ptrdiff_t>(dm.size()))
                  ? dm[static_cast<std::size_t>(idx)]
                  : 0.0;
        }
        auto db = d.head(static_cast<Eigen::Index>(cols));
        *r += Yb * db;
        *sigma += db.squaredNorm();
      }
    }
  }
}

}  // namespace

SpatialStats build_stats(const std::vector<std::vector<double>>& desired,
                         const UncontrolledResponses& resp_b,
                         const UncontrolledResponses& resp_d, std::ptrdiff_t n_begin,
                         std::size_t n_obs, std::ptrdiff_t desired_origin) {
  if (n_obs < 1) throw std::invalid_argument("build_stats: n_obs must be >= 1");
  if (resp_b.lj() != resp_d.lj() || resp_b.l_count != resp_d.l_count)
    throw std::invalid_argument("build_stats: LJ mismatch between zones");
  if (desired.size() != resp_b.seq.size())
    throw std::invalid_argument("build_stats: desired/bright point count mismatch");
  if (resp_b.seq.empty() || resp_d.seq.empty())
    throw std::invalid_argument("build_stats: empty point set");

  const std::size_t lj = resp_b.lj();
  SpatialStats st;
  st.l_count = resp_b.l_count;
  st.j_len = resp_b.j_len;
  st.m_b = resp_b.seq.size();
  st.m_d = resp_d.seq.size();
  st.n_obs = n_obs;
  st.r_b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lj));
  st.R_b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lj), static_cast<Eigen::Index>(lj));
  st.R_d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lj), static_cast<Eigen::Index>(lj));

  accumulate_zone(resp_b, n_begin, n_obs, st.R_b, &desired, &st.r_b, &st.sigma_d_sq,
                  desired_origin);
  accumulate_zone(resp_d, n_begin, n_obs, st.R_d, nullptr, nullptr, nullptr);

  const double scale_b = 1.0 / (static_cast<double>(st.m_b) * static_cast<double>(n_obs));
  const double scale_d = 1.0 / (static_cast<double>(st.m_d) * static_cast<double>(n_obs));
  st.sigma_d_sq *= scale_b;
  st.r_b *= scale_b;
  Eigen::MatrixXd full_b = st.R_b.selfadjointView<Eigen::Lower>();
  Eigen::MatrixXd full_d = st.R_d.selfadjointView<Eigen::Lower>();
  st.R_b = full_b * scale_b;
  st.R_d = full_d * scale_d;
  return st;
}

RankDiagnostic rank_condition(const SpatialStats& stats, std::size_t m_d, std::size_t n_obs,
                              std::size_t k_taps, std::size_t l_count, std::size_t j_len) {
  RankDiagnostic diag;
  diag.lj = l_count * j_len;
  diag.bound_lhs = m_d * std::min(n_obs, k_taps + j_len - 1);
  diag.condition = diag.bound_lhs >= diag.lj;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stats.R_d);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-10 * (sv.size() > 0 ? sv[0] : 0.0);
  diag.estimated_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++diag.estimated_rank;
  return diag;
}

}  // namespace vz
