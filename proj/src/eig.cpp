#include "vastzones/eig.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vz {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string("joint_diagonalize: ") + name + " not square");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300))
    throw std::invalid_argument(std::string("joint_diagonalize: ") + name + " not symmetric");
}

}  // namespace

JointDiag joint_diagonalize(const Eigen::MatrixXd& r_b, const Eigen::MatrixXd& r_d,
                            double regularization) {
  check_symmetric(r_b, "R_b");
  check_symmetric(r_d, "R_d");
  if (r_b.rows() != r_d.rows())
    throw std::invalid_argument("joint_diagonalize: dimension mismatch");
  if (regularization < 0.0)
    throw std::invalid_argument("joint_diagonalize: regularization must be >= 0");

  const Eigen::Index n = r_d.rows();
  Eigen::MatrixXd rd_reg = r_d;
  if (regularization > 0.0)
    rd_reg.diagonal().array() += regularization;

  Eigen::LLT<Eigen::MatrixXd> llt(rd_reg);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "joint_diagonalize: Cholesky of R_d failed; increase regularization");

  // A = G^-1 R_b G^-T with R_d + reg I = G G^T, then U = G^-T Q.
  Eigen::MatrixXd a = llt.matrixL().solve(r_b);
  a = llt.matrixL().solve(a.transpose().eval());
  a = 0.5 * (a + a.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("joint_diagonalize: eigensolver failed");

  JointDiag jd;
  jd.lambda.resize(n);
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    jd.lambda[i] = es.eigenvalues()[n - 1 - i];
    q.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  jd.u = llt.matrixL().transpose().solve(q);

  const double lead = jd.lambda.size() > 0 ? jd.lambda[0] : 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (jd.lambda[i] < 0.0 && jd.lambda[i] >= -1e-10 * lead) jd.lambda[i] = 0.0;
  return jd;
}

JointDiag joint_diagonalize(const SpatialStats& stats, double regularization) {
  return joint_diagonalize(stats.R_b, stats.R_d, regularization);
}

ConditionReport condition_report(const JointDiag& jd, const Eigen::MatrixXd& r_b,
                                 const Eigen::MatrixXd& r_d) {
  ConditionReport rep;
  const Eigen::Index n = jd.u.cols();
  const Eigen::MatrixXd tb = jd.u.transpose() * r_b * jd.u;
  const Eigen::MatrixXd td = jd.u.transpose() * r_d * jd.u;
  Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n, n);
  lam.diagonal() = jd.lambda;
  const double lam_norm = std::max(lam.norm(), 1e-300);
  rep.resid_b = (tb - lam).norm() / lam_norm;
  rep.resid_d = (td - Eigen::MatrixXd::Identity(n, n)).norm() / std::sqrt(static_cast<double>(n));
  const double tail = jd.lambda[n - 1];
  rep.spread = tail > 0.0 ? jd.lambda[0] / tail : std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r_d, Eigen::EigenvaluesOnly);
  const double emin = es.eigenvalues().minCoeff();
  const double emax = es.eigenvalues().maxCoeff();
  rep.rd_cond = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
  return rep;
}

ConditionReport condition_report(const JointDiag& jd, const SpatialStats& stats) {
  return condition_report(jd, stats.R_b, stats.R_d);
}

}  // namespace vz
