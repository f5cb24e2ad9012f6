#pragma once

#include <Eigen/Dense>

#include "vastzones/stats.hpp"

namespace vz {

// Generalized eigenpairs of (R_b, R_d): U^T R_b U = diag(lambda), U^T R_d U = I,
// eigenvalues descending.
struct JointDiag {
  Eigen::MatrixXd u;
  Eigen::VectorXd lambda;
};

JointDiag joint_diagonalize(const Eigen::MatrixXd& r_b, const Eigen::MatrixXd& r_d,
                            double regularization = 0.0);
JointDiag joint_diagonalize(const SpatialStats& stats, double regularization = 0.0);

struct ConditionReport {
  double resid_b = 0.0;   // ||U^T R_b U - Lambda||_F / ||Lambda||_F
  double resid_d = 0.0;   // ||U^T R_d U - I||_F / sqrt(LJ)
  double spread = 0.0;    // lambda_1 / lambda_LJ
  double rd_cond = 0.0;   // condition estimate of R_d
};

ConditionReport condition_report(const JointDiag& jd, const SpatialStats& stats);
ConditionReport condition_report(const JointDiag& jd, const Eigen::MatrixXd& r_b,
                                 const Eigen::MatrixXd& r_d);

}  // namespace vz
