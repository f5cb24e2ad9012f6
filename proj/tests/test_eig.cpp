#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "vastzones/eig.hpp"

namespace {

Eigen::MatrixXd random_spd(Eigen::Index n, unsigned seed, double ridge = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = dist(rng);
  Eigen::MatrixXd m = a * a.transpose();
  m.diagonal().array() += ridge;
  return m;
}

}  // namespace

TEST_CASE("identity pair diagonalizes to unit eigenvalues") {
  const Eigen::Index n = 6;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  auto jd = vz::joint_diagonalize(eye, eye);
  for (Eigen::Index i = 0; i < n; ++i) CHECK(jd.lambda[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((jd.u.transpose() * jd.u - eye).norm() < 1e-12);
}

TEST_CASE("diagonal problem recovers the ratios in descending order") {
  Eigen::MatrixXd rb = Eigen::Vector3d(1.0, 9.0, 4.0).asDiagonal();
  Eigen::MatrixXd rd = Eigen::MatrixXd::Identity(3, 3);
  auto jd = vz::joint_diagonalize(rb, rd);
  CHECK(jd.lambda[0] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(jd.lambda[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(jd.lambda[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(jd.u.col(0)[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random SPD pair satisfies both diagonalization identities") {
  const Eigen::Index n = 12;
  auto rb = random_spd(n, 11);
  auto rd = random_spd(n, 12, 0.5);
  auto jd = vz::joint_diagonalize(rb, rd);

  Eigen::MatrixXd lam = jd.lambda.asDiagonal();
  CHECK((jd.u.transpose() * rb * jd.u - lam).norm() / lam.norm() < 1e-9);
  CHECK((jd.u.transpose() * rd * jd.u - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-9);
  for (Eigen::Index i = 0; i + 1 < n; ++i) CHECK(jd.lambda[i] >= jd.lambda[i + 1]);

  // independent oracle: eigenvalues of the unsymmetric product
  Eigen::EigenSolver<Eigen::MatrixXd> es(rd.inverse() * rb);
  std::vector<double> want(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK(std::abs(es.eigenvalues()[i].imag()) < 1e-9);
    want[static_cast<std::size_t>(i)] = es.eigenvalues()[i].real();
  }
  std::sort(want.begin(), want.end(), std::greater<>());
  for (Eigen::Index i = 0; i < n; ++i)
    CHECK(jd.lambda[i] == doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("rank deficient numerator clamps tiny negatives to zero") {
  const Eigen::Index n = 8;
  Eigen::MatrixXd g(n, 2);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) g(i, j) = dist(rng);
  Eigen::MatrixXd rb = g * g.transpose();  // rank 2
  auto rd = random_spd(n, 32, 0.5);
  auto jd = vz::joint_diagonalize(rb, rd);
  for (Eigen::Index i = 0; i < n; ++i) CHECK(jd.lambda[i] >= 0.0);
  CHECK(jd.lambda[2] < 1e-9 * jd.lambda[0]);
}

TEST_CASE("leading eigenvector maximizes the generalized Rayleigh quotient") {
  const Eigen::Index n = 10;
  auto rb = random_spd(n, 41);
  auto rd = random_spd(n, 42, 0.5);
  auto jd = vz::joint_diagonalize(rb, rd);
  const Eigen::VectorXd u1 = jd.u.col(0);
  const double at_u1 = u1.dot(rb * u1) / u1.dot(rd * u1);
  CHECK(at_u1 == doctest::Approx(jd.lambda[0]).epsilon(1e-9));
  std::mt19937_64 rng(43);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
    CHECK(v.dot(rb * v) / v.dot(rd * v) <= jd.lambda[0] * (1.0 + 1e-9));
  }
}

TEST_CASE("condition report flags a clean solve") {
  const Eigen::Index n = 9;
  auto rb = random_spd(n, 51);
  auto rd = random_spd(n, 52, 1.0);
  auto jd = vz::joint_diagonalize(rb, rd);
  auto rep = vz::condition_report(jd, rb, rd);
  CHECK(rep.resid_b < 1e-12);
  CHECK(rep.resid_d < 1e-12);
  CHECK(rep.spread == doctest::Approx(jd.lambda[0] / jd.lambda[n - 1]).epsilon(1e-9));
  CHECK(rep.rd_cond >= 1.0);

  // perturbing U away from the solution grows the residuals
  vz::JointDiag off = jd;
  off.u.col(0) *= 1.01;
  auto worse = vz::condition_report(off, rb, rd);
  CHECK(worse.resid_d > rep.resid_d);
}

TEST_CASE("singular denominator requires regularization") {
  Eigen::MatrixXd rb = random_spd(4, 61);
  Eigen::MatrixXd rd = Eigen::MatrixXd::Zero(4, 4);
  rd(0, 0) = 1.0;  // rank 1
  bool threw = false;
  try {
    vz::joint_diagonalize(rb, rd);
  } catch (const std::exception& e) {
    threw = true;
    CHECK(std::string(e.what()).find("regularization") != std::string::npos);
  }
  CHECK(threw);
  auto jd = vz::joint_diagonalize(rb, rd, 1e-6);
  CHECK(jd.lambda.size() == 4);
  CHECK(jd.lambda[0] > 0.0);
}

TEST_CASE("asymmetric input is rejected") {
  Eigen::MatrixXd rb = random_spd(3, 71);
  Eigen::MatrixXd rd = random_spd(3, 72, 0.5);
  rb(0, 1) += 1.0;
  CHECK_THROWS(vz::joint_diagonalize(rb, rd));
}
