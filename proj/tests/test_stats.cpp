#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "vastzones/signal.hpp"
#include "vastzones/stats.hpp"

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

// M=2 receivers (one bright, one dark), L=2, random K-tap responses.
vz::RIRSet random_rirs(std::size_t k_taps, unsigned seed) {
  vz::RIRSet set;
  set.m_count = 2;
  set.l_count = 2;
  set.k_taps = k_taps;
  set.sample_rate = 16000.0;
  set.h = random_vec(set.m_count * set.l_count * k_taps, seed);
  set.h_virtual.assign(set.m_count * k_taps, 0.0);
  return set;
}

// Stacked regressor straight from the definition, no shared code.
Eigen::VectorXd naive_y(const std::vector<std::vector<double>>& s, std::size_t j_len,
                        std::ptrdiff_t n) {
  const std::size_t l_count = s.size();
  Eigen::VectorXd y(static_cast<Eigen::Index>(l_count * j_len));
  for (std::size_t l = 0; l < l_count; ++l)
    for (std::size_t j = 0; j < j_len; ++j) {
      const std::ptrdiff_t idx = n - static_cast<std::ptrdiff_t>(j);
      y[static_cast<Eigen::Index>(l * j_len + j)] =
          (idx >= 0 && idx < static_cast<std::ptrdiff_t>(s[l].size()))
              ? s[l][static_cast<std::size_t>(idx)]
              : 0.0;
    }
  return y;
}

}  // namespace

TEST_CASE("delta responses reproduce the delayed input") {
  vz::RIRSet set;
  set.m_count = 1;
  set.l_count = 1;
  set.k_taps = 8;
  set.sample_rate = 16000.0;
  set.h.assign(8, 0.0);
  set.h[3] = 1.0;
  set.h_virtual.assign(8, 0.0);
  auto x = random_vec(20, 5);
  auto resp = vz::build_uncontrolled(x, set, {0}, 2);
  for (std::ptrdiff_t n = 0; n < 30; ++n) {
    const double want = (n >= 3 && n < 23) ? x[static_cast<std::size_t>(n - 3)] : 0.0;
    CHECK(resp.sample(0, 0, n) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("build_stats matches a triple-loop oracle") {
  const std::size_t j_len = 3, n_obs = 22;
  auto set = random_rirs(4, 101);
  auto x = random_vec(16, 102);
  auto d = random_vec(30, 103);

  auto resp_b = vz::build_uncontrolled(x, set, {0}, j_len);
  auto resp_d = vz::build_uncontrolled(x, set, {1}, j_len);
  auto st = vz::build_stats({d}, resp_b, resp_d, 0, n_obs);

  // oracle from plain convolutions
  std::vector<std::vector<double>> s_b(2), s_d(2);
  for (std::size_t l = 0; l < 2; ++l) {
    s_b[l] = vz::convolve_direct(x, set.rir_vec(0, l));
    s_d[l] = vz::convolve_direct(x, set.rir_vec(1, l));
  }
  const Eigen::Index lj = 6;
  Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(lj, lj), rd = Eigen::MatrixXd::Zero(lj, lj);
  Eigen::VectorXd cross = Eigen::VectorXd::Zero(lj);
  double sigma = 0.0;
  for (std::size_t n = 0; n < n_obs; ++n) {
    auto yb = naive_y(s_b, j_len, static_cast<std::ptrdiff_t>(n));
    auto yd = naive_y(s_d, j_len, static_cast<std::ptrdiff_t>(n));
    rb += yb * yb.transpose();
    rd += yd * yd.transpose();
    cross += yb * d[n];
    sigma += d[n] * d[n];
  }
  const double scale = 1.0 / static_cast<double>(n_obs);
  rb *= scale;
  rd *= scale;
  cross *= scale;
  sigma *= scale;

  CHECK((st.R_b - rb).norm() / rb.norm() < 1e-12);
  CHECK((st.R_d - rd).norm() / rd.norm() < 1e-12);
  CHECK((st.r_b - cross).norm() / cross.norm() < 1e-12);
  CHECK(st.sigma_d_sq == doctest::Approx(sigma).epsilon(1e-12));
  CHECK(st.lj() == 6);
  CHECK(st.m_b == 1);
  CHECK(st.m_d == 1);
}

TEST_CASE("residual error expands into the accumulated statistics") {
  const std::size_t j_len = 4, n_obs = 40;
  auto set = random_rirs(6, 201);
  auto x = random_vec(24, 202);
  auto d = random_vec(64, 203);
  auto resp_b = vz::build_uncontrolled(x, set, {0}, j_len);
  auto resp_d = vz::build_uncontrolled(x, set, {1}, j_len);
  auto st = vz::build_stats({d}, resp_b, resp_d, 0, n_obs);

  auto q_vec = random_vec(st.lj(), 204);
  Eigen::Map<Eigen::VectorXd> q(q_vec.data(), static_cast<Eigen::Index>(q_vec.size()));
  double direct = 0.0;
  Eigen::VectorXd y(static_cast<Eigen::Index>(st.lj()));
  for (std::size_t n = 0; n < n_obs; ++n) {
    resp_b.fill_y(0, static_cast<std::ptrdiff_t>(n), y);
    const double e = d[n] - q.dot(y);
    direct += e * e;
  }
  direct /= static_cast<double>(n_obs);
  const double expanded = st.sigma_d_sq - 2.0 * q.dot(st.r_b) + q.dot(st.R_b * q);
  CHECK(expanded == doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("zero desired zeroes the cross terms only") {
  auto set = random_rirs(4, 301);
  auto x = random_vec(16, 302);
  std::vector<double> d(30, 0.0);
  auto resp_b = vz::build_uncontrolled(x, set, {0}, 3);
  auto resp_d = vz::build_uncontrolled(x, set, {1}, 3);
  auto st = vz::build_stats({d}, resp_b, resp_d, 0, 20);
  CHECK(st.r_b.norm() == 0.0);
  CHECK(st.sigma_d_sq == 0.0);
  CHECK(st.R_b.norm() > 0.0);
}

TEST_CASE("single observation gives a rank-one outer product") {
  auto set = random_rirs(4, 401);
  auto x = random_vec(16, 402);
  auto d = random_vec(30, 403);
  auto resp_b = vz::build_uncontrolled(x, set, {0}, 3);
  auto resp_d = vz::build_uncontrolled(x, set, {1}, 3);
  auto st = vz::build_stats({d}, resp_b, resp_d, 5, 1);
  Eigen::VectorXd y(6);
  resp_b.fill_y(0, 5, y);
  CHECK((st.R_b - y * y.transpose()).norm() < 1e-12 * st.R_b.norm());
  auto diag = vz::rank_condition(st, 1, 1, 4, 2, 3);
  CHECK(diag.estimated_rank == 1);
}

TEST_CASE("linear scaling of desired and input") {
  auto set = random_rirs(4, 501);
  auto x = random_vec(16, 502);
  auto d = random_vec(30, 503);
  auto resp_b = vz::build_uncontrolled(x, set, {0}, 3);
  auto resp_d = vz::build_uncontrolled(x, set, {1}, 3);
  auto base = vz::build_stats({d}, resp_b, resp_d, 0, 20);

  auto d2 = d;
  for (auto& v : d2) v *= 3.0;
  auto scaled_d = vz::build_stats({d2}, resp_b, resp_d, 0, 20);
  CHECK((scaled_d.r_b - 3.0 * base.r_b).norm() < 1e-12 * base.r_b.norm());
  CHECK(scaled_d.sigma_d_sq == doctest::Approx(9.0 * base.sigma_d_sq).epsilon(1e-12));
  CHECK((scaled_d.R_b - base.R_b).norm() < 1e-14);

  auto x2 = x;
  for (auto& v : x2) v *= 2.0;
  auto resp_b2 = vz::build_uncontrolled(x2, set, {0}, 3);
  auto resp_d2 = vz::build_uncontrolled(x2, set, {1}, 3);
  auto scaled_x = vz::build_stats({d}, resp_b2, resp_d2, 0, 20);
  CHECK((scaled_x.R_b - 4.0 * base.R_b).norm() < 1e-12 * base.R_b.norm());
  CHECK((scaled_x.R_d - 4.0 * base.R_d).norm() < 1e-12 * base.R_d.norm());
  CHECK((scaled_x.r_b - 2.0 * base.r_b).norm() < 1e-12 * base.r_b.norm());
}

TEST_CASE("centered delta weighting leaves the statistics unchanged") {
  auto set = random_rirs(4, 601);
  auto x = random_vec(16, 602);
  auto d = random_vec(40, 603);
  std::vector<double> delta(5, 0.0);
  delta[2] = 1.0;
  std::vector<std::vector<double>> w{delta};

  auto plain_b = vz::build_uncontrolled(x, set, {0}, 3);
  auto plain_d = vz::build_uncontrolled(x, set, {1}, 3);
  auto wt_b = vz::build_uncontrolled(x, set, {0}, 3, &w);
  auto wt_d = vz::build_uncontrolled(x, set, {1}, 3, &w);
  CHECK(wt_b.delay == 2);

  auto a = vz::build_stats({d}, plain_b, plain_d, 0, 24);
  auto b = vz::build_stats({d}, wt_b, wt_d, 0, 24);
  CHECK((a.R_b - b.R_b).norm() < 1e-12 * a.R_b.norm());
  CHECK((a.R_d - b.R_d).norm() < 1e-12 * a.R_d.norm());
  CHECK((a.r_b - b.r_b).norm() < 1e-12 * a.r_b.norm());
}

TEST_CASE("rank condition bound") {
  auto set = random_rirs(4, 701);
  auto x = random_vec(16, 702);
  auto d = random_vec(30, 703);
  auto resp_b = vz::build_uncontrolled(x, set, {0}, 3);
  auto resp_d = vz::build_uncontrolled(x, set, {1}, 3);
  auto st = vz::build_stats({d}, resp_b, resp_d, 0, 22);

  auto ok = vz::rank_condition(st, 1, 22, 4, 2, 3);
  CHECK(ok.bound_lhs == 6);  // min(22, 4+3-1) = 6 >= LJ = 6
  CHECK(ok.lj == 6);
  CHECK(ok.condition);

  auto bad = vz::rank_condition(st, 1, 1, 4, 2, 3);
  CHECK(bad.bound_lhs == 1);
  CHECK_FALSE(bad.condition);
}

TEST_CASE("mismatched shapes are rejected") {
  auto set = random_rirs(4, 801);
  auto x = random_vec(16, 802);
  auto d = random_vec(30, 803);
  auto resp_b = vz::build_uncontrolled(x, set, {0}, 3);
  auto resp_d2 = vz::build_uncontrolled(x, set, {1}, 4);
  CHECK_THROWS(vz::build_stats({d}, resp_b, resp_d2, 0, 10));
  auto resp_d = vz::build_uncontrolled(x, set, {1}, 3);
  CHECK_THROWS(vz::build_stats({}, resp_b, resp_d, 0, 10));
  CHECK_THROWS(vz::build_stats({d}, resp_b, resp_d, 0, 0));
}
