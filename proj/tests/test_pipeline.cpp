#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "vastzones/metrics.hpp"
#include "vastzones/pipeline.hpp"
#include "vastzones/room.hpp"
#include "vastzones/signal.hpp"

namespace {

vz::AudioSignal noise(std::size_t n, unsigned seed, double fs = 16000.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.1);
  vz::AudioSignal x;
  x.sample_rate = fs;
  x.samples.resize(n);
  for (auto& v : x.samples) v = dist(rng);
  return x;
}

// One speaker with the virtual source on top of it, one control point per zone.
struct CoLocated {
  vz::SceneGeometry scene;
  vz::ReceiverLayout layout;
  vz::RIRSet rirs;
};

CoLocated co_located(std::size_t k_taps = 96) {
  CoLocated s;
  s.scene.loudspeakers = {{2.0, 2.0, 1.2}};
  s.scene.virtual_source = {2.0, 2.0, 1.2};
  s.scene.control_alpha = {{2.5, 2.0, 1.2}};
  s.scene.control_beta = {{1.5, 2.0, 1.2}};
  s.layout = vz::layout_of(s.scene);
  vz::RoomSpec room;
  room.bounded = false;
  s.rirs = vz::generate_anechoic_rirs(s.scene, room, k_taps);
  return s;
}

}  // namespace

TEST_CASE("desired field routes the virtual source to bright points only") {
  auto s = co_located();
  auto x = noise(300, 3);
  auto d = vz::desired_field(x.samples, s.rirs, {0}, 300);
  REQUIRE(d.size() == 2);
  auto want = vz::convolve(x.samples, s.rirs.vrir_vec(0));
  for (std::size_t n = 0; n < 300; ++n) {
    CHECK(d[0][n] == doctest::Approx(want[n]).epsilon(1e-12));
    CHECK(d[1][n] == 0.0);
  }
  CHECK_THROWS(vz::desired_field(x.samples, s.rirs, {5}, 300));
}

TEST_CASE("pass-through render reproduces the co-located desired field exactly") {
  auto s = co_located();
  auto x = noise(500, 7);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::no_control;
  cfg.j_len = 4;
  auto zr = vz::render_static(x, true, s.rirs, s.layout, cfg);
  REQUIRE(zr.p.size() == 2);
  double worst = 0.0;
  for (std::size_t n = 0; n < 500; ++n)
    worst = std::max(worst, std::abs(zr.p[0][n] - zr.d[0][n]));
  CHECK(worst < 1e-12);
}

TEST_CASE("no control on a mirror-symmetric scene gives zero contrast") {
  vz::SceneGeometry scene;
  scene.loudspeakers = {{2.0, 1.0, 1.2}, {2.0, 3.0, 1.2}};
  scene.virtual_source = {2.0, 0.2, 1.2};
  scene.control_alpha = {{1.7, 1.8, 1.2}, {2.3, 1.8, 1.2}};
  scene.control_beta = {{1.7, 2.2, 1.2}, {2.3, 2.2, 1.2}};
  auto layout = vz::layout_of(scene);
  vz::RoomSpec room;
  room.bounded = false;
  auto rirs = vz::generate_anechoic_rirs(scene, room, 128);
  auto x = noise(800, 11);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::no_control;
  cfg.j_len = 4;
  auto zr = vz::render_static(x, true, rirs, layout, cfg);
  std::vector<std::vector<double>> bright{zr.p[0], zr.p[1]};
  std::vector<std::vector<double>> dark{zr.p[2], zr.p[3]};
  const double ac = vz::acoustic_contrast_db(bright, dark, {0, 800});
  CHECK(std::abs(ac) < 0.01);
}

TEST_CASE("full-span design drives the reproduction error to the floor") {
  auto s = co_located();
  auto x = noise(1200, 13);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::vast;
  cfg.j_len = 8;
  cfg.params.v = 8;  // LJ for one speaker
  cfg.params.mu = 0.0;
  vz::RenderInfo info;
  auto zr = vz::render_static(x, true, s.rirs, s.layout, cfg, &info);
  CHECK(vz::nsdp_db(zr.p[0], zr.d[0], {0, 1200}) < -60.0);
  CHECK(info.fallbacks == 0);
}

TEST_CASE("two-program render superposes the zone fields") {
  auto s = co_located();
  auto xa = noise(600, 17);
  auto xb = noise(600, 18);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::vast;
  cfg.j_len = 6;
  cfg.params.v = 6;
  cfg.params.mu = 1.0;
  auto field = vz::render_static(xa, xb, s.rirs, s.layout, cfg);
  CHECK(field.len == 600);
  CHECK(field.metric_window.begin == 0);
  CHECK(field.metric_window.end == 600);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 600; ++n)
      CHECK(field.superposed[m][n] ==
            doctest::Approx(field.alpha.p[m][n] + field.beta.p[m][n]).epsilon(1e-12));
  // desired fields stay inside their own zones
  for (std::size_t n = 0; n < 600; ++n) {
    CHECK(field.alpha.d[1][n] == 0.0);
    CHECK(field.beta.d[0][n] == 0.0);
  }
}

TEST_CASE("method guards") {
  auto s = co_located();
  auto x = noise(300, 19);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::ap_vast;
  CHECK_THROWS(vz::render_static(x, true, s.rirs, s.layout, cfg));
  cfg.method = vz::Method::vast;
  CHECK_THROWS(vz::render_ap_vast(x, x, s.rirs, s.layout, cfg));
  cfg.method = vz::Method::ap_vast;
  cfg.n_seg = 128;
  cfg.eta = 32;  // not N/2
  CHECK_THROWS(vz::render_ap_vast(x, x, s.rirs, s.layout, cfg));
  CHECK(std::string(vz::method_name(vz::Method::p_vast)) == "p_vast");
}

TEST_CASE("segment count covers the primed frame layout") {
  CHECK(vz::ap_vast_segment_count(96000, 960, 480) == 201);
  CHECK(vz::ap_vast_segment_count(8, 4, 2) == 5);
  CHECK(vz::ap_vast_segment_count(960, 960, 480) == 3);
}

TEST_CASE("adaptive render of silence stays silent and falls back per segment") {
  auto s = co_located(64);
  vz::AudioSignal zero;
  zero.sample_rate = 16000.0;
  zero.samples.assign(2000, 0.0);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::ap_vast;
  cfg.j_len = 8;
  cfg.n_seg = 128;
  cfg.eta = 64;
  cfg.weighting = true;
  cfg.w_taps = 65;
  cfg.params.v = 8;
  cfg.params.mu = 1.0;
  auto field = vz::render_ap_vast(zero, zero, s.rirs, s.layout, cfg);
  const std::size_t segs = vz::ap_vast_segment_count(2000, 128, 64);
  CHECK(field.info.segments == segs);
  CHECK(field.info.fallbacks == 2 * segs);
  double worst = 0.0;
  for (const auto& row : field.superposed)
    for (double v : row) worst = std::max(worst, std::abs(v));
  CHECK(worst == 0.0);
  CHECK(field.metric_window.begin == 128);
  CHECK(field.metric_window.end == 2000 - 128);
}

TEST_CASE("adaptive render is deterministic") {
  auto s = co_located(64);
  auto xa = noise(1500, 23);
  auto xb = noise(1500, 24);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::ap_vast;
  cfg.j_len = 6;
  cfg.n_seg = 128;
  cfg.eta = 64;
  cfg.weighting = true;
  cfg.w_taps = 65;
  cfg.params.v = 4;
  cfg.params.mu = 1.0;
  auto a = vz::render_ap_vast(xa, xb, s.rirs, s.layout, cfg);
  auto b = vz::render_ap_vast(xa, xb, s.rirs, s.layout, cfg);
  for (std::size_t m = 0; m < a.superposed.size(); ++m)
    for (std::size_t n = 0; n < a.len; ++n)
      CHECK(a.superposed[m][n] == b.superposed[m][n]);
  CHECK(a.info.segments == b.info.segments);
}

TEST_CASE("captured filters stack one vector per segment") {
  auto s = co_located(64);
  auto xa = noise(1200, 29);
  auto xb = noise(1200, 30);
  vz::ScenarioConfig cfg;
  cfg.method = vz::Method::ap_vast;
  cfg.j_len = 6;
  cfg.n_seg = 128;
  cfg.eta = 64;
  cfg.weighting = false;
  cfg.params.v = 6;
  cfg.params.mu = 1.0;
  cfg.capture_filters = true;
  auto field = vz::render_ap_vast(xa, xb, s.rirs, s.layout, cfg);
  CHECK(field.info.filters.size() == field.info.segments);
  for (const auto& q : field.info.filters) CHECK(q.size() == 6);
}
