#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "vastzones/room.hpp"

namespace {

vz::SceneGeometry one_pair(const vz::Vec3& speaker, const vz::Vec3& receiver) {
  vz::SceneGeometry scene;
  scene.loudspeakers = {speaker};
  scene.control_alpha = {receiver};
  scene.virtual_source = {speaker[0], speaker[1], speaker[2] + 0.5};
  return scene;
}

double schroeder_t60(const double* h, std::size_t k, double fs) {
  std::vector<double> edc(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) edc[i] = edc[i + 1] + h[i] * h[i];
  const double total = edc[0];
  for (std::size_t i = 0; i < k; ++i)
    if (edc[i] <= total * 1e-6) return static_cast<double>(i) / fs;
  return -1.0;
}

}  // namespace

TEST_CASE("anechoic direct path lands at d/c in samples with 1/(4 pi d) gain") {
  vz::RoomSpec room;
  room.bounded = false;
  auto scene = one_pair({0.0, 0.0, 0.0}, {343.0, 0.0, 0.0});
  auto set = vz::generate_anechoic_rirs(scene, room, 16050);
  const double* h = set.rir(0, 0);
  const double want = 1.0 / (4.0 * std::numbers::pi * 343.0);
  CHECK(h[16000] == doctest::Approx(want).epsilon(1e-12));
  // integer delay: the windowed sinc is zero at every other tap
  CHECK(std::abs(h[15999]) < 1e-15);
  CHECK(std::abs(h[16001]) < 1e-15);
  double peak = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < set.k_taps; ++i)
    if (std::abs(h[i]) > peak) {
      peak = std::abs(h[i]);
      arg = i;
    }
  CHECK(arg == 16000);
}

TEST_CASE("equidistant receivers get identical responses") {
  vz::RoomSpec room;
  room.bounded = false;
  vz::SceneGeometry scene;
  scene.loudspeakers = {{2.0, 2.0, 1.0}};
  scene.control_alpha = {{3.0, 2.0, 1.0}};
  scene.control_beta = {{1.0, 2.0, 1.0}};
  scene.virtual_source = {2.0, 2.0, 2.0};
  auto set = vz::generate_anechoic_rirs(scene, room, 256);
  for (std::size_t k = 0; k < set.k_taps; ++k)
    CHECK(std::abs(set.rir(0, 0)[k] - set.rir(1, 0)[k]) < 1e-12);
}

TEST_CASE("doubling the distance halves the peak") {
  const double d1 = 343.0 * 60.0 / 16000.0;  // exact 60-sample delay
  vz::RoomSpec room;
  room.bounded = false;
  vz::SceneGeometry scene;
  scene.loudspeakers = {{0.0, 0.0, 0.0}};
  scene.control_alpha = {{d1, 0.0, 0.0}, {2.0 * d1, 0.0, 0.0}};
  scene.virtual_source = {0.0, 0.0, 1.0};
  auto set = vz::generate_anechoic_rirs(scene, room, 256);
  CHECK(set.rir(0, 0)[60] == doctest::Approx(2.0 * set.rir(1, 0)[120]).epsilon(1e-9));
}

TEST_CASE("image source at order zero equals the anechoic response") {
  vz::RoomSpec room;
  room.dimensions = {4.0, 3.0, 2.5};
  room.bounded = true;
  room.t60 = 0.3;
  auto scene = one_pair({1.0, 1.2, 1.1}, {2.7, 1.9, 1.3});
  auto rev = vz::generate_image_source_rirs(scene, room, 512, 0);
  vz::RoomSpec free_field = room;
  free_field.bounded = false;
  free_field.t60 = 0.0;
  auto dry = vz::generate_anechoic_rirs(scene, free_field, 512);
  for (std::size_t k = 0; k < 512; ++k)
    CHECK(std::abs(rev.rir(0, 0)[k] - dry.rir(0, 0)[k]) < 1e-12);
}

TEST_CASE("image source requires a bounded room with positive t60") {
  auto scene = one_pair({1.0, 1.0, 1.0}, {2.0, 2.0, 1.0});
  vz::RoomSpec unbounded;
  unbounded.bounded = false;
  CHECK_THROWS(vz::generate_image_source_rirs(scene, unbounded, 256, 2));
  vz::RoomSpec dead;
  dead.dimensions = {4.0, 4.0, 3.0};
  dead.bounded = true;
  dead.t60 = 0.0;
  CHECK_THROWS(vz::generate_image_source_rirs(scene, dead, 256, 2));
}

TEST_CASE("direct path beyond the tap budget is an error") {
  vz::RoomSpec room;
  room.bounded = false;
  auto scene = one_pair({0.0, 0.0, 0.0}, {50.0, 0.0, 0.0});
  CHECK_THROWS(vz::generate_anechoic_rirs(scene, room, 128));
}

TEST_CASE("schroeder decay of a reverberant cube matches the requested t60") {
  vz::RoomSpec room;
  room.dimensions = {5.0, 5.0, 5.0};
  room.bounded = true;
  room.t60 = 0.2;
  auto scene = one_pair({1.2, 1.3, 1.1}, {3.4, 3.2, 1.9});
  auto set = vz::generate_image_source_rirs(scene, room, 4096, 20);
  const double measured = schroeder_t60(set.rir(0, 0), set.k_taps, room.sample_rate);
  CHECK(measured > 0.16);
  CHECK(measured < 0.24);
}

TEST_CASE("swapping source and receiver preserves the response") {
  vz::RoomSpec room;
  room.dimensions = {4.2, 3.6, 2.7};
  room.bounded = true;
  room.t60 = 0.25;
  const vz::Vec3 a{1.1, 0.9, 1.2}, b{3.0, 2.4, 1.6};
  auto fwd = vz::generate_image_source_rirs(one_pair(a, b), room, 900, 6);
  auto rev = vz::generate_image_source_rirs(one_pair(b, a), room, 900, 6);
  double worst = 0.0;
  for (std::size_t k = 0; k < 900; ++k)
    worst = std::max(worst, std::abs(fwd.rir(0, 0)[k] - rev.rir(0, 0)[k]));
  CHECK(worst < 1e-10);
}

TEST_CASE("rir container round trip") {
  vz::RoomSpec room;
  room.dimensions = {4.0, 3.0, 2.5};
  room.bounded = true;
  room.t60 = 0.3;
  vz::SceneGeometry scene;
  scene.loudspeakers = {{1.0, 1.0, 1.0}, {3.0, 1.0, 1.0}};
  scene.control_alpha = {{2.0, 2.0, 1.2}};
  scene.control_beta = {{2.5, 2.2, 1.2}};
  scene.virtual_source = {2.0, 0.5, 1.0};
  auto set = vz::generate_image_source_rirs(scene, room, 300, 3);
  const std::string path = "room_rt.vzrir";
  vz::save_rirs(path, set);
  auto back = vz::load_rirs(path);
  CHECK(back.m_count == set.m_count);
  CHECK(back.l_count == set.l_count);
  CHECK(back.k_taps == set.k_taps);
  CHECK(back.sample_rate == doctest::Approx(set.sample_rate));
  REQUIRE(back.h.size() == set.h.size());
  REQUIRE(back.h_virtual.size() == set.h_virtual.size());
  for (std::size_t i = 0; i < set.h.size(); ++i) CHECK(back.h[i] == set.h[i]);
  for (std::size_t i = 0; i < set.h_virtual.size(); ++i)
    CHECK(back.h_virtual[i] == set.h_virtual[i]);
  std::remove(path.c_str());
}

TEST_CASE("receiver layout indexes the canonical order") {
  vz::SceneGeometry scene;
  scene.loudspeakers = {{0.0, 0.0, 0.0}};
  scene.control_alpha = {{1.0, 0.0, 0.0}, {1.1, 0.0, 0.0}};
  scene.control_beta = {{2.0, 0.0, 0.0}, {2.1, 0.0, 0.0}, {2.2, 0.0, 0.0}};
  scene.monitor_alpha = {{3.0, 0.0, 0.0}};
  scene.monitor_beta = {{4.0, 0.0, 0.0}, {4.1, 0.0, 0.0}};
  auto layout = vz::layout_of(scene);
  CHECK(layout.total() == 8);
  CHECK(layout.control_alpha_idx() == std::vector<std::size_t>{0, 1});
  CHECK(layout.control_beta_idx() == std::vector<std::size_t>{2, 3, 4});
  CHECK(layout.monitor_alpha_idx() == std::vector<std::size_t>{5});
  CHECK(layout.monitor_beta_idx() == std::vector<std::size_t>{6, 7});
  CHECK(scene.all_receivers().size() == 8);
  CHECK(scene.all_receivers()[5][0] == doctest::Approx(3.0));
}
