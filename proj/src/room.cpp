#include "vastzones/room.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace vz {

namespace {

constexpr int kSincHalfWidth = 32;

double dist(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double sinc(double u) {
  if (u == 0.0) return 1.0;
  const double pu = std::numbers::pi * u;
  return std::sin(pu) / pu;
}

// Band-limited impulse: Hann-windowed sinc centered at fractional tap tc.
void add_impulse(double* dst, std::size_t k_taps, double tc, double amplitude) {
  const int lo = std::max(0, static_cast<int>(std::ceil(tc - kSincHalfWidth)));
  const int hi = std::min(static_cast<int>(k_taps) - 1,
                          static_cast<int>(std::floor(tc + kSincHalfWidth)));
  for (int k = lo; k <= hi; ++k) {
    const double u = static_cast<double>(k) - tc;
    const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * u / kSincHalfWidth));
    dst[k] += amplitude * sinc(u) * w;
  }
}

void render_point_source(double* dst, std::size_t k_taps, const Vec3& src, const Vec3& rcv,
                         const RoomSpec& room, const std::string& label) {
  const double d = dist(src, rcv);
  if (d <= 0.0)
    throw std::runtime_error("rir: coincident source and receiver (" + label + ")");
  const double tc = d / room.speed_of_sound * room.sample_rate;
  if (tc + kSincHalfWidth >= static_cast<double>(k_taps))
    throw std::runtime_error("rir: direct-path delay exceeds k_taps for " + label);
  add_impulse(dst, k_taps, tc, 1.0 / (4.0 * std::numbers::pi * d));
}

void render_image_source(double* dst, std::size_t k_taps, const Vec3& src, const Vec3& rcv,
                         const RoomSpec& room, double beta, int max_order,
                         const std::string& label) {
  const double d0 = dist(src, rcv);
  if (d0 <= 0.0)
    throw std::runtime_error("rir: coincident source and receiver (" + label + ")");
  const double tc0 = d0 / room.speed_of_sound * room.sample_rate;
  if (tc0 + kSincHalfWidth >= static_cast<double>(k_taps))
    throw std::runtime_error("rir: direct-path delay exceeds k_taps for " + label);

  const int n0 = max_order / 2 + 1;
  const double scale = room.sample_rate / room.speed_of_sound;
  for (int mx = -n0; mx <= n0; ++mx)
    for (int my = -n0; my <= n0; ++my)
      for (int mz = -n0; mz <= n0; ++mz)
        for (int q = 0; q < 8; ++q) {
          const int qx = q & 1, qy = (q >> 1) & 1, qz = (q >> 2) & 1;
          const int order =
              std::abs(2 * mx - qx) + std::abs(2 * my - qy) + std::abs(2 * mz - qz);
          if (order > max_order) continue;
          const double ix = (1 - 2 * qx) * src[0] + 2.0 * mx * room.dimensions[0] - rcv[0];
          const double iy = (1 - 2 * qy) * src[1] + 2.0 * my * room.dimensions[1] - rcv[1];
          const double iz = (1 - 2 * qz) * src[2] + 2.0 * mz * room.dimensions[2] - rcv[2];
          const double d = std::sqrt(ix * ix + iy * iy + iz * iz);
          if (d <= 0.0) continue;
          const double tc = d * scale;
          if (tc - kSincHalfWidth >= static_cast<double>(k_taps)) continue;
          add_impulse(dst, k_taps, tc,
                      std::pow(beta, order) / (4.0 * std::numbers::pi * d));
        }
}

RIRSet make_empty_set(const SceneGeometry& scene, const RoomSpec& room, std::size_t k_taps) {
  if (k_taps < 1) throw std::invalid_argument("rir: k_taps must be >= 1");
  if (scene.loudspeakers.empty()) throw std::invalid_argument("rir: no loudspeakers");
  RIRSet set;
  set.m_count = scene.all_receivers().size();
  set.l_count = scene.loudspeakers.size();
  set.k_taps = k_taps;
  set.sample_rate = room.sample_rate;
  set.h.assign(set.m_count * set.l_count * k_taps, 0.0);
  set.h_virtual.assign(set.m_count * k_taps, 0.0);
  return set;
}

}  // namespace

std::vector<Vec3> SceneGeometry::all_receivers() const {
  std::vector<Vec3> out;
  out.reserve(control_alpha.size() + control_beta.size() + monitor_alpha.size() +
              monitor_beta.size());
  out.insert(out.end(), control_alpha.begin(), control_alpha.end());
  out.insert(out.end(), control_beta.begin(), control_beta.end());
  out.insert(out.end(), monitor_alpha.begin(), monitor_alpha.end());
  out.insert(out.end(), monitor_beta.begin(), monitor_beta.end());
  return out;
}

namespace {
std::vector<std::size_t> iota_range(std::size_t begin, std::size_t count) {
  std::vector<std::size_t> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = begin + i;
  return v;
}
}  // namespace

std::vector<std::size_t> ReceiverLayout::control_alpha_idx() const {
  return iota_range(0, m_alpha);
}
std::vector<std::size_t> ReceiverLayout::control_beta_idx() const {
  return iota_range(m_alpha, m_beta);
}
std::vector<std::size_t> ReceiverLayout::monitor_alpha_idx() const {
  return iota_range(m_alpha + m_beta, mon_alpha);
}
std::vector<std::size_t> ReceiverLayout::monitor_beta_idx() const {
  return iota_range(m_alpha + m_beta + mon_alpha, mon_beta);
}

ReceiverLayout layout_of(const SceneGeometry& scene) {
  return ReceiverLayout{scene.control_alpha.size(), scene.control_beta.size(),
                        scene.monitor_alpha.size(), scene.monitor_beta.size()};
}

std::vector<double> RIRSet::rir_vec(std::size_t m, std::size_t l) const {
  const double* p = rir(m, l);
  return std::vector<double>(p, p + k_taps);
}

std::vector<double> RIRSet::vrir_vec(std::size_t m) const {
  const double* p = vrir(m);
  return std::vector<double>(p, p + k_taps);
}

RIRSet generate_anechoic_rirs(const SceneGeometry& scene, const RoomSpec& room,
                              std::size_t k_taps) {
  RIRSet set = make_empty_set(scene, room, k_taps);
  const auto receivers = scene.all_receivers();
  for (std::size_t m = 0; m < set.m_count; ++m) {
    for (std::size_t l = 0; l < set.l_count; ++l)
      render_point_source(set.rir(m, l), k_taps, scene.loudspeakers[l], receivers[m], room,
                          "receiver " + std::to_string(m) + ", speaker " + std::to_string(l));
    render_point_source(set.vrir(m), k_taps, scene.virtual_source, receivers[m], room,
                        "receiver " + std::to_string(m) + ", virtual source");
  }
  return set;
}

double wall_beta(const RoomSpec& room) {
  if (!room.bounded) throw std::invalid_argument("wall_beta: room must be bounded");
  if (room.t60 <= 0.0) throw std::invalid_argument("wall_beta: t60 must be > 0");
  const double lx = room.dimensions[0], ly = room.dimensions[1], lz = room.dimensions[2];
  if (lx <= 0.0 || ly <= 0.0 || lz <= 0.0)
    throw std::invalid_argument("wall_beta: dimensions must be positive");
  const double volume = lx * ly * lz;
  const double surface = 2.0 * (lx * ly + lx * lz + ly * lz);
  // Eyring inversion: 1 - alpha = exp(-0.161 V / (T60 S)), beta = sqrt(1 - alpha).
  const double beta = std::exp(-0.0805 * volume / (room.t60 * surface));
  if (beta < 1e-8)
    throw std::runtime_error("wall_beta: t60 too small for this volume (beta underflow)");
  return beta;
}

RIRSet generate_image_source_rirs(const SceneGeometry& scene, const RoomSpec& room,
                                  std::size_t k_taps, int max_order) {
  if (!room.bounded) throw std::invalid_argument("image source: room must be bounded");
  if (room.t60 <= 0.0)
    throw std::invalid_argument("image source: t60 must be > 0 (use the anechoic path)");
  if (max_order < 0) throw std::invalid_argument("image source: max_order must be >= 0");
  const double beta = wall_beta(room);
  RIRSet set = make_empty_set(scene, room, k_taps);
  const auto receivers = scene.all_receivers();
  for (std::size_t m = 0; m < set.m_count; ++m) {
    for (std::size_t l = 0; l < set.l_count; ++l)
      render_image_source(set.rir(m, l), k_taps, scene.loudspeakers[l], receivers[m], room,
                          beta, max_order,
                          "receiver " + std::to_string(m) + ", speaker " + std::to_string(l));
    render_image_source(set.vrir(m), k_taps, scene.virtual_source, receivers[m], room, beta,
                        max_order, "receiver " + std::to_string(m) + ", virtual source");
  }
  return set;
}

namespace {

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void save_rirs(const std::string& path, const RIRSet& rirs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("rir: cannot open " + path + " for writing");
  out.write("VZRIR1", 6);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rirs.m_count));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rirs.l_count));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rirs.k_taps));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(std::lround(rirs.sample_rate)));
  out.write(reinterpret_cast<const char*>(rirs.h.data()), rirs.h.size() * sizeof(double));
  out.write(reinterpret_cast<const char*>(rirs.h_virtual.data()),
            rirs.h_virtual.size() * sizeof(double));
  if (!out) throw std::runtime_error("rir: write failed for " + path);
}

RIRSet load_rirs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("rir: cannot open " + path);
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, "VZRIR1", 6) != 0)
    throw std::runtime_error("rir: " + path + " is not a VZRIR1 container");
  RIRSet set;
  set.m_count = read_le<std::uint32_t>(in);
  set.l_count = read_le<std::uint32_t>(in);
  set.k_taps = read_le<std::uint32_t>(in);
  set.sample_rate = static_cast<double>(read_le<std::uint32_t>(in));
  set.h.resize(set.m_count * set.l_count * set.k_taps);
  set.h_virtual.resize(set.m_count * set.k_taps);
  in.read(reinterpret_cast<char*>(set.h.data()), set.h.size() * sizeof(double));
  in.read(reinterpret_cast<char*>(set.h_virtual.data()),
          set.h_virtual.size() * sizeof(double));
  if (!in) throw std::runtime_error("rir: " + path + " truncated");
  return set;
}

}  // namespace vz
