#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace vz {

using Vec3 = std::array<double, 3>;

struct RoomSpec {
  Vec3 dimensions{0.0, 0.0, 0.0};  // meters, valid when bounded
  bool bounded = false;
  double t60 = 0.0;  // seconds; 0 means anechoic
  double speed_of_sound = 343.0;
  double sample_rate = 16000.0;
};

struct SceneGeometry {
  std::vector<Vec3> loudspeakers;
  std::vector<Vec3> control_alpha;
  std::vector<Vec3> control_beta;
  std::vector<Vec3> monitor_alpha;
  std::vector<Vec3> monitor_beta;
  Vec3 virtual_source{0.0, 0.0, 0.0};

  // Receiver order used throughout: control alpha, control beta,
  // monitor alpha, monitor beta.
  std::vector<Vec3> all_receivers() const;
};

// Index bookkeeping for the receiver order above.
struct ReceiverLayout {
  std::size_t m_alpha = 0, m_beta = 0, mon_alpha = 0, mon_beta = 0;

  std::size_t total() const { return m_alpha + m_beta + mon_alpha + mon_beta; }
  std::vector<std::size_t> control_alpha_idx() const;
  std::vector<std::size_t> control_beta_idx() const;
  std::vector<std::size_t> monitor_alpha_idx() const;
  std::vector<std::size_t> monitor_beta_idx() const;
};

ReceiverLayout layout_of(const SceneGeometry& scene);

struct RIRSet {
  std::size_t m_count = 0;  // receivers
  std::size_t l_count = 0;  // loudspeakers
  std::size_t k_taps = 0;
  double sample_rate = 0.0;
  std::vector<double> h;          // [m][l][k] row-major
  std::vector<double> h_virtual;  // [m][k]

  double* rir(std::size_t m, std::size_t l) { return h.data() + (m * l_count + l) * k_taps; }
  const double* rir(std::size_t m, std::size_t l) const {
    return h.data() + (m * l_count + l) * k_taps;
  }
  double* vrir(std::size_t m) { return h_virtual.data() + m * k_taps; }
  const double* vrir(std::size_t m) const { return h_virtual.data() + m * k_taps; }

  std::vector<double> rir_vec(std::size_t m, std::size_t l) const;
  std::vector<double> vrir_vec(std::size_t m) const;
};

RIRSet generate_anechoic_rirs(const SceneGeometry& scene, const RoomSpec& room,
                              std::size_t k_taps);
RIRSet generate_image_source_rirs(const SceneGeometry& scene, const RoomSpec& room,
                                  std::size_t k_taps, int max_order);

// Binary container: magic "VZRIR1", little-endian u32 M, L, K, fs, then
// row-major float64 [m][l][k], then the [m][k] virtual-source block.
void save_rirs(const std::string& path, const RIRSet& rirs);
RIRSet load_rirs(const std::string& path);

// Wall reflection amplitude from T60 (uniform on all six walls).
double wall_beta(const RoomSpec& room);

}  // namespace vz
