#include "vastzones/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace vz::fft {

namespace {

// fftw_plan_* is not thread-safe; fftw_execute on distinct buffers is.
// Each thread keeps its own plans and buffers, planning under a global lock.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct PlanEntry {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit PlanEntry(std::size_t n_fft) : n(n_fft) {
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    if (!real || !cplx) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, cplx, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real, FFTW_ESTIMATE);
    if (!fwd || !inv) throw std::runtime_error("fftw plan creation failed");
  }
  PlanEntry(const PlanEntry&) = delete;
  PlanEntry& operator=(const PlanEntry&) = delete;
  ~PlanEntry() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(cplx);
  }
};

PlanEntry& plans_for(std::size_t n_fft) {
  thread_local std::map<std::size_t, std::unique_ptr<PlanEntry>> cache;
  auto it = cache.find(n_fft);
  if (it == cache.end())
    it = cache.emplace(n_fft, std::make_unique<PlanEntry>(n_fft)).first;
  return *it->second;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x, std::size_t n_fft) {
  if (n_fft == 0) throw std::invalid_argument("rfft: n_fft must be positive");
  PlanEntry& pe = plans_for(n_fft);
  const std::size_t ncopy = std::min(x.size(), n_fft);
  std::memcpy(pe.real, x.data(), ncopy * sizeof(double));
  std::memset(pe.real + ncopy, 0, (n_fft - ncopy) * sizeof(double));
  fftw_execute(pe.fwd);
  std::vector<std::complex<double>> out(n_fft / 2 + 1);
  std::memcpy(out.data(), pe.cplx, out.size() * sizeof(fftw_complex));
  return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n_fft) {
  if (n_fft == 0) throw std::invalid_argument("irfft: n_fft must be positive");
  if (spec.size() != n_fft / 2 + 1)
    throw std::invalid_argument("irfft: spectrum size does not match n_fft");
  PlanEntry& pe = plans_for(n_fft);
  std::memcpy(pe.cplx, spec.data(), spec.size() * sizeof(fftw_complex));
  fftw_execute(pe.inv);
  std::vector<double> out(n_fft);
  const double scale = 1.0 / static_cast<double>(n_fft);
  for (std::size_t i = 0; i < n_fft; ++i) out[i] = pe.real[i] * scale;
  return out;
}

}  // namespace vz::fft
