#include "vastzones/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vastzones/fft.hpp"

namespace vz {

std::vector<double> convolve_direct(const std::vector<double>& x, const std::vector<double>& h) {
  if (x.empty() || h.empty()) throw std::invalid_argument("convolve: empty input");
  std::vector<double> out(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t k = 0; k < h.size(); ++k) out[i + k] += xi * h[k];
  }
  return out;
}

std::vector<double> convolve_fft(const std::vector<double>& x, const std::vector<double>& h) {
  if (x.empty() || h.empty()) throw std::invalid_argument("convolve: empty input");
  const std::size_t out_len = x.size() + h.size() - 1;
  const std::size_t n_fft = fft::next_pow2(out_len);
  auto xs = fft::rfft(x, n_fft);
  const auto hs = fft::rfft(h, n_fft);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
  auto full = fft::irfft(xs, n_fft);
  full.resize(out_len);
  return full;
}

std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h) {
  if (h.size() > 64 && x.size() > 8) return convolve_fft(x, h);
  return convolve_direct(x, h);
}

std::vector<double> sine_window(std::size_t n_len) {
  if (n_len < 2 || n_len % 2 != 0)
    throw std::invalid_argument("sine_window: length must be even and >= 2");
  std::vector<double> g(n_len);
  for (std::size_t n = 0; n < n_len; ++n)
    g[n] = std::sin(std::numbers::pi * (static_cast<double>(n) + 0.5) /
                    static_cast<double>(n_len));
  return g;
}

Segmenter make_sine_segmenter(std::size_t n_len, std::size_t overlap) {
  if (overlap >= n_len) throw std::invalid_argument("segmenter: overlap must be < N");
  return Segmenter{n_len, overlap, sine_window(n_len)};
}

std::vector<Frame> segment(const std::vector<double>& x, const Segmenter& seg) {
  if (seg.hop() < 1) throw std::invalid_argument("segment: hop must be >= 1");
  if (seg.window.size() != seg.n_len)
    throw std::invalid_argument("segment: window length mismatch");
  const std::size_t hop = seg.hop();
  const std::size_t count = x.empty() ? 0 : (x.size() + hop - 1) / hop;
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Frame f;
    f.start = static_cast<std::ptrdiff_t>(i * hop);
    f.data.assign(seg.n_len, 0.0);
    for (std::size_t n = 0; n < seg.n_len; ++n) {
      const std::size_t src = i * hop + n;
      if (src < x.size()) f.data[n] = x[src] * seg.window[n];
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<double> overlap_add(const std::vector<Frame>& frames, const Segmenter& seg,
                                std::size_t out_len) {
  if (seg.window.size() != seg.n_len)
    throw std::invalid_argument("overlap_add: window length mismatch");
  std::vector<double> out(out_len, 0.0);
  for (const Frame& f : frames) {
    if (f.data.size() != seg.n_len)
      throw std::invalid_argument("overlap_add: frame length mismatch");
    for (std::size_t n = 0; n < seg.n_len; ++n) {
      const std::ptrdiff_t idx = f.start + static_cast<std::ptrdiff_t>(n);
      if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(out_len)) continue;
      out[static_cast<std::size_t>(idx)] += seg.window[n] * f.data[n];
    }
  }
  return out;
}

}  // namespace vz
