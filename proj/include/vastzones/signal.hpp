#pragma once

#include <cstddef>
#include <vector>

namespace vz {

struct AudioSignal {
  std::vector<double> samples;
  double sample_rate = 0.0;
};

// Full linear convolution, length len(x)+len(h)-1. Uses a zero-padded FFT
// when len(h) > 64, direct summation otherwise.
std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h);
std::vector<double> convolve_direct(const std::vector<double>& x, const std::vector<double>& h);
std::vector<double> convolve_fft(const std::vector<double>& x, const std::vector<double>& h);

// g[n] = sin(pi (n + 1/2) / N), N even.
std::vector<double> sine_window(std::size_t n_len);

struct Segmenter {
  std::size_t n_len = 0;    // segment length N
  std::size_t overlap = 0;  // eta in [0, N-1]
  std::vector<double> window;

  std::size_t hop() const { return n_len - overlap; }
};

Segmenter make_sine_segmenter(std::size_t n_len, std::size_t overlap);

struct Frame {
  std::ptrdiff_t start = 0;  // global index of the first sample
  std::vector<double> data;  // analysis-windowed, length N
};

// Frame i starts at i*hop; I = ceil(len / hop) frames, tail zero-padded.
std::vector<Frame> segment(const std::vector<double>& x, const Segmenter& seg);

// Applies the synthesis window to each frame and sums at the frame starts.
// Indices outside [0, out_len) are dropped.
std::vector<double> overlap_add(const std::vector<Frame>& frames, const Segmenter& seg,
                                std::size_t out_len);

}  // namespace vz
