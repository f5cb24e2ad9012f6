#include "vastzones/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vz::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("wav: " + path + ": " + what);
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

}  // namespace

WavData read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) fail(path, "not a RIFF file");
  read_le<std::uint32_t>(in);
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) fail(path, "not a WAVE file");

  std::uint16_t format = 0, n_channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> raw;

  while (in.read(tag, 4)) {
    const std::uint32_t chunk_size = read_le<std::uint32_t>(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_le<std::uint16_t>(in);
      n_channels = read_le<std::uint16_t>(in);
      rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      std::uint32_t consumed = 16;
      if (format == kFormatExtensible && chunk_size >= 26) {
        read_le<std::uint16_t>(in);  // cbSize
        read_le<std::uint16_t>(in);  // valid bits
        read_le<std::uint32_t>(in);  // channel mask
        format = read_le<std::uint16_t>(in);  // first bytes of SubFormat GUID
        consumed = 26;
      }
      in.seekg(chunk_size - consumed + (chunk_size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      raw.resize(chunk_size);
      in.read(raw.data(), chunk_size);
      if (!in) fail(path, "truncated data chunk");
      if (chunk_size & 1) in.seekg(1, std::ios::cur);
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  if (!have_fmt) fail(path, "missing fmt chunk");
  if (raw.empty()) fail(path, "missing data chunk");
  if (n_channels == 0) fail(path, "zero channels");

  const bool is_float = format == kFormatFloat;
  if (!(format == kFormatPcm && bits == 16) && !(is_float && bits == 32))
    fail(path, "unsupported format (PCM16 and float32 only)");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t n_frames = raw.size() / (bytes_per_sample * n_channels);

  WavData out;
  out.sample_rate = static_cast<double>(rate);
  out.channels.assign(n_channels, std::vector<double>(n_frames));
  const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      if (is_float) {
        float v;
        std::memcpy(&v, p, 4);
        out.channels[c][f] = static_cast<double>(v);
      } else {
        const std::int16_t v =
            static_cast<std::int16_t>(p[0] | (static_cast<std::uint16_t>(p[1]) << 8));
        out.channels[c][f] = static_cast<double>(v) / 32767.0;
      }
      p += bytes_per_sample;
    }
  }
  return out;
}

std::size_t write(const std::string& path, const WavData& data, int bits) {
  if (bits != 16 && bits != 32) throw std::invalid_argument("wav: bits must be 16 or 32");
  if (data.channels.empty()) throw std::invalid_argument("wav: no channels");
  const std::size_t n_frames = data.channels[0].size();
  for (const auto& ch : data.channels)
    if (ch.size() != n_frames) throw std::invalid_argument("wav: channel length mismatch");

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");

  const std::uint16_t n_channels = static_cast<std::uint16_t>(data.channels.size());
  const std::uint16_t bytes_per_sample = static_cast<std::uint16_t>(bits / 8);
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(n_frames * n_channels * bytes_per_sample);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, bits == 16 ? kFormatPcm : kFormatFloat);
  write_le<std::uint16_t>(out, n_channels);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(std::lround(data.sample_rate)));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(std::lround(data.sample_rate)) *
                                   n_channels * bytes_per_sample);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(n_channels * bytes_per_sample));
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(bits));
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  std::size_t clipped = 0;
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      double v = data.channels[c][f];
      if (bits == 16) {
        if (v > 1.0 || v < -1.0) {
          ++clipped;
          v = std::clamp(v, -1.0, 1.0);
        }
        const double scaled = v * 32767.0;
        write_le<std::uint16_t>(
            out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(scaled))));
      } else {
        if (v > 1.0 || v < -1.0) ++clipped;  // reported but stored as-is
        float fv = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &fv, 4);
        write_le<std::uint32_t>(out, u);
      }
    }
  }
  if (!out) fail(path, "write failed");
  return clipped;
}

}  // namespace vz::wav
