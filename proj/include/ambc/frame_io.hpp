#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ambc/errors.hpp"
#include "ambc/types.hpp"

// Frame file layout: "AMBC", u32 M, u32 N, u32 reserved (0), then M x 2N
// complex samples, column-major, each as little-endian f64 re, f64 im.

namespace ambc {

namespace detail {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("frame file is truncated");
  return to_little(v);
}

}  // namespace detail

inline constexpr char kFrameMagic[4] = {'A', 'M', 'B', 'C'};

inline void write_frame(std::ostream& out, const CMatrix& y) {
  if (y.cols() % 2 != 0) throw ContractViolation("frame must have an even number of columns");
  out.write(kFrameMagic, 4);
  detail::put(out, static_cast<std::uint32_t>(y.rows()));
  detail::put(out, static_cast<std::uint32_t>(y.cols() / 2));
  detail::put(out, std::uint32_t{0});
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      detail::put(out, y(r, c).real());
      detail::put(out, y(r, c).imag());
    }
  }
  if (!out) throw IoError("failed writing frame");
}

inline CMatrix read_frame(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFrameMagic, 4) != 0) throw IoError("not an AMBC frame file");
  const auto m = detail::get<std::uint32_t>(in);
  const auto n = detail::get<std::uint32_t>(in);
  (void)detail::get<std::uint32_t>(in);
  if (m < 1 || n < 1 || m > 4096 || n > (1u << 24)) throw IoError("frame header has implausible dimensions");
  CMatrix y(m, 2 * static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double re = detail::get<double>(in);
      const double im = detail::get<double>(in);
      y(r, c) = Complex{re, im};
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after frame data");
  return y;
}

inline void write_frame(const std::filesystem::path& path, const CMatrix& y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_frame(out, y);
}

inline CMatrix read_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_frame(in);
}

}  // namespace ambc
