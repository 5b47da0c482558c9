#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vds/grid.hpp"

namespace vds {

// VDSG grid container format:
//   magic "VDSG" | u8 version = 1 | u8 scalar (0 = f64, 1 = c128 interleaved)
//   | u8 rank | rank x u32 extents | row-major little-endian payload.
static_assert(std::endian::native == std::endian::little,
              "VDSG writer assumes a little-endian host");

namespace detail {

inline void write_bytes(std::ofstream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!os) throw std::runtime_error("VDSG: write failed");
}

inline void read_bytes(std::ifstream& is, void* p, std::size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw std::runtime_error("VDSG: truncated file");
}

inline void write_vdsg_header(std::ofstream& os, const GridDims& dims, std::uint8_t scalar) {
  validate_grid(dims);
  write_bytes(os, "VDSG", 4);
  const std::uint8_t version = 1;
  write_bytes(os, &version, 1);
  write_bytes(os, &scalar, 1);
  const std::uint8_t rank = static_cast<std::uint8_t>(dims.rank());
  write_bytes(os, &rank, 1);
  for (auto e : dims.extents) write_bytes(os, &e, 4);
}

inline GridDims read_vdsg_header(std::ifstream& is, std::uint8_t& scalar) {
  char magic[4];
  read_bytes(is, magic, 4);
  if (std::memcmp(magic, "VDSG", 4) != 0) throw std::runtime_error("VDSG: bad magic");
  std::uint8_t version = 0, rank = 0;
  read_bytes(is, &version, 1);
  if (version != 1) throw std::runtime_error("VDSG: unsupported version");
  read_bytes(is, &scalar, 1);
  if (scalar > 1) throw std::runtime_error("VDSG: unknown scalar code");
  read_bytes(is, &rank, 1);
  if (rank == 0 || rank > 3) throw std::runtime_error("VDSG: bad rank");
  GridDims dims;
  dims.extents.resize(rank);
  for (auto& e : dims.extents) read_bytes(is, &e, 4);
  validate_grid(dims);
  return dims;
}

}  // namespace detail

inline void write_vdsg(const std::string& path, const GridDims& dims,
                       const std::vector<double>& data) {
  if (data.size() != dims.n()) throw std::invalid_argument("VDSG: payload size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("VDSG: cannot open " + path);
  detail::write_vdsg_header(os, dims, 0);
  detail::write_bytes(os, data.data(), data.size() * sizeof(double));
}

inline void write_vdsg(const std::string& path, const GridDims& dims,
                       const std::vector<std::complex<double>>& data) {
  if (data.size() != dims.n()) throw std::invalid_argument("VDSG: payload size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("VDSG: cannot open " + path);
  detail::write_vdsg_header(os, dims, 1);
  detail::write_bytes(os, data.data(), data.size() * 2 * sizeof(double));
}

inline std::vector<double> read_vdsg_real(const std::string& path, GridDims& dims) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("VDSG: cannot open " + path);
  std::uint8_t scalar = 0;
  dims = detail::read_vdsg_header(is, scalar);
  if (scalar != 0) throw std::runtime_error("VDSG: expected real payload");
  std::vector<double> data(dims.n());
  detail::read_bytes(is, data.data(), data.size() * sizeof(double));
  return data;
}

inline std::vector<std::complex<double>> read_vdsg_complex(const std::string& path,
                                                           GridDims& dims) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("VDSG: cannot open " + path);
  std::uint8_t scalar = 0;
  dims = detail::read_vdsg_header(is, scalar);
  if (scalar != 1) throw std::runtime_error("VDSG: expected complex payload");
  std::vector<std::complex<double>> data(dims.n());
  detail::read_bytes(is, data.data(), data.size() * 2 * sizeof(double));
  return data;
}

}  // namespace vds
