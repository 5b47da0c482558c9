#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vds/grid.hpp"
#include "vds/rng.hpp"

namespace vds {

// Standard modified Shepp-Logan head phantom on [-1, 1]^2: ten ellipses
// with additive gray levels, evaluated at pixel centers.
inline std::vector<double> shepp_logan_phantom(const GridDims& dims) {
  validate_grid(dims);
  if (dims.rank() != 2) throw std::invalid_argument("shepp_logan_phantom: needs a 2-d grid");
  struct Ellipse {
    double a, b, x0, y0, phi_deg, gray;
  };
  static constexpr Ellipse table[] = {
      {0.69, 0.92, 0.0, 0.0, 0.0, 1.0},
      {0.6624, 0.8740, 0.0, -0.0184, 0.0, -0.8},
      {0.11, 0.31, 0.22, 0.0, -18.0, -0.2},
      {0.16, 0.41, -0.22, 0.0, 18.0, -0.2},
      {0.21, 0.25, 0.0, 0.35, 0.0, 0.1},
      {0.046, 0.046, 0.0, 0.1, 0.0, 0.1},
      {0.046, 0.046, 0.0, -0.1, 0.0, 0.1},
      {0.046, 0.023, -0.08, -0.605, 0.0, 0.1},
      {0.023, 0.023, 0.0, -0.606, 0.0, 0.1},
      {0.023, 0.046, 0.06, -0.605, 0.0, 0.1},
  };
  const std::size_t rows = dims.extents[0], cols = dims.extents[1];
  std::vector<double> img(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = 2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(rows) - 1.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = 2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(cols) - 1.0;
      double v = 0.0;
      for (const auto& e : table) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0, dy = y - e.y0;
        const double xr = dx * std::cos(phi) + dy * std::sin(phi);
        const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.gray;
      }
      img[r * cols + c] = v;
    }
  }
  return img;
}

// Random s-sparse coefficient vector: support uniform without
// replacement, entries of unit magnitude with random sign.
inline std::vector<std::complex<double>> sparse_coeffs(std::size_t n, std::size_t s,
                                                       std::uint64_t seed) {
  if (s == 0 || s > n) throw std::invalid_argument("sparse_coeffs: need 0 < s <= n");
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + uniform_below(rng, n - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::complex<double>> z(n, {0.0, 0.0});
  for (std::size_t i = 0; i < s; ++i)
    z[idx[i]] = {uniform01(rng) < 0.5 ? -1.0 : 1.0, 0.0};
  return z;
}

}  // namespace vds
