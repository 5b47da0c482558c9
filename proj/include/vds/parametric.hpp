#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vds/density.hpp"
#include "vds/grid.hpp"
#include "vds/rng.hpp"
#include "vds/sampler_iid.hpp"
#include "vds/scheme.hpp"
#include "vds/trajectory.hpp"

namespace vds {

// Archimedean-in-angle spiral with radius r(t) = r0 r1 / (r1 - t (r1 - r0)),
// traversed at constant angular rate over `turns` revolutions and centered
// at (1/2, 1/2). The radial occupation of this profile is proportional to
// 1/rho^2 in area, i.e. each radial band [a, b] receives mass
// ln(b/a) / ln(r1/r0).
struct SpiralSpec {
  double r0 = 0.01;
  double r1 = 0.5;
  std::size_t turns = 16;
  std::size_t vertices_per_turn = 256;
};

inline void validate_spiral(const SpiralSpec& s) {
  if (!(s.r0 > 0.0 && s.r0 < s.r1 && s.r1 <= 0.5))
    throw std::invalid_argument("spiral: need 0 < r0 < r1 <= 1/2");
  if (s.turns == 0) throw std::invalid_argument("spiral: turns must be positive");
  if (s.vertices_per_turn < 8) throw std::invalid_argument("spiral: too few vertices per turn");
}

inline double spiral_radius(const SpiralSpec& s, double t) {
  return s.r0 * s.r1 / (s.r1 - t * (s.r1 - s.r0));
}

inline Trajectory spiral_trajectory(const SpiralSpec& s) {
  validate_spiral(s);
  const std::size_t count = s.turns * s.vertices_per_turn + 1;
  PointCloud pc;
  pc.d = 2;
  pc.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    const double rho = spiral_radius(s, t);
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(s.turns) * t;
    pc.points.push_back({0.5 + rho * std::cos(theta), 0.5 + rho * std::sin(theta), 0.0});
  }
  return build_trajectory(pc);
}

// Fraction of arc length in each of `bins` equal-width radial bands of
// [r_min, r_max], measured around (1/2, 1/2) by exact clipping of every
// segment at the band circles.
inline std::vector<double> radial_occupation(const Trajectory& tr, double r_min, double r_max,
                                             std::size_t bins) {
  if (tr.d != 2) throw std::invalid_argument("radial_occupation: needs a planar curve");
  if (!(r_min >= 0.0 && r_min < r_max)) throw std::invalid_argument("radial_occupation: bad range");
  if (bins == 0) throw std::invalid_argument("radial_occupation: bins must be >= 1");
  if (tr.length() <= 0.0) throw std::domain_error("radial_occupation: curve has zero length");
  const double width = (r_max - r_min) / static_cast<double>(bins);
  std::vector<double> mass(bins, 0.0);
  std::vector<double> cuts;
  for (std::size_t v = 1; v < tr.vertices.size(); ++v) {
    const double ax = tr.vertices[v - 1][0] - 0.5, ay = tr.vertices[v - 1][1] - 0.5;
    const double dx = tr.vertices[v][0] - tr.vertices[v - 1][0];
    const double dy = tr.vertices[v][1] - tr.vertices[v - 1][1];
    const double len = std::sqrt(dx * dx + dy * dy);
    if (len == 0.0) continue;
    const double A = dx * dx + dy * dy;
    const double B = 2.0 * (ax * dx + ay * dy);
    const double C0 = ax * ax + ay * ay;
    cuts.clear();
    cuts.push_back(0.0);
    cuts.push_back(1.0);
    for (std::size_t c = 0; c <= bins; ++c) {
      const double r = r_min + static_cast<double>(c) * width;
      const double disc = B * B - 4.0 * A * (C0 - r * r);
      if (disc <= 0.0) continue;
      const double sq = std::sqrt(disc);
      for (double s : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)})
        if (s > 0.0 && s < 1.0) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t q = 1; q < cuts.size(); ++q) {
      const double s0 = cuts[q - 1], s1 = cuts[q];
      if (s1 <= s0) continue;
      const double sm = 0.5 * (s0 + s1);
      const double px = ax + sm * dx, py = ay + sm * dy;
      const double rho = std::sqrt(px * px + py * py);
      long b = static_cast<long>(std::floor((rho - r_min) / width));
      if (b < 0) b = 0;
      if (b >= static_cast<long>(bins)) b = static_cast<long>(bins) - 1;
      mass[static_cast<std::size_t>(b)] += (s1 - s0) * len;
    }
  }
  const double total = tr.length();
  for (double& v : mass) v /= total;
  return mass;
}

// Closed-form radial band masses for the spiral profile above.
inline std::vector<double> spiral_radial_prediction(const SpiralSpec& s, std::size_t bins) {
  validate_spiral(s);
  if (bins == 0) throw std::invalid_argument("spiral_radial_prediction: bins must be >= 1");
  const double norm = std::log(s.r1 / s.r0);
  const double width = (s.r1 - s.r0) / static_cast<double>(bins);
  std::vector<double> mass(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = s.r0 + static_cast<double>(b) * width;
    const double hi = lo + width;
    mass[b] = std::log(hi / lo) / norm;
  }
  return mass;
}

namespace detail {

inline void append_cells_along(const GridDims& dims, double cx, double cy, double ux, double uy,
                               SamplingScheme& s, std::vector<char>& seen) {
  // march the full diameter in half-pixel steps and quantize
  const double radius = 0.5;
  const double step = 0.5 / static_cast<double>(std::max(dims.extents[0], dims.extents[1]));
  const long kmax = static_cast<long>(std::floor(radius / step));
  for (long k = -kmax; k <= kmax; ++k) {
    const double x = cx + static_cast<double>(k) * step * ux;
    const double y = cy + static_cast<double>(k) * step * uy;
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) continue;
    const std::size_t lin = linear_index(
        dims, {regrid_axis(x, dims.extents[0]), regrid_axis(y, dims.extents[1])});
    s.draw_log.push_back(lin);
    if (!seen[lin]) {
      seen[lin] = 1;
      s.omega.push_back(lin);
    }
  }
}

}  // namespace detail

// Diameters through the grid center. Deterministic spokes use angles
// pi j / spokes; random spokes draw each angle as pi U, U ~ Uniform(0,1).
// Every spoke contributes the whole diameter, so the cell density decays
// like 1/|k| away from the center.
inline SamplingScheme radial_scheme(const GridDims& dims, std::size_t spokes, bool random_angles,
                                    std::uint64_t seed) {
  validate_acquisition_grid(dims);
  if (dims.rank() != 2) throw std::invalid_argument("radial_scheme: needs a 2-d grid");
  if (spokes == 0) throw std::invalid_argument("radial_scheme: spokes must be >= 1");
  SamplingScheme s;
  s.dims = dims;
  s.seed = seed;
  s.provenance = random_angles ? Provenance::RadialRandom : Provenance::Radial;
  std::vector<char> seen(dims.n(), 0);
  Rng rng(seed);
  for (std::size_t j = 0; j < spokes; ++j) {
    const double theta = random_angles
                             ? std::numbers::pi * uniform01(rng)
                             : std::numbers::pi * static_cast<double>(j) / static_cast<double>(spokes);
    detail::append_cells_along(dims, 0.5, 0.5, std::cos(theta), std::sin(theta), s, seen);
  }
  return s;
}

// Readout-line scheme on a rank-3 grid: the plane cell (axes 0 and 1) is
// drawn iid from p2d, and each draw contributes the full line along axis 2.
// draw_log concatenates whole lines in draw order, so its plane marginal
// follows p2d.
inline SamplingScheme lines3d_scheme(const GridDims& dims3, const DensityGrid& p2d,
                                     std::size_t m_lines, std::uint64_t seed) {
  validate_acquisition_grid(dims3);
  if (dims3.rank() != 3) throw std::invalid_argument("lines3d_scheme: needs a rank-3 grid");
  validate_density(p2d);
  if (p2d.dims.rank() != 2 || p2d.dims.extents[0] != dims3.extents[0] ||
      p2d.dims.extents[1] != dims3.extents[1])
    throw std::invalid_argument("lines3d_scheme: p2d must cover the first two axes");
  if (m_lines == 0 || m_lines > p2d.dims.n())
    throw std::invalid_argument("lines3d_scheme: m_lines must be in [1, plane size]");
  DiscreteSampler plane(p2d);
  Rng rng(seed);
  SamplingScheme s;
  s.dims = dims3;
  s.seed = seed;
  s.provenance = Provenance::Lines3D;
  std::vector<char> seen(dims3.n(), 0);
  const std::uint32_t depth = dims3.extents[2];
  for (std::size_t l = 0; l < m_lines; ++l) {
    const auto mi2 = multi_index(p2d.dims, plane(rng));
    for (std::uint32_t z = 0; z < depth; ++z) {
      const std::size_t lin = linear_index(dims3, {mi2[0], mi2[1], z});
      s.draw_log.push_back(lin);
      if (!seen[lin]) {
        seen[lin] = 1;
        s.omega.push_back(lin);
      }
    }
  }
  return s;
}

}  // namespace vds
