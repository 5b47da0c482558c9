#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vds/density.hpp"
#include "vds/grid.hpp"
#include "vds/scheme.hpp"

namespace vds {

// Points live in the unit cube [0,1]^d; unused trailing coordinates are 0.
struct PointCloud {
  std::size_t d = 2;
  std::vector<std::array<double, 3>> points;
};

// Piecewise-linear curve with cumulative arc length per vertex.
struct Trajectory {
  std::size_t d = 2;
  std::vector<std::array<double, 3>> vertices;
  std::vector<double> cumulative;  // cumulative[0] = 0

  double length() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

namespace detail {

inline double segment_length(const std::array<double, 3>& a, const std::array<double, 3>& b,
                             std::size_t d) {
  double s = 0.0;
  for (std::size_t t = 0; t < d; ++t) s += (b[t] - a[t]) * (b[t] - a[t]);
  return std::sqrt(s);
}

inline void validate_unit_cube(const std::vector<std::array<double, 3>>& pts, std::size_t d) {
  for (const auto& p : pts)
    for (std::size_t t = 0; t < d; ++t)
      if (!(p[t] >= -1e-9 && p[t] <= 1.0 + 1e-9))
        throw std::domain_error("trajectory: point leaves the unit cube");
}

}  // namespace detail

inline Trajectory build_trajectory(const PointCloud& cloud) {
  if (cloud.d < 1 || cloud.d > 3) throw std::invalid_argument("build_trajectory: bad dimension");
  if (cloud.points.empty()) throw std::invalid_argument("build_trajectory: no points");
  detail::validate_unit_cube(cloud.points, cloud.d);
  Trajectory tr;
  tr.d = cloud.d;
  tr.vertices = cloud.points;
  tr.cumulative.resize(tr.vertices.size());
  tr.cumulative[0] = 0.0;
  for (std::size_t i = 1; i < tr.vertices.size(); ++i)
    tr.cumulative[i] = tr.cumulative[i - 1] +
                       detail::segment_length(tr.vertices[i - 1], tr.vertices[i], tr.d);
  return tr;
}

// Position at normalized arc length t in [0,1] (constant-speed traversal).
inline std::array<double, 3> parametrize_constant_speed(const Trajectory& tr, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("parametrize_constant_speed: t outside [0, 1]");
  if (tr.vertices.empty()) throw std::invalid_argument("parametrize_constant_speed: empty curve");
  const double L = tr.length();
  if (L == 0.0) return tr.vertices.front();
  const double target = t * L;
  const auto it = std::upper_bound(tr.cumulative.begin(), tr.cumulative.end(), target);
  std::size_t hi = std::min<std::size_t>(it - tr.cumulative.begin(), tr.cumulative.size() - 1);
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double seg = tr.cumulative[hi] - tr.cumulative[lo];
  const double s = seg > 0.0 ? (target - tr.cumulative[lo]) / seg : 0.0;
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < tr.d; ++a)
    out[a] = tr.vertices[lo][a] + s * (tr.vertices[hi][a] - tr.vertices[lo][a]);
  return out;
}

// Positions equally spaced in arc length with spacing <= step_length,
// endpoints included.
inline PointCloud sample_curve(const Trajectory& tr, double step_length) {
  if (!(step_length > 0.0)) throw std::invalid_argument("sample_curve: step must be positive");
  if (tr.length() <= 0.0) throw std::domain_error("sample_curve: curve has zero length");
  const std::size_t count =
      2 + static_cast<std::size_t>(std::ceil(tr.length() / step_length - 1.0));
  PointCloud out;
  out.d = tr.d;
  out.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    out.points.push_back(parametrize_constant_speed(tr, t));
  }
  return out;
}

namespace detail {

// cell index of coordinate x on a side-h grid of cells [i/h, (i+1)/h)
inline std::size_t occupation_cell(double x, std::uint32_t h) {
  const double y = x * static_cast<double>(h);
  long i = static_cast<long>(std::floor(y));
  if (i < 0) i = 0;
  if (i >= static_cast<long>(h)) i = static_cast<long>(h) - 1;
  return static_cast<std::size_t>(i);
}

}  // namespace detail

// Normalized time the curve spends in each cell of the h^d lattice,
// computed by exact clipping of every segment at the cell faces (each
// sub-segment is credited to the cell containing its midpoint).
inline DensityGrid occupation_measure(const Trajectory& tr, std::uint32_t h) {
  if (h < 1) throw std::invalid_argument("occupation_measure: h must be >= 1");
  if (tr.length() <= 0.0) throw std::domain_error("occupation_measure: curve has zero length");
  GridDims dims;
  dims.extents.assign(tr.d, h);
  DensityGrid occ;
  occ.dims = dims;
  occ.mass.assign(dims.n(), 0.0);

  std::vector<double> cuts;
  for (std::size_t v = 1; v < tr.vertices.size(); ++v) {
    const auto& a = tr.vertices[v - 1];
    const auto& b = tr.vertices[v];
    const double len = detail::segment_length(a, b, tr.d);
    if (len == 0.0) continue;
    cuts.clear();
    cuts.push_back(0.0);
    cuts.push_back(1.0);
    for (std::size_t ax = 0; ax < tr.d; ++ax) {
      const double da = b[ax] - a[ax];
      if (da == 0.0) continue;
      const double lo = std::min(a[ax], b[ax]);
      const double hi = std::max(a[ax], b[ax]);
      const long c0 = static_cast<long>(std::ceil(lo * h));
      const long c1 = static_cast<long>(std::floor(hi * h));
      for (long c = c0; c <= c1; ++c) {
        const double s = (static_cast<double>(c) / h - a[ax]) / da;
        if (s > 0.0 && s < 1.0) cuts.push_back(s);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t q = 1; q < cuts.size(); ++q) {
      const double s0 = cuts[q - 1], s1 = cuts[q];
      if (s1 <= s0) continue;
      const double mid = 0.5 * (s0 + s1);
      std::array<std::size_t, 3> mi{0, 0, 0};
      for (std::size_t ax = 0; ax < tr.d; ++ax)
        mi[ax] = detail::occupation_cell(a[ax] + mid * (b[ax] - a[ax]), h);
      occ.mass[linear_index(dims, mi)] += (s1 - s0) * len;
    }
  }
  const double total = tr.length();
  for (double& v : occ.mass) v /= total;
  return occ;
}

// Nearest grid point to coordinate x, with grid point i sitting at i/dim.
// Ties (x exactly between two grid points) resolve to the lower index.
inline std::size_t regrid_axis(double x, std::uint32_t dim) {
  const double y = x * static_cast<double>(dim);
  double i = std::floor(y + 0.5);
  if (y + 0.5 == i && i > 0.0) i -= 1.0;  // tie toward the lower index
  if (i < 0.0) i = 0.0;
  if (i > static_cast<double>(dim - 1)) i = static_cast<double>(dim - 1);
  return static_cast<std::size_t>(i);
}

// Quantize curve samples onto the acquisition grid. draw_log records the
// cell of every sample in traversal order; omega keeps first visits.
inline SamplingScheme regrid_nearest(const PointCloud& samples, const GridDims& dims,
                                     Provenance provenance, std::uint64_t seed) {
  validate_grid(dims);
  if (dims.rank() != samples.d) throw std::invalid_argument("regrid_nearest: rank mismatch");
  detail::validate_unit_cube(samples.points, samples.d);
  SamplingScheme s;
  s.dims = dims;
  s.seed = seed;
  s.provenance = provenance;
  std::vector<char> seen(dims.n(), 0);
  std::array<std::size_t, 3> mi{0, 0, 0};
  for (const auto& pt : samples.points) {
    for (std::size_t ax = 0; ax < samples.d; ++ax) mi[ax] = regrid_axis(pt[ax], dims.extents[ax]);
    const std::size_t lin = linear_index(dims, mi);
    s.draw_log.push_back(lin);
    if (!seen[lin]) {
      seen[lin] = 1;
      s.omega.push_back(lin);
    }
  }
  return s;
}

// Resample the curve at half-pixel arc steps and regrid; the step rule
// guarantees no crossed cell is skipped.
inline SamplingScheme regrid_trajectory(const Trajectory& tr, const GridDims& dims,
                                        Provenance provenance, std::uint64_t seed) {
  std::uint32_t maxdim = 0;
  for (auto e : dims.extents) maxdim = std::max(maxdim, e);
  return regrid_nearest(sample_curve(tr, 0.5 / static_cast<double>(maxdim)), dims, provenance,
                        seed);
}

// CSV rows "t,x,y[,z]" with t the normalized arc length at each vertex.
inline void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  os << (tr.d == 3 ? "t,x,y,z\n" : "t,x,y\n");
  os.precision(17);
  const double L = tr.length();
  for (std::size_t i = 0; i < tr.vertices.size(); ++i) {
    const double t = L > 0.0 ? tr.cumulative[i] / L : 0.0;
    os << t << "," << tr.vertices[i][0] << "," << tr.vertices[i][1];
    if (tr.d == 3) os << "," << tr.vertices[i][2];
    os << "\n";
  }
  if (!os) throw std::runtime_error("write_trajectory_csv: write failed");
}

}  // namespace vds
