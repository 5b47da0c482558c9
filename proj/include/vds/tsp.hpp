#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vds/density.hpp"
#include "vds/empirical.hpp"
#include "vds/grid.hpp"
#include "vds/rng.hpp"
#include "vds/sampler_iid.hpp"
#include "vds/trajectory.hpp"

namespace vds {

struct TspEffort {
  bool two_opt = true;
  std::size_t max_passes = 12;  // first-improvement sweeps before giving up
};

// Drawing cities from q = p^{d/(d-1)} (normalized) makes the tour's
// occupation measure converge to p itself: a space-filling tour through
// cities of local density q spends time proportional to q^{(d-1)/d}.
inline DensityGrid target_to_initial_density(const DensityGrid& p) {
  validate_density(p);
  const double d = static_cast<double>(p.dims.rank());
  if (d < 2.0)
    throw std::invalid_argument("target_to_initial_density: needs dimension >= 2");
  DensityGrid q;
  q.dims = p.dims;
  q.mass.resize(p.mass.size());
  const double expo = d / (d - 1.0);
  for (std::size_t i = 0; i < p.mass.size(); ++i) q.mass[i] = std::pow(p.mass[i], expo);
  return normalize_density(q.dims, std::move(q.mass));
}

// Cities drawn from a cell-wise density: pick the cell, then jitter
// uniformly inside it, so the point density is exactly piecewise constant.
inline PointCloud draw_points(const DensityGrid& q, std::size_t count, std::uint64_t seed) {
  validate_density(q);
  if (count < 2) throw std::invalid_argument("draw_points: count must be >= 2");
  const std::size_t d = q.dims.rank();
  DiscreteSampler cell(q);
  Rng rng(seed);
  PointCloud out;
  out.d = d;
  out.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto mi = multi_index(q.dims, cell(rng));
    std::array<double, 3> pt{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < d; ++a)
      pt[a] = (static_cast<double>(mi[a]) + uniform01(rng)) / q.dims.extents[a];
    out.points.push_back(pt);
  }
  return out;
}

namespace detail {

inline double point_dist(const PointCloud& pts, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t t = 0; t < pts.d; ++t) {
    const double dt = pts.points[a][t] - pts.points[b][t];
    s += dt * dt;
  }
  return std::sqrt(s);
}

inline std::vector<std::size_t> nearest_neighbor_order(const PointCloud& pts) {
  const std::size_t N = pts.points.size();
  std::vector<std::size_t> order;
  order.reserve(N);
  std::vector<char> used(N, 0);
  std::size_t cur = 0;
  order.push_back(cur);
  used[cur] = 1;
  for (std::size_t step = 1; step < N; ++step) {
    double best = 0.0;
    std::size_t pick = N;
    for (std::size_t j = 0; j < N; ++j) {
      if (used[j]) continue;
      double s = 0.0;
      for (std::size_t t = 0; t < pts.d; ++t) {
        const double dt = pts.points[cur][t] - pts.points[j][t];
        s += dt * dt;
      }
      if (pick == N || s < best) {
        best = s;
        pick = j;
      }
    }
    order.push_back(pick);
    used[pick] = 1;
    cur = pick;
  }
  return order;
}

// First-improvement 2-opt on the open path: reversing order[i..j] swaps
// the two boundary edges. Edge lengths are cached so each candidate costs
// two distance evaluations. Returns the number of sweeps performed.
inline std::size_t two_opt_improve(const PointCloud& pts, std::vector<std::size_t>& order,
                                   std::size_t max_passes) {
  const std::size_t N = order.size();
  if (N < 3 || max_passes == 0) return 0;
  std::vector<double> elen(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) elen[i] = point_dist(pts, order[i], order[i + 1]);
  std::size_t pass = 0;
  for (; pass < max_passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i + 1 < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        if (i == 0 && j == N - 1) continue;  // whole-path reversal is a no-op
        double delta = 0.0;
        if (i > 0) delta += point_dist(pts, order[i - 1], order[j]) - elen[i - 1];
        if (j + 1 < N) delta += point_dist(pts, order[i], order[j + 1]) - elen[j];
        if (delta < -1e-12) {
          std::reverse(order.begin() + i, order.begin() + j + 1);
          if (j > i) std::reverse(elen.begin() + i, elen.begin() + j);
          if (i > 0) elen[i - 1] = point_dist(pts, order[i - 1], order[i]);
          if (j + 1 < N) elen[j] = point_dist(pts, order[j], order[j + 1]);
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
  return pass;
}

}  // namespace detail

// Heuristic open-path tour: nearest neighbor, then 2-opt refinement.
inline Trajectory solve_tsp(const PointCloud& pts, TspEffort effort = {}) {
  if (pts.points.size() < 2) throw std::invalid_argument("solve_tsp: need at least two points");
  auto order = detail::nearest_neighbor_order(pts);
  if (effort.two_opt) detail::two_opt_improve(pts, order, effort.max_passes);
  PointCloud visited;
  visited.d = pts.d;
  visited.points.reserve(order.size());
  for (auto idx : order) visited.points.push_back(pts.points[idx]);
  return build_trajectory(visited);
}

struct BhhEstimate {
  std::size_t cities = 0;
  std::size_t trials = 0;
  double mean = 0.0;    // tour length / cities^((d-1)/d), averaged
  double stddev = 0.0;  // sample standard deviation across trials
};

// Normalized tour length through uniform cities; converges to the
// Beardwood-Halton-Hammersley constant (times the heuristic's
// suboptimality factor) as the city count grows.
inline BhhEstimate estimate_bhh_constant(std::size_t cities, std::size_t trials,
                                         std::uint64_t seed, std::size_t d = 2,
                                         TspEffort effort = {}) {
  if (cities < 2 || trials == 0) throw std::invalid_argument("estimate_bhh_constant: bad inputs");
  if (d < 2 || d > 3) throw std::invalid_argument("estimate_bhh_constant: dimension must be 2 or 3");
  const double scale = std::pow(static_cast<double>(cities),
                                (static_cast<double>(d) - 1.0) / static_cast<double>(d));
  std::vector<double> vals(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    PointCloud pts;
    pts.d = d;
    pts.points.resize(cities);
    for (auto& pt : pts.points) {
      pt = {0.0, 0.0, 0.0};
      for (std::size_t a = 0; a < d; ++a) pt[a] = uniform01(rng);
    }
    vals[t] = solve_tsp(pts, effort).length() / scale;
  }
  BhhEstimate est;
  est.cities = cities;
  est.trials = trials;
  for (double v : vals) est.mean += v;
  est.mean /= static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double v : vals) ss += (v - est.mean) * (v - est.mean);
    est.stddev = std::sqrt(ss / static_cast<double>(trials - 1));
  }
  return est;
}

struct TspLimitRow {
  std::size_t cities = 0;
  double corrected_tv = 0.0;          // TV(mean corrected occupation, p)
  double uncorrected_tv_target = 0.0; // TV(mean uncorrected occupation, p)
  double uncorrected_tv_limit = 0.0;  // TV(mean uncorrected occupation, normalize(p^{(d-1)/d}))
  double uncorrected_slope = 0.0;     // log-log slope of mean occupation vs p
};

struct TspLimitReport {
  std::uint32_t h = 0;
  std::size_t trials = 0;
  std::vector<TspLimitRow> rows;  // one per entry of the city-count list
};

namespace detail {

inline double loglog_slope(const std::vector<double>& p, const std::vector<double>& occ) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t cnt = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > 0.0) || !(occ[j] > 0.0)) continue;
    const double x = std::log(p[j]);
    const double y = std::log(occ[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) throw std::domain_error("loglog_slope: too few populated cells");
  const double denom = static_cast<double>(cnt) * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("loglog_slope: degenerate regression");
  return (static_cast<double>(cnt) * sxy - sx * sy) / denom;
}

}  // namespace detail

// Empirical check of the tour-occupation limit. With cities drawn from
// the corrected density p^{d/(d-1)} the mean occupation approaches p;
// with cities drawn from p itself it approaches normalize(p^{(d-1)/d})
// instead, visible both in TV and as a log-log regression slope of
// (d-1)/d against p.
inline TspLimitReport verify_limit_density(const DensityGrid& p,
                                           const std::vector<std::size_t>& city_counts,
                                           std::size_t trials, std::uint64_t seed,
                                           TspEffort effort = {}) {
  validate_density(p);
  if (trials == 0) throw std::invalid_argument("verify_limit_density: trials must be >= 1");
  if (city_counts.empty()) throw std::invalid_argument("verify_limit_density: empty city list");
  for (auto e : p.dims.extents)
    if (e != p.dims.extents[0])
      throw std::invalid_argument("verify_limit_density: occupation grid must be cubic");
  const std::uint32_t h = p.dims.extents[0];
  const double d = static_cast<double>(p.dims.rank());
  const DensityGrid q = target_to_initial_density(p);
  std::vector<double> raw_limit(p.mass.size());
  for (std::size_t j = 0; j < p.mass.size(); ++j)
    raw_limit[j] = std::pow(p.mass[j], (d - 1.0) / d);
  const DensityGrid limit_uncorrected = normalize_density(p.dims, std::move(raw_limit));

  TspLimitReport rep;
  rep.h = h;
  rep.trials = trials;
  std::uint64_t stream = 0;
  for (std::size_t cities : city_counts) {
    DensityGrid mean_corr = p, mean_raw = p;
    std::fill(mean_corr.mass.begin(), mean_corr.mass.end(), 0.0);
    std::fill(mean_raw.mass.begin(), mean_raw.mass.end(), 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
      const auto corrected = draw_points(q, cities, derive_seed(seed, stream++));
      const auto occ_c = occupation_measure(solve_tsp(corrected, effort), h);
      const auto raw = draw_points(p, cities, derive_seed(seed, stream++));
      const auto occ_r = occupation_measure(solve_tsp(raw, effort), h);
      for (std::size_t j = 0; j < p.mass.size(); ++j) {
        mean_corr.mass[j] += occ_c.mass[j] / static_cast<double>(trials);
        mean_raw.mass[j] += occ_r.mass[j] / static_cast<double>(trials);
      }
    }
    TspLimitRow row;
    row.cities = cities;
    row.corrected_tv = tv_distance(mean_corr, p);
    row.uncorrected_tv_target = tv_distance(mean_raw, p);
    row.uncorrected_tv_limit = tv_distance(mean_raw, limit_uncorrected);
    row.uncorrected_slope = detail::loglog_slope(p.mass, mean_raw.mass);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace vds
