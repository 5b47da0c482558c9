#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vds/density.hpp"
#include "vds/grid.hpp"
#include "vds/rng.hpp"

namespace vds {

// Normalized visit histogram of a process on the grid.
struct EmpiricalMeasure {
  GridDims dims;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  DensityGrid measure() const {
    std::vector<double> mass(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      mass[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return {dims, std::move(mass)};
  }
};

inline EmpiricalMeasure empirical_measure(const std::vector<std::size_t>& visits,
                                          const GridDims& dims) {
  validate_grid(dims);
  if (visits.empty()) throw std::invalid_argument("empirical_measure: empty visit sequence");
  EmpiricalMeasure em{dims, std::vector<std::uint64_t>(dims.n(), 0), visits.size()};
  for (auto i : visits) {
    if (i >= em.counts.size()) throw std::out_of_range("empirical_measure: index out of range");
    ++em.counts[i];
  }
  return em;
}

// Total variation distance (1/2) sum |p_i - q_i|; equals the maximal
// disagreement over events, which on a finite grid metrizes weak
// convergence.
inline double tv_distance(const DensityGrid& p, const DensityGrid& q) {
  if (p.dims != q.dims) throw std::invalid_argument("tv_distance: dims mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) s += std::abs(p.mass[i] - q.mass[i]);
  return 0.5 * s;
}

struct ConvergenceRow {
  std::size_t N = 0;
  double mean_tv = 0.0;
  double std_tv = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool tv_decreasing = false;  // mean TV non-increasing across rows
};

// Mean/stddev of TV(empirical measure, p) per process length. `gen(N, seed)`
// must return the visit sequence of one independent run of length N.
template <class Gen>
ConvergenceReport vds_convergence_report(Gen&& gen, const DensityGrid& p,
                                         const std::vector<std::size_t>& N_list,
                                         std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("convergence report: trials must be >= 1");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1])
      throw std::invalid_argument("convergence report: N_list must be increasing");
  ConvergenceReport report;
  std::uint64_t stream = 0;
  for (auto N : N_list) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto visits = gen(N, derive_seed(seed, stream++));
      const double tv = tv_distance(empirical_measure(visits, p.dims).measure(), p);
      sum += tv;
      sumsq += tv * tv;
    }
    ConvergenceRow row;
    row.N = N;
    row.mean_tv = sum / static_cast<double>(trials);
    row.std_tv = trials > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / trials) / (trials - 1)))
                            : 0.0;
    report.rows.push_back(row);
  }
  report.tv_decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].mean_tv > report.rows[i - 1].mean_tv) report.tv_decreasing = false;
  return report;
}

}  // namespace vds
