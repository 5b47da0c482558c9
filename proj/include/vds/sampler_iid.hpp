#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vds/density.hpp"
#include "vds/rng.hpp"
#include "vds/scheme.hpp"

namespace vds {

// Exact inverse-CDF sampling over a flattened grid, O(log n) per draw.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& mass) : cum_(mass.size()) {
    double run = 0.0;
    last_positive_ = mass.size();
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (!(mass[i] >= 0.0)) throw std::invalid_argument("sampler: negative mass");
      run += mass[i];
      cum_[i] = run;
      if (mass[i] > 0.0) last_positive_ = i;
    }
    if (!(run > 0.0)) throw std::invalid_argument("sampler: total mass must be positive");
  }

  explicit DiscreteSampler(const DensityGrid& p) : DiscreteSampler(p.mass) {}

  std::size_t operator()(Rng& rng) const {
    const double u = uniform01(rng) * cum_.back();
    std::size_t i = std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
    // u == total can occur when uniform01 rounds up against 1
    if (i >= cum_.size()) i = last_positive_;
    return i;
  }

 private:
  std::vector<double> cum_;
  std::size_t last_positive_;
};

// m independent draws from p. draw_log keeps all of them; omega holds the
// distinct indices in first-visit order.
inline SamplingScheme draw_iid(const DensityGrid& p, std::size_t m, std::uint64_t seed) {
  validate_density(p);
  if (m == 0) throw std::invalid_argument("draw_iid: m must be >= 1");
  DiscreteSampler sample(p);
  Rng rng(seed);
  SamplingScheme s;
  s.dims = p.dims;
  s.seed = seed;
  s.provenance = Provenance::IID;
  s.draw_log.reserve(m);
  std::vector<char> seen(p.dims.n(), 0);
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t i = sample(rng);
    s.draw_log.push_back(i);
    if (!seen[i]) {
      seen[i] = 1;
      s.omega.push_back(i);
    }
  }
  return s;
}

// Independent draws continued until `target` distinct indices are seen.
// Used when a mask of exactly m cells is wanted (sampling ratio R = n/m).
inline SamplingScheme draw_iid_distinct(const DensityGrid& p, std::size_t target,
                                        std::uint64_t seed, std::size_t draw_budget = 0) {
  validate_density(p);
  const std::size_t n = p.dims.n();
  if (target == 0 || target > n) throw std::invalid_argument("draw_iid_distinct: bad target");
  std::size_t positive = 0;
  for (double v : p.mass)
    if (v > 0.0) ++positive;
  if (target > positive)
    throw std::invalid_argument("draw_iid_distinct: target exceeds the support of p");
  if (draw_budget == 0) draw_budget = 1000 * n;
  DiscreteSampler sample(p);
  Rng rng(seed);
  SamplingScheme s;
  s.dims = p.dims;
  s.seed = seed;
  s.provenance = Provenance::IID;
  std::vector<char> seen(n, 0);
  while (s.omega.size() < target) {
    if (s.draw_log.size() >= draw_budget)
      throw std::runtime_error("draw_iid_distinct: draw budget exhausted");
    const std::size_t i = sample(rng);
    s.draw_log.push_back(i);
    if (!seen[i]) {
      seen[i] = 1;
      s.omega.push_back(i);
    }
  }
  return s;
}

// Mixed scheme: the m1 most coherent rows acquired deterministically,
// then m2 independent draws from p restricted to the complement. With
// m1 = 0 this reduces to draw_iid (identical draws for the same seed).
inline SamplingScheme draw_mixed(const AcquisitionModel& model, const DensityGrid& p,
                                 std::size_t m1, std::size_t m2, std::uint64_t seed) {
  validate_density(p);
  if (p.dims != model.dims) throw std::invalid_argument("draw_mixed: dims mismatch");
  SamplingScheme s;
  s.dims = p.dims;
  s.seed = seed;
  s.provenance = Provenance::Mixed;
  s.omega1 = deterministic_set(model, m1);
  s.omega = s.omega1;
  const DensityGrid restricted = m1 > 0 ? restrict_and_renormalize(p, s.omega1) : p;
  if (m2 > 0) {
    DiscreteSampler sample(restricted);
    Rng rng(seed);
    std::vector<char> seen(p.dims.n(), 0);
    for (auto i : s.omega1) seen[i] = 1;
    s.draw_log.reserve(m2);
    for (std::size_t t = 0; t < m2; ++t) {
      const std::size_t i = sample(rng);
      s.draw_log.push_back(i);
      if (!seen[i]) {
        seen[i] = 1;
        s.omega.push_back(i);
      }
    }
  }
  return s;
}

// Mixed scheme variant drawing until the random part holds `m2_distinct`
// distinct indices.
inline SamplingScheme draw_mixed_distinct(const AcquisitionModel& model, const DensityGrid& p,
                                          std::size_t m1, std::size_t m2_distinct,
                                          std::uint64_t seed, std::size_t draw_budget = 0) {
  validate_density(p);
  if (p.dims != model.dims) throw std::invalid_argument("draw_mixed: dims mismatch");
  const std::size_t n = p.dims.n();
  if (m1 + m2_distinct > n) throw std::invalid_argument("draw_mixed_distinct: m1 + m2 > n");
  if (draw_budget == 0) draw_budget = 1000 * n;
  SamplingScheme s;
  s.dims = p.dims;
  s.seed = seed;
  s.provenance = Provenance::Mixed;
  s.omega1 = deterministic_set(model, m1);
  s.omega = s.omega1;
  if (m2_distinct == 0) return s;
  const DensityGrid restricted = m1 > 0 ? restrict_and_renormalize(p, s.omega1) : p;
  std::size_t positive = 0;
  for (double v : restricted.mass)
    if (v > 0.0) ++positive;
  if (m2_distinct > positive)
    throw std::invalid_argument("draw_mixed_distinct: target exceeds restricted support");
  DiscreteSampler sample(restricted);
  Rng rng(seed);
  std::vector<char> seen(n, 0);
  for (auto i : s.omega1) seen[i] = 1;
  std::size_t distinct = 0;
  while (distinct < m2_distinct) {
    if (s.draw_log.size() >= draw_budget)
      throw std::runtime_error("draw_mixed_distinct: draw budget exhausted");
    const std::size_t i = sample(rng);
    s.draw_log.push_back(i);
    if (!seen[i]) {
      seen[i] = 1;
      s.omega.push_back(i);
      ++distinct;
    }
  }
  return s;
}

}  // namespace vds
