#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vds/acquisition.hpp"
#include "vds/grid.hpp"

namespace vds {

// Probability mass on a grid: entrywise nonnegative, sums to one.
struct DensityGrid {
  GridDims dims;
  std::vector<double> mass;
};

inline void validate_density(const DensityGrid& p, double tol = 1e-12) {
  validate_grid(p.dims);
  if (p.mass.size() != p.dims.n()) throw std::invalid_argument("density: size mismatch");
  double sum = 0.0;
  for (double v : p.mass) {
    if (!(v >= 0.0)) throw std::invalid_argument("density: negative or NaN mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("density: mass does not sum to 1");
}

inline DensityGrid normalize_density(const GridDims& dims, std::vector<double> raw) {
  if (raw.size() != dims.n()) throw std::invalid_argument("density: size mismatch");
  double sum = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0)) throw std::invalid_argument("density: negative or NaN mass");
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("density: total mass must be positive");
  for (double& v : raw) v /= sum;
  return {dims, std::move(raw)};
}

inline DensityGrid uniform_density(const GridDims& dims) {
  validate_grid(dims);
  return {dims, std::vector<double>(dims.n(), 1.0 / static_cast<double>(dims.n()))};
}

// pi_i proportional to ||a_i||_inf^2: the density minimizing K(A, p).
inline DensityGrid optimal_density(const AcquisitionModel& model) {
  std::vector<double> raw(model.row_infnorms.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = model.row_infnorms[i] * model.row_infnorms[i];
  return normalize_density(model.dims, std::move(raw));
}

// mass proportional to |k|^{-exponent} in centered frequency coordinates.
// The k = 0 cell takes the |k| = 1 value; the grid's DC cell is expected
// to be acquired deterministically anyway.
inline DensityGrid polynomial_density(const GridDims& dims, double exponent) {
  validate_grid(dims);
  if (!(exponent >= 0.0)) throw std::invalid_argument("polynomial_density: exponent must be >= 0");
  std::vector<double> raw(dims.n());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto k = centered_freq(dims, i);
    double k2 = 0.0;
    for (std::size_t a = 0; a < dims.rank(); ++a)
      k2 += static_cast<double>(k[a]) * static_cast<double>(k[a]);
    if (k2 == 0.0) k2 = 1.0;
    raw[i] = std::pow(k2, -exponent / 2.0);
  }
  return normalize_density(dims, std::move(raw));
}

// K(A, p) = max_i ||a_i||_inf^2 / p_i.
inline double K_value(const AcquisitionModel& model, const DensityGrid& p) {
  if (p.dims != model.dims) throw std::invalid_argument("K_value: dims mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) {
    const double w = model.row_infnorms[i] * model.row_infnorms[i];
    if (w == 0.0) continue;
    if (!(p.mass[i] > 0.0))
      throw std::domain_error("K_value: zero-density cell with nonzero row norm");
    best = std::max(best, w / p.mass[i]);
  }
  return best;
}

// K over the row complement of an excluded index set (rows of A_{Omega1^c}).
inline double K_value_excluding(const AcquisitionModel& model, const DensityGrid& p,
                                const std::vector<std::size_t>& excluded) {
  if (p.dims != model.dims) throw std::invalid_argument("K_value: dims mismatch");
  std::vector<char> skip(p.mass.size(), 0);
  for (auto i : excluded) {
    if (i >= skip.size()) throw std::invalid_argument("K_value: excluded index out of range");
    skip[i] = 1;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) {
    if (skip[i]) continue;
    const double w = model.row_infnorms[i] * model.row_infnorms[i];
    if (w == 0.0) continue;
    if (!(p.mass[i] > 0.0))
      throw std::domain_error("K_value: zero-density cell with nonzero row norm");
    best = std::max(best, w / p.mass[i]);
  }
  return best;
}

// K*(A) = sum_i ||a_i||_inf^2 = K(A, pi).
inline double K_star(const AcquisitionModel& model) {
  double s = 0.0;
  for (double v : model.row_infnorms) s += v * v;
  return s;
}

// The m1 most coherent rows: largest ||a_i||_inf, ties broken by ascending
// linear index. Returned in ascending index order (canonical set form).
inline std::vector<std::size_t> deterministic_set(const AcquisitionModel& model, std::size_t m1) {
  const std::size_t n = model.dims.n();
  if (m1 > n) throw std::invalid_argument("deterministic_set: m1 > n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (model.row_infnorms[a] != model.row_infnorms[b])
      return model.row_infnorms[a] > model.row_infnorms[b];
    return a < b;
  });
  order.resize(m1);
  std::sort(order.begin(), order.end());
  return order;
}

// Zero the excluded cells and renormalize the rest.
inline DensityGrid restrict_and_renormalize(const DensityGrid& p,
                                            const std::vector<std::size_t>& excluded) {
  std::vector<double> raw = p.mass;
  for (auto i : excluded) {
    if (i >= raw.size()) throw std::invalid_argument("restrict: index out of range");
    raw[i] = 0.0;
  }
  double sum = 0.0;
  for (double v : raw) sum += v;
  if (!(sum > 0.0)) throw std::domain_error("restrict: all mass excluded");
  for (double& v : raw) v /= sum;
  return {p.dims, std::move(raw)};
}

enum class BoundKind { IID, Mixed, Markov };

// Required-measurement formulas. m_required is real-valued; callers ceil.
struct BoundReport {
  BoundKind kind;
  double K = 0.0;
  double m_required = 0.0;
  double s = 0.0;
  double eta = 0.0;
  double m1 = 0.0;
  double eps = 0.0;
  std::size_t n = 0;
};

namespace detail {

inline void validate_bound_inputs(double K, double s, double eta, std::size_t n) {
  if (!(K > 0.0)) throw std::invalid_argument("bound: K must be positive");
  if (!(s >= 1.0)) throw std::invalid_argument("bound: s must be >= 1");
  // eta is a failure probability, meaningful below 1, but the plug-in
  // identities in the tests evaluate the formula at larger eta too.
  if (!(eta > 0.0)) throw std::invalid_argument("bound: eta must be positive");
  if (n == 0) throw std::invalid_argument("bound: n must be positive");
}

}  // namespace detail

// m >= C K s ln^2(6n/eta) with C = 26.25.
inline BoundReport bound_iid(double K, double s, double eta, std::size_t n) {
  detail::validate_bound_inputs(K, s, eta, n);
  const double lg = std::log(6.0 * static_cast<double>(n) / eta);
  BoundReport r;
  r.kind = BoundKind::IID;
  r.K = K;
  r.s = s;
  r.eta = eta;
  r.n = n;
  r.m_required = 26.25 * K * s * lg * lg;
  return r;
}

// m >= m1 + (7/3) K s ln^2(6n/eta), K taken over the rows left random.
inline BoundReport bound_mixed(double K_restricted, double m1, double s, double eta,
                               std::size_t n) {
  detail::validate_bound_inputs(K_restricted, s, eta, n);
  if (!(m1 >= 0.0)) throw std::invalid_argument("bound: m1 must be >= 0");
  const double lg = std::log(6.0 * static_cast<double>(n) / eta);
  BoundReport r;
  r.kind = BoundKind::Mixed;
  r.K = K_restricted;
  r.s = s;
  r.eta = eta;
  r.m1 = m1;
  r.n = n;
  r.m_required = m1 + (7.0 / 3.0) * K_restricted * s * lg * lg;
  return r;
}

// m >= (12 / eps) K^2 s^2 ln(2 n^2 / eta) for a chain with spectral gap eps.
inline BoundReport bound_markov(double K, double s, double eta, double eps, std::size_t n) {
  detail::validate_bound_inputs(K, s, eta, n);
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("bound: eps must be in (0, 1]");
  const double lg = std::log(2.0 * static_cast<double>(n) * static_cast<double>(n) / eta);
  BoundReport r;
  r.kind = BoundKind::Markov;
  r.K = K;
  r.s = s;
  r.eta = eta;
  r.eps = eps;
  r.n = n;
  r.m_required = (12.0 / eps) * K * K * s * s * lg;
  return r;
}

}  // namespace vds
