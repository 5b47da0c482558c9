#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vds/acquisition.hpp"
#include "vds/density.hpp"
#include "vds/grid.hpp"
#include "vds/rng.hpp"
#include "vds/sampler_iid.hpp"
#include "vds/scheme.hpp"

namespace vds {

struct NeighborhoodSpec {
  bool periodic = false;  // wraparound lattice (torus); used by the Cheeger check
};

// Row-stochastic kernel stored as P = (1 - jump_alpha) * base + jump_alpha * 1 p^T,
// where `base` is the sparse von Neumann random walk part (CSR) and p the
// stationary density. The representation is closed under jump mixing and
// keeps rank-one jumps from densifying the storage.
struct TransitionKernel {
  GridDims dims;
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  // CSR over the base part
  std::vector<std::size_t> col;
  std::vector<double> val;
  double jump_alpha = 0.0;
  DensityGrid stationary;
  NeighborhoodSpec neighborhood;
};

namespace detail {

inline double csr_entry(const TransitionKernel& k, std::size_t i, std::size_t j) {
  for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e)
    if (k.col[e] == j) return k.val[e];
  return 0.0;
}

}  // namespace detail

// Effective kernel entry P_ij.
inline double kernel_entry(const TransitionKernel& k, std::size_t i, std::size_t j) {
  return (1.0 - k.jump_alpha) * detail::csr_entry(k, i, j) +
         k.jump_alpha * k.stationary.mass[j];
}

inline std::vector<double> kernel_row(const TransitionKernel& k, std::size_t i) {
  std::vector<double> row(k.n, 0.0);
  for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e)
    row[k.col[e]] += (1.0 - k.jump_alpha) * k.val[e];
  for (std::size_t j = 0; j < k.n; ++j) row[j] += k.jump_alpha * k.stationary.mass[j];
  return row;
}

inline double row_sum_residual(const TransitionKernel& k) {
  double worst = 0.0;
  for (std::size_t i = 0; i < k.n; ++i) {
    double s = 0.0;
    for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e) s += k.val[e];
    worst = std::max(worst, std::abs((1.0 - k.jump_alpha) * s + k.jump_alpha - 1.0));
  }
  return worst;
}

// max_ij |p_i P_ij - p_j P_ji|; the jump part cancels exactly.
inline double detailed_balance_residual(const TransitionKernel& k) {
  const auto& p = k.stationary.mass;
  double worst = 0.0;
  for (std::size_t i = 0; i < k.n; ++i)
    for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e) {
      const std::size_t j = k.col[e];
      if (j < i) continue;  // each unordered pair once
      const double flow = p[i] * k.val[e] - p[j] * detail::csr_entry(k, j, i);
      worst = std::max(worst, (1.0 - k.jump_alpha) * std::abs(flow));
    }
  return worst;
}

inline double stationarity_residual(const TransitionKernel& k) {
  const auto& p = k.stationary.mass;
  std::vector<double> out(k.n, 0.0);
  for (std::size_t i = 0; i < k.n; ++i)
    for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e)
      out[k.col[e]] += p[i] * k.val[e] * (1.0 - k.jump_alpha);
  double worst = 0.0;
  for (std::size_t j = 0; j < k.n; ++j)
    worst = std::max(worst, std::abs(out[j] + k.jump_alpha * p[j] - p[j]));
  return worst;
}

// Metropolis walk on the von Neumann lattice (2 neighbors per axis) with
// target p: propose j uniformly among the |N(i)| neighbor slots, accept
// with min(1, p_j |N(i)| / (p_i |N(j)|)); the diagonal absorbs rejections.
inline TransitionKernel metropolis_kernel(const DensityGrid& p, NeighborhoodSpec nb) {
  validate_density(p);
  for (double v : p.mass)
    if (!(v > 0.0)) throw std::domain_error("metropolis_kernel: zero-mass cell");
  const GridDims& dims = p.dims;
  const std::size_t d = dims.rank();
  const std::size_t n = dims.n();

  // neighbor multiset of a cell, as (index, slot count) pairs
  auto neighbors = [&](std::size_t lin, std::vector<std::pair<std::size_t, double>>& out) {
    out.clear();
    auto mi = multi_index(dims, lin);
    for (std::size_t a = 0; a < d; ++a) {
      const long ext = static_cast<long>(dims.extents[a]);
      for (long step : {-1L, +1L}) {
        long q = static_cast<long>(mi[a]) + step;
        if (nb.periodic) {
          q = (q % ext + ext) % ext;
        } else if (q < 0 || q >= ext) {
          continue;
        }
        auto mj = mi;
        mj[a] = static_cast<std::size_t>(q);
        const std::size_t j = linear_index(dims, mj);
        bool merged = false;
        for (auto& pr : out)
          if (pr.first == j) {
            pr.second += 1.0;
            merged = true;
            break;
          }
        if (!merged) out.emplace_back(j, 1.0);
      }
    }
  };

  std::vector<double> degree(n, 0.0);
  std::vector<std::pair<std::size_t, double>> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    neighbors(i, scratch);
    for (auto& pr : scratch) degree[i] += pr.second;
  }

  TransitionKernel k;
  k.dims = dims;
  k.n = n;
  k.stationary = p;
  k.neighborhood = nb;
  k.row_ptr.assign(n + 1, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors(i, scratch);
    double off = 0.0;
    auto& row = rows[i];
    for (auto& [j, cnt] : scratch) {
      // p_i P_ij = min(p_i cnt/deg_i, p_j cnt/deg_j), symmetric in (i, j)
      const double pij = std::min(cnt / degree[i], p.mass[j] * cnt / (p.mass[i] * degree[j]));
      row.emplace_back(j, pij);
      off += pij;
    }
    double diag = 1.0 - off;
    if (diag < 0.0) {
      if (diag < -1e-12) throw std::logic_error("metropolis_kernel: negative diagonal");
      diag = 0.0;
    }
    if (diag > 0.0) row.emplace_back(i, diag);
    std::sort(row.begin(), row.end());
  }
  for (std::size_t i = 0; i < n; ++i) k.row_ptr[i + 1] = k.row_ptr[i] + rows[i].size();
  k.col.reserve(k.row_ptr[n]);
  k.val.reserve(k.row_ptr[n]);
  for (auto& row : rows)
    for (auto& [j, v] : row) {
      k.col.push_back(j);
      k.val.push_back(v);
    }
  return k;
}

// P^(alpha) = (1 - alpha) P + alpha * 1 p^T. Stationarity is preserved
// because the jump kernel has the same invariant density.
inline TransitionKernel mix_with_jumps(const TransitionKernel& P, const DensityGrid& p,
                                       double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("mix_with_jumps: alpha must be in [0, 1]");
  if (p.dims != P.dims) throw std::invalid_argument("mix_with_jumps: dims mismatch");
  for (std::size_t i = 0; i < p.mass.size(); ++i)
    if (std::abs(p.mass[i] - P.stationary.mass[i]) > 1e-12)
      throw std::invalid_argument("mix_with_jumps: p must equal the stationary density");
  TransitionKernel k = P;
  k.jump_alpha = 1.0 - (1.0 - P.jump_alpha) * (1.0 - alpha);
  return k;
}

struct ChainStop {
  enum class Kind { Distinct, Steps } kind = Kind::Distinct;
  std::size_t count = 0;
  std::size_t step_budget = 0;  // 0: defaults to 1000 n in Distinct mode

  static ChainStop distinct(std::size_t m, std::size_t budget = 0) {
    return {Kind::Distinct, m, budget};
  }
  static ChainStop steps(std::size_t k) { return {Kind::Steps, k, k}; }
};

// Step budget exhausted before reaching the distinct-count target; the
// partially built scheme is preserved for inspection.
class ChainBudgetError : public std::runtime_error {
 public:
  SamplingScheme partial;
  explicit ChainBudgetError(SamplingScheme s)
      : std::runtime_error("run_chain: step budget exhausted before the distinct target"),
        partial(std::move(s)) {}
};

// Simulate the chain from X1 ~ p. Every visited state lands in draw_log
// (rejections repeat the current state); omega collects distinct states in
// first-visit order.
inline SamplingScheme run_chain(const TransitionKernel& k, ChainStop stop, std::uint64_t seed) {
  if (k.n == 0) throw std::invalid_argument("run_chain: empty kernel");
  if (stop.kind == ChainStop::Kind::Distinct && stop.count > k.n)
    throw std::invalid_argument("run_chain: distinct target exceeds state count");
  if (stop.count == 0) throw std::invalid_argument("run_chain: target must be >= 1");
  const std::size_t budget =
      stop.step_budget > 0 ? stop.step_budget
                           : (stop.kind == ChainStop::Kind::Distinct ? 1000 * k.n : stop.count);

  DiscreteSampler jump(k.stationary);
  Rng rng(seed);
  SamplingScheme s;
  s.dims = k.dims;
  s.seed = seed;
  s.provenance = Provenance::Markov;
  s.markov_alpha = k.jump_alpha;
  std::vector<char> seen(k.n, 0);

  auto visit = [&](std::size_t i) {
    s.draw_log.push_back(i);
    if (!seen[i]) {
      seen[i] = 1;
      s.omega.push_back(i);
    }
  };

  std::size_t x = jump(rng);  // X1 ~ p
  visit(x);
  auto done = [&] {
    return stop.kind == ChainStop::Kind::Distinct ? s.omega.size() >= stop.count
                                                  : s.draw_log.size() >= stop.count;
  };
  while (!done()) {
    if (s.draw_log.size() >= budget) throw ChainBudgetError(std::move(s));
    if (k.jump_alpha > 0.0 && uniform01(rng) < k.jump_alpha) {
      x = jump(rng);
    } else {
      // linear inverse-CDF over the base row (at most 2d + 1 entries)
      double u = uniform01(rng);
      std::size_t next = k.col[k.row_ptr[x + 1] - 1];
      for (std::size_t e = k.row_ptr[x]; e < k.row_ptr[x + 1]; ++e) {
        if (u < k.val[e]) {
          next = k.col[e];
          break;
        }
        u -= k.val[e];
      }
      x = next;
    }
    visit(x);
  }
  return s;
}

struct SpectralReport {
  double lambda2 = 0.0;
  double gap = 0.0;
  enum class Method { DenseSymmetricEig, Lanczos } method = Method::DenseSymmetricEig;
};

namespace detail {

// Symmetrization D^{1/2} P D^{-1/2}; shares P's spectrum when P is
// reversible with respect to p. The jump part becomes alpha sqrt(p) sqrt(p)^T.
inline Eigen::MatrixXd symmetrized_dense(const TransitionKernel& k) {
  const auto& p = k.stationary.mass;
  Eigen::VectorXd sp(k.n);
  for (std::size_t i = 0; i < k.n; ++i) sp[i] = std::sqrt(p[i]);
  Eigen::MatrixXd M = k.jump_alpha * (sp * sp.transpose());
  for (std::size_t i = 0; i < k.n; ++i)
    for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e) {
      const std::size_t j = k.col[e];
      M(i, j) += (1.0 - k.jump_alpha) * k.val[e] * sp[i] / sp[j];
    }
  return M;
}

inline double lanczos_lambda2(const TransitionKernel& k) {
  const auto& p = k.stationary.mass;
  const std::size_t n = k.n;
  Eigen::VectorXd sp(n);
  for (std::size_t i = 0; i < n; ++i) sp[i] = std::sqrt(p[i]);

  // apply the symmetrized kernel restricted to the complement of sqrt(p),
  // whose top eigenvector (eigenvalue 1) is deflated by projection
  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = (k.jump_alpha * sp.dot(x)) * sp;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e)
        acc += k.val[e] * x[k.col[e]] * sp[i] / sp[k.col[e]];
      y[i] += (1.0 - k.jump_alpha) * acc;
    }
    y -= sp.dot(y) * sp;
    return y;
  };

  const std::size_t cap = std::min<std::size_t>(n, 300);
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;
  Rng rng(0x5eed5eedULL);
  Eigen::VectorXd v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = uniform01(rng) - 0.5;
  v -= sp.dot(v) * sp;
  v.normalize();
  double lambda = -2.0, prev = -2.0;
  for (std::size_t it = 0; it < cap; ++it) {
    basis.push_back(v);
    Eigen::VectorXd w = apply(v);
    const double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (it > 0) w -= beta.back() * basis[it - 1];
    for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
    const double bnorm = w.norm();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(alpha.size(), alpha.size());
    for (std::size_t r = 0; r < alpha.size(); ++r) {
      T(r, r) = alpha[r];
      if (r + 1 < alpha.size()) T(r, r + 1) = T(r + 1, r) = beta[r];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    lambda = es.eigenvalues().maxCoeff();
    if (bnorm < 1e-12 || (it > 8 && std::abs(lambda - prev) < 1e-12)) break;
    prev = lambda;
    beta.push_back(bnorm);
    v = w / bnorm;
  }
  return lambda;
}

}  // namespace detail

// Second-largest eigenvalue and spectral gap of a reversible kernel.
inline SpectralReport spectral_gap(const TransitionKernel& k) {
  if (k.n < 2) throw std::invalid_argument("spectral_gap: need at least two states");
  if (detailed_balance_residual(k) > 1e-10)
    throw std::invalid_argument("spectral_gap: kernel is not reversible");
  SpectralReport r;
  if (k.n <= 4096) {
    Eigen::MatrixXd M = detail::symmetrized_dense(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    r.lambda2 = es.eigenvalues()[k.n - 2];
    r.method = SpectralReport::Method::DenseSymmetricEig;
  } else {
    r.lambda2 = detail::lanczos_lambda2(k);
    r.method = SpectralReport::Method::Lanczos;
  }
  r.gap = 1.0 - r.lambda2;
  return r;
}

struct CheegerReport {
  double gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

// Conductance-based upper bound for the uniform walk on the periodic
// torus: gap <= (4/d) n^{-1/d}. Requires equal even extents per axis.
inline CheegerReport verify_cheeger_bound(const GridDims& dims) {
  validate_grid(dims);
  for (auto e : dims.extents)
    if (e != dims.extents[0] || e % 2 != 0 || e < 2)
      throw std::invalid_argument("verify_cheeger_bound: non-torus configuration");
  const double d = static_cast<double>(dims.rank());
  const double n = static_cast<double>(dims.n());
  TransitionKernel k = metropolis_kernel(uniform_density(dims), {.periodic = true});
  CheegerReport r;
  r.gap = spectral_gap(k).gap;
  r.bound = (4.0 / d) * std::pow(n, -1.0 / d);
  r.holds = r.gap <= r.bound + 1e-12;
  return r;
}

struct CertificateReport {
  double infnorm_residual = 0.0;
  std::size_t max_certified_s = 0;
  std::size_t visits = 0;
};

// Empirical certificate W_m = (1/m) sum_l Theta_{X_l} with
// Theta_i = a_i a_i^T / p_i; E_p W_m = A^T A = I, and an entrywise
// residual below 1/(2s) certifies exact recovery of all s-sparse
// vectors. Works on the real representation of the complex rows, whose
// expectation is Re(A^H A) = I as well, so claims stay conservative.
inline CertificateReport juditsky_certificate(const AcquisitionModel& model,
                                              const DensityGrid& p,
                                              const std::vector<std::size_t>& draw_log,
                                              std::size_t s_max) {
  const std::size_t n = model.dims.n();
  if (n > 4096) throw std::invalid_argument("juditsky_certificate: n exceeds the dense guard");
  if (p.dims != model.dims) throw std::invalid_argument("juditsky_certificate: dims mismatch");
  if (draw_log.empty()) throw std::invalid_argument("juditsky_certificate: empty draw log");

  std::vector<std::size_t> count(n, 0);
  for (auto i : draw_log) {
    if (i >= n) throw std::out_of_range("juditsky_certificate: index out of range");
    ++count[i];
  }
  const double m = static_cast<double>(draw_log.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::complex<double>> delta(n);
  Eigen::VectorXd re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] == 0) continue;
    if (!(p.mass[i] > 0.0))
      throw std::domain_error("juditsky_certificate: visited cell has zero density");
    std::fill(delta.begin(), delta.end(), std::complex<double>(0.0, 0.0));
    delta[i] = 1.0;
    const auto row = apply_A_adjoint(model, delta);  // conj(a_i); sign drops in outer products
    for (std::size_t t = 0; t < n; ++t) {
      re[t] = row[t].real();
      im[t] = row[t].imag();
    }
    const double w = static_cast<double>(count[i]) / (m * p.mass[i]);
    W.selfadjointView<Eigen::Lower>().rankUpdate(re, w);
    W.selfadjointView<Eigen::Lower>().rankUpdate(im, w);
  }
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double want = (i == j) ? 1.0 : 0.0;
      resid = std::max(resid, std::abs(W(i, j) - want));
    }

  CertificateReport r;
  r.infnorm_residual = resid;
  r.visits = draw_log.size();
  if (resid <= 0.0) {
    r.max_certified_s = s_max;
  } else {
    const double limit = 0.5 / resid;  // certified s must satisfy s < limit
    if (limit > static_cast<double>(s_max)) {
      r.max_certified_s = s_max;
    } else {
      std::size_t s = static_cast<std::size_t>(limit);
      while (s > 0 && !(resid < 1.0 / (2.0 * static_cast<double>(s)))) --s;
      r.max_certified_s = s;
    }
  }
  return r;
}

// Coordinate-list export of the sparse base part; the full kernel is
// (1 - alpha) * base + alpha * ones * p^T as recorded in the header.
inline void export_kernel_coo(const TransitionKernel& k, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("export_kernel_coo: cannot open " + path);
  os << "# transition kernel, P = (1-alpha)*base + alpha*ones*p^T\n";
  os << "# n " << k.n << " alpha " << k.jump_alpha << "\n";
  os << "# base entries: i j value\n";
  os.precision(17);
  for (std::size_t i = 0; i < k.n; ++i)
    for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e)
      os << i << " " << k.col[e] << " " << k.val[e] << "\n";
  if (!os) throw std::runtime_error("export_kernel_coo: write failed");
}

}  // namespace vds
