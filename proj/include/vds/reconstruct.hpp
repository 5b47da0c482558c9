#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vds/acquisition.hpp"
#include "vds/grid.hpp"

namespace vds {

struct ReconstructionConfig {
  double gamma = 1.0;      // prox step (soft-threshold level)
  double lambda = 1.0;     // relaxation, in (0, 2)
  double tol_fp = 1e-9;    // relative fixed-point residual for convergence
  double tol_feas = 1e-8;  // feasibility reported against this in results
  std::size_t max_iter = 20000;
};

struct ReconstructionResult {
  std::vector<std::complex<double>> coeffs;  // basis-pursuit solution (sparsity domain)
  std::vector<std::complex<double>> image;   // synthesized image
  std::size_t iterations = 0;
  bool converged = false;
  double fp_residual = 0.0;
  double feasibility = 0.0;    // relative l2 constraint violation of coeffs
  double l1_objective = 0.0;   // sum of coefficient moduli at termination
};

// Phase-preserving shrinkage, the prox of tau * |.| on complex scalars.
inline std::complex<double> soft_threshold(std::complex<double> z, double tau) {
  const double mag = std::abs(z);
  if (mag <= tau) return {0.0, 0.0};
  return z * ((mag - tau) / mag);
}

namespace detail {

inline void check_measurement_set(const std::vector<std::size_t>& omega, std::size_t n) {
  if (omega.empty()) throw std::invalid_argument("reconstruction: empty measurement set");
  std::vector<std::size_t> sorted = omega;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("reconstruction: duplicate measurement cells");
  if (sorted.back() >= n) throw std::out_of_range("reconstruction: cell out of range");
}

}  // namespace detail

// Samples of the sensing map at the given cells: y_k = (A z)_{omega[k]}.
inline std::vector<std::complex<double>> measure_coeffs(const AcquisitionModel& model,
                                                        const std::vector<std::size_t>& omega,
                                                        const std::vector<std::complex<double>>& z) {
  detail::check_measurement_set(omega, model.dims.n());
  const auto full = apply_A(model, z);
  std::vector<std::complex<double>> y(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) y[k] = full[omega[k]];
  return y;
}

// Projection onto {z : (A z)_Omega = y}. The rows of A are orthonormal
// (restriction of a unitary matrix), so z + A^*_Omega (y - (A z)_Omega)
// is the exact orthogonal projection.
inline std::vector<std::complex<double>> project_affine(const AcquisitionModel& model,
                                                        const std::vector<std::size_t>& omega,
                                                        const std::vector<std::complex<double>>& y,
                                                        const std::vector<std::complex<double>>& z) {
  const std::size_t n = model.dims.n();
  if (y.size() != omega.size()) throw std::invalid_argument("project_affine: y/omega size mismatch");
  if (z.size() != n) throw std::invalid_argument("project_affine: z has wrong length");
  auto full = apply_A(model, z);
  std::vector<std::complex<double>> residual(n, {0.0, 0.0});
  for (std::size_t k = 0; k < omega.size(); ++k) residual[omega[k]] = y[k] - full[omega[k]];
  const auto corr = apply_A_adjoint(model, residual);
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] + corr[i];
  return out;
}

// Douglas-Rachford iteration for basis pursuit
//   min ||z||_1  subject to  (A z)_Omega = y
// in the form w <- w + lambda (prox_{gamma |.|_1}(2 P(w) - w) - P(w)),
// whose fixed points satisfy z* = P(w*) being a solution.
inline ReconstructionResult douglas_rachford(const AcquisitionModel& model,
                                             const std::vector<std::size_t>& omega,
                                             const std::vector<std::complex<double>>& y,
                                             const ReconstructionConfig& cfg = {}) {
  const std::size_t n = model.dims.n();
  detail::check_measurement_set(omega, n);
  if (y.size() != omega.size())
    throw std::invalid_argument("douglas_rachford: y/omega size mismatch");
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("douglas_rachford: gamma must be positive");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 2.0))
    throw std::invalid_argument("douglas_rachford: lambda must be in (0, 2)");
  if (cfg.max_iter == 0) throw std::invalid_argument("douglas_rachford: max_iter must be positive");

  // start from the minimum-norm feasible point A^*_Omega y
  std::vector<std::complex<double>> lifted(n, {0.0, 0.0});
  for (std::size_t k = 0; k < omega.size(); ++k) lifted[omega[k]] = y[k];
  std::vector<std::complex<double>> w = apply_A_adjoint(model, lifted);

  ReconstructionResult res;
  std::vector<std::complex<double>> z, u(n);
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    z = project_affine(model, omega, y, w);
    double znorm = 0.0, step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = soft_threshold(2.0 * z[i] - w[i], cfg.gamma);
      step += std::norm(u[i] - z[i]);
      znorm += std::norm(z[i]);
    }
    step = std::sqrt(step);
    znorm = std::sqrt(znorm);
    for (std::size_t i = 0; i < n; ++i) w[i] += cfg.lambda * (u[i] - z[i]);
    res.iterations = it;
    res.fp_residual = step / std::max(1.0, znorm);
    if (res.fp_residual < cfg.tol_fp) {
      res.converged = true;
      break;
    }
  }
  res.coeffs = project_affine(model, omega, y, w);
  for (const auto& c : res.coeffs) res.l1_objective += std::abs(c);

  double ynorm = 0.0, feas = 0.0;
  const auto ymeas = measure_coeffs(model, omega, res.coeffs);
  for (std::size_t k = 0; k < y.size(); ++k) {
    feas += std::norm(ymeas[k] - y[k]);
    ynorm += std::norm(y[k]);
  }
  res.feasibility = ynorm > 0.0 ? std::sqrt(feas / ynorm) : std::sqrt(feas);
  res.image = wavelet_inverse(model.dims, res.coeffs, model.wavelet);
  return res;
}

// Peak signal-to-noise ratio against a reference; peak is max |ref|.
// Returns +infinity for an exact match.
inline double psnr(const std::vector<double>& ref, const std::vector<double>& recon) {
  if (ref.size() != recon.size() || ref.empty()) throw std::invalid_argument("psnr: size mismatch");
  double peak = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    peak = std::max(peak, std::abs(ref[i]));
    const double d = ref[i] - recon[i];
    mse += d * d;
  }
  if (peak == 0.0) throw std::domain_error("psnr: reference is identically zero");
  mse /= static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

inline double psnr(const std::vector<std::complex<double>>& ref,
                   const std::vector<std::complex<double>>& recon) {
  if (ref.size() != recon.size() || ref.empty()) throw std::invalid_argument("psnr: size mismatch");
  double peak = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    peak = std::max(peak, std::abs(ref[i]));
    mse += std::norm(ref[i] - recon[i]);
  }
  if (peak == 0.0) throw std::domain_error("psnr: reference is identically zero");
  mse /= static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace vds
