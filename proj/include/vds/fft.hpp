#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "vds/grid.hpp"

namespace vds {

namespace detail {

// FFTW's planner is not thread-safe; executing distinct plans is. Each
// thread keeps its own plans and scratch buffers, so concurrent transforms
// never share state and only plan creation is serialized.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t n = 0;

  FftwPlans() = default;
  FftwPlans(const FftwPlans&) = delete;
  FftwPlans& operator=(const FftwPlans&) = delete;
  FftwPlans(FftwPlans&& o) noexcept { swap(o); }
  FftwPlans& operator=(FftwPlans&& o) noexcept {
    swap(o);
    return *this;
  }
  void swap(FftwPlans& o) noexcept {
    std::swap(fwd, o.fwd);
    std::swap(bwd, o.bwd);
    std::swap(in, o.in);
    std::swap(out, o.out);
    std::swap(n, o.n);
  }
  ~FftwPlans() {
    if (fwd || bwd) {
      std::lock_guard<std::mutex> lk(fftw_planner_mutex());
      if (fwd) fftw_destroy_plan(fwd);
      if (bwd) fftw_destroy_plan(bwd);
    }
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

inline const FftwPlans& fftw_plans_for(const GridDims& dims) {
  thread_local std::map<std::vector<std::uint32_t>, FftwPlans> cache;
  auto it = cache.find(dims.extents);
  if (it != cache.end()) return it->second;

  FftwPlans p;
  p.n = dims.n();
  p.in = fftw_alloc_complex(p.n);
  p.out = fftw_alloc_complex(p.n);
  if (!p.in || !p.out) throw std::bad_alloc();
  std::vector<int> ext(dims.extents.begin(), dims.extents.end());
  {
    std::lock_guard<std::mutex> lk(fftw_planner_mutex());
    p.fwd = fftw_plan_dft(static_cast<int>(ext.size()), ext.data(), p.in, p.out,
                          FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft(static_cast<int>(ext.size()), ext.data(), p.in, p.out,
                          FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  return cache.emplace(dims.extents, std::move(p)).first->second;
}

inline std::vector<std::complex<double>> fft_run(const GridDims& dims,
                                                 const std::vector<std::complex<double>>& x,
                                                 bool forward) {
  validate_acquisition_grid(dims);
  if (x.size() != dims.n()) throw std::invalid_argument("fft: size mismatch");
  const FftwPlans& p = fftw_plans_for(dims);
  for (std::size_t i = 0; i < p.n; ++i) {
    p.in[i][0] = x[i].real();
    p.in[i][1] = x[i].imag();
  }
  fftw_execute(forward ? p.fwd : p.bwd);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.n));
  std::vector<std::complex<double>> y(p.n);
  for (std::size_t i = 0; i < p.n; ++i)
    y[i] = std::complex<double>(p.out[i][0] * scale, p.out[i][1] * scale);
  return y;
}

}  // namespace detail

// Unitary d-dimensional DFT (both directions scale by n^{-1/2}), natural
// FFT frequency layout. Centered-layout callers shift explicitly.
inline std::vector<std::complex<double>> fft_forward(const GridDims& dims,
                                                     const std::vector<std::complex<double>>& x) {
  return detail::fft_run(dims, x, true);
}

inline std::vector<std::complex<double>> fft_inverse(const GridDims& dims,
                                                     const std::vector<std::complex<double>>& x) {
  return detail::fft_run(dims, x, false);
}

}  // namespace vds
