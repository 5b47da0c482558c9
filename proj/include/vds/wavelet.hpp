#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "vds/grid.hpp"

namespace vds {

enum class WaveletFamily { Haar, Symmlet10, CustomOrthogonal };

namespace detail {

inline const std::vector<double>& haar_taps() {
  static const std::vector<double> h{0.7071067811865475244, 0.7071067811865475244};
  return h;
}

// 20-tap least-asymmetric Daubechies lowpass filter with 10 vanishing
// moments, obtained by spectral factorization of the degree-9 Daubechies
// polynomial at 60-digit precision. Not trusted blindly: every WaveletSpec
// re-checks the orthonormal filter-bank identities at construction.
inline const std::vector<double>& symmlet10_taps() {
  static const std::vector<double> h{
      7.701598091144598e-04,  9.563267072285273e-05,  -8.641299277022150e-03,
      -1.465382581304611e-03, 4.592723923109151e-02,  1.160989390371132e-02,
      -1.594942788849106e-01, -7.088053578323157e-02, 4.716906669384429e-01,
      7.695100370210979e-01,  3.838267610670763e-01,  -3.553674047381959e-02,
      -3.199005688242811e-02, 4.999497207737516e-02,  5.764912033581150e-03,
      -2.035493981231111e-02, -8.043589320164513e-04, 4.593173585311792e-03,
      5.703608361849501e-05,  -4.593294210046520e-04};
  return h;
}

inline void validate_orthonormal_filter(const std::vector<double>& h) {
  if (h.size() < 2 || h.size() % 2 != 0)
    throw std::invalid_argument("wavelet filter must have even length >= 2");
  const double tol = 1e-10;
  double sum = 0.0;
  for (double c : h) sum += c;
  if (std::abs(sum - std::sqrt(2.0)) > tol)
    throw std::invalid_argument("wavelet filter does not sum to sqrt(2)");
  for (std::size_t m = 0; 2 * m < h.size(); ++m) {
    double acc = 0.0;
    for (std::size_t t = 0; t + 2 * m < h.size(); ++t) acc += h[t] * h[t + 2 * m];
    const double want = (m == 0) ? 1.0 : 0.0;
    if (std::abs(acc - want) > tol)
      throw std::invalid_argument("wavelet filter violates double-shift orthonormality");
  }
}

}  // namespace detail

// Orthogonal wavelet filter bank plus decomposition depth. levels = 0
// requests the identity transform (pure Fourier sensing); levels = L >= 1
// runs L joint Mallat stages, each axis analyzed once per stage.
struct WaveletSpec {
  WaveletFamily family = WaveletFamily::Haar;
  unsigned levels = 1;
  std::vector<double> custom_taps;

  static WaveletSpec haar(unsigned levels) { return {WaveletFamily::Haar, levels, {}}; }
  static WaveletSpec symmlet10(unsigned levels) { return {WaveletFamily::Symmlet10, levels, {}}; }
  static WaveletSpec identity() { return {WaveletFamily::Haar, 0, {}}; }
  static WaveletSpec custom(std::vector<double> taps, unsigned levels) {
    detail::validate_orthonormal_filter(taps);
    return {WaveletFamily::CustomOrthogonal, levels, std::move(taps)};
  }

  const std::vector<double>& lowpass() const {
    switch (family) {
      case WaveletFamily::Haar:
        return detail::haar_taps();
      case WaveletFamily::Symmlet10:
        return detail::symmlet10_taps();
      case WaveletFamily::CustomOrthogonal:
        return custom_taps;
    }
    throw std::logic_error("unknown wavelet family");
  }
};

namespace detail {

// Quadrature mirror highpass g[t] = (-1)^t h[T-1-t].
inline std::vector<double> qmf_highpass(const std::vector<double>& h) {
  std::vector<double> g(h.size());
  for (std::size_t t = 0; t < h.size(); ++t)
    g[t] = ((t % 2 == 0) ? 1.0 : -1.0) * h[h.size() - 1 - t];
  return g;
}

// One periodized analysis stage on a strided line of even length len:
// approx into the first half, detail into the second.
template <class T>
void analyze_line(T* base, std::size_t stride, std::size_t len, const std::vector<double>& h,
                  const std::vector<double>& g, std::vector<T>& scratch) {
  scratch.resize(len);
  for (std::size_t i = 0; i < len; ++i) scratch[i] = base[i * stride];
  const std::size_t half = len / 2;
  const std::size_t taps = h.size();
  for (std::size_t k = 0; k < half; ++k) {
    T a{}, d{};
    for (std::size_t t = 0; t < taps; ++t) {
      const T v = scratch[(2 * k + t) % len];
      a += h[t] * v;
      d += g[t] * v;
    }
    base[k * stride] = a;
    base[(half + k) * stride] = d;
  }
}

// Transpose of analyze_line: reconstruct the line from approx/detail halves.
template <class T>
void synthesize_line(T* base, std::size_t stride, std::size_t len, const std::vector<double>& h,
                     const std::vector<double>& g, std::vector<T>& scratch) {
  scratch.assign(len, T{});
  const std::size_t half = len / 2;
  const std::size_t taps = h.size();
  for (std::size_t k = 0; k < half; ++k) {
    const T a = base[k * stride];
    const T d = base[(half + k) * stride];
    for (std::size_t t = 0; t < taps; ++t) scratch[(2 * k + t) % len] += a * h[t] + d * g[t];
  }
  for (std::size_t i = 0; i < len; ++i) base[i * stride] = scratch[i];
}

// Apply fn to every line along `axis` inside the leading sub-block `sub`.
template <class T, class Fn>
void for_each_line(std::vector<T>& data, const GridDims& dims,
                   const std::array<std::size_t, 3>& sub, std::size_t axis, Fn&& fn) {
  const auto strides = row_major_strides(dims);
  const std::size_t d = dims.rank();
  std::array<std::size_t, 2> others{};
  std::size_t no = 0;
  for (std::size_t a = 0; a < d; ++a)
    if (a != axis) others[no++] = a;
  std::size_t count = 1;
  for (std::size_t i = 0; i < no; ++i) count *= sub[others[i]];
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t rem = c, base = 0;
    for (std::size_t i = no; i-- > 0;) {
      base += (rem % sub[others[i]]) * strides[others[i]];
      rem /= sub[others[i]];
    }
    fn(data.data() + base, strides[axis], sub[axis]);
  }
}

template <class T>
void wavelet_run(std::vector<T>& data, const GridDims& dims, const WaveletSpec& spec,
                 bool forward) {
  validate_acquisition_grid(dims);
  if (data.size() != dims.n()) throw std::invalid_argument("wavelet: size mismatch");
  if (spec.levels == 0) return;
  std::uint32_t min_ext = dims.extents[0];
  for (auto e : dims.extents) min_ext = std::min(min_ext, e);
  if (spec.levels > 30 || (min_ext >> spec.levels) << spec.levels != min_ext ||
      (min_ext >> spec.levels) == 0)
    throw std::invalid_argument("wavelet: too many levels for grid extents");

  const std::vector<double>& h = spec.lowpass();
  validate_orthonormal_filter(h);
  const std::vector<double> g = qmf_highpass(h);
  const std::size_t d = dims.rank();
  std::vector<T> scratch;

  if (forward) {
    std::array<std::size_t, 3> sub{1, 1, 1};
    for (std::size_t a = 0; a < d; ++a) sub[a] = dims.extents[a];
    for (unsigned level = 0; level < spec.levels; ++level) {
      for (std::size_t axis = 0; axis < d; ++axis)
        for_each_line(data, dims, sub, axis, [&](T* base, std::size_t stride, std::size_t len) {
          analyze_line(base, stride, len, h, g, scratch);
        });
      for (std::size_t a = 0; a < d; ++a) sub[a] /= 2;
    }
  } else {
    for (unsigned level = spec.levels; level-- > 0;) {
      std::array<std::size_t, 3> sub{1, 1, 1};
      for (std::size_t a = 0; a < d; ++a) sub[a] = dims.extents[a] >> level;
      for (std::size_t axis = d; axis-- > 0;)
        for_each_line(data, dims, sub, axis, [&](T* base, std::size_t stride, std::size_t len) {
          synthesize_line(base, stride, len, h, g, scratch);
        });
    }
  }
}

}  // namespace detail

template <class T>
std::vector<T> wavelet_forward(const GridDims& dims, std::vector<T> x, const WaveletSpec& spec) {
  detail::wavelet_run(x, dims, spec, true);
  return x;
}

template <class T>
std::vector<T> wavelet_inverse(const GridDims& dims, std::vector<T> x, const WaveletSpec& spec) {
  detail::wavelet_run(x, dims, spec, false);
  return x;
}

}  // namespace vds
