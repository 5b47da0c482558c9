#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vds/fft.hpp"
#include "vds/grid.hpp"
#include "vds/wavelet.hpp"

namespace vds {

// Acquisition operator A = F Psi^{-1}: unitary DFT of the inverse wavelet
// transform. Rows are indexed by centered frequency; row i is the wavelet
// transform of the i-th Fourier atom, so its sup-norm drives the coherence
// of frequency i.
struct AcquisitionModel {
  GridDims dims;
  WaveletSpec wavelet;
  std::vector<double> row_infnorms;  // centered layout, one entry per frequency
};

namespace detail {

// Per-stage sup moduli of the 1D analysis of each Fourier atom of one
// axis: alpha[l] is the max modulus of the approx block after l stages,
// delta[l] of the detail block emitted at stage l. The d-dimensional
// Mallat transform of a tensor-product atom consists, per stage l, of
// blocks pairing approx/detail factors of that same stage across axes
// (plus the final all-approx block), so only same-stage products occur.
struct AxisStageTables {
  unsigned levels = 0;
  std::vector<double> alpha;  // [c * (levels + 1) + l]
  std::vector<double> delta;  // same layout, entries for l >= 1
};

inline AxisStageTables axis_stage_tables(std::uint32_t extent, const WaveletSpec& spec) {
  AxisStageTables t;
  const unsigned L = spec.levels;
  t.levels = L;
  t.alpha.assign(static_cast<std::size_t>(extent) * (L + 1), 0.0);
  t.delta.assign(static_cast<std::size_t>(extent) * (L + 1), 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(extent));
  std::vector<std::complex<double>> atom(extent), scratch;
  const auto maxmod = [](const std::complex<double>* v, std::size_t len) {
    double m = 0.0;
    for (std::size_t i = 0; i < len; ++i) m = std::max(m, std::abs(v[i]));
    return m;
  };
  for (std::uint32_t c = 0; c < extent; ++c) {
    const std::size_t f = axis_centered_to_fft(extent, c);
    for (std::uint32_t x = 0; x < extent; ++x) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(f) *
                           static_cast<double>(x) / static_cast<double>(extent);
      atom[x] = std::polar(scale, phase);
    }
    const std::size_t base = static_cast<std::size_t>(c) * (L + 1);
    t.alpha[base] = maxmod(atom.data(), extent);
    if (L == 0) continue;
    const std::vector<double>& h = spec.lowpass();
    const std::vector<double> g = qmf_highpass(h);
    std::size_t len = extent;
    for (unsigned l = 1; l <= L; ++l) {
      analyze_line(atom.data(), 1, len, h, g, scratch);
      len /= 2;
      t.alpha[base + l] = maxmod(atom.data(), len);
      t.delta[base + l] = maxmod(atom.data() + len, len);
    }
  }
  return t;
}

}  // namespace detail

inline std::vector<double> compute_row_infnorms(const GridDims& dims, const WaveletSpec& spec) {
  validate_acquisition_grid(dims);
  const std::size_t d = dims.rank();
  const unsigned L = spec.levels;
  std::uint32_t min_ext = dims.extents[0];
  for (auto e : dims.extents) min_ext = std::min(min_ext, e);
  if (L > 30 || (min_ext >> L) << L != min_ext || (L > 0 && (min_ext >> L) == 0))
    throw std::invalid_argument("coherence: too many levels for grid extents");
  std::vector<detail::AxisStageTables> tables(d);
  for (std::size_t a = 0; a < d; ++a)
    tables[a] = detail::axis_stage_tables(dims.extents[a], spec);
  std::vector<double> norms(dims.n());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const auto mi = multi_index(dims, i);
    double best = 1.0;
    for (std::size_t a = 0; a < d; ++a) best *= tables[a].alpha[mi[a] * (L + 1) + L];
    for (unsigned l = 1; l <= L; ++l)
      for (unsigned pat = 1; pat < (1u << d); ++pat) {
        double v = 1.0;
        for (std::size_t a = 0; a < d; ++a) {
          const std::size_t off = mi[a] * (L + 1) + l;
          v *= (pat >> a & 1u) ? tables[a].delta[off] : tables[a].alpha[off];
        }
        best = std::max(best, v);
      }
    norms[i] = best;
  }
  return norms;
}

inline AcquisitionModel make_acquisition_model(const GridDims& dims, const WaveletSpec& spec) {
  return {dims, spec, compute_row_infnorms(dims, spec)};
}

// y = A z, Fourier samples in centered layout.
inline std::vector<std::complex<double>> apply_A(const AcquisitionModel& model,
                                                 const std::vector<std::complex<double>>& z) {
  auto x = wavelet_inverse(model.dims, z, model.wavelet);
  auto y = fft_forward(model.dims, x);
  return shift_to_centered(model.dims, y);
}

// z = A* y; exact inverse of apply_A since A is unitary.
inline std::vector<std::complex<double>> apply_A_adjoint(
    const AcquisitionModel& model, const std::vector<std::complex<double>>& y) {
  auto x = fft_inverse(model.dims, shift_to_fft(model.dims, y));
  return wavelet_forward(model.dims, std::move(x), model.wavelet);
}

}  // namespace vds
