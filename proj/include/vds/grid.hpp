#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace vds {

// Cartesian grid extents, row-major storage (last axis contiguous).
//
// Frequency grids are stored in "centered" layout: along an axis of extent
// N, storage index c holds frequency k = c - N/2, so DC sits at c = N/2.
// Conversion to the FFT's natural layout is always explicit.
struct GridDims {
  std::vector<std::uint32_t> extents;

  GridDims() = default;
  GridDims(std::initializer_list<std::uint32_t> e) : extents(e) {}
  explicit GridDims(std::vector<std::uint32_t> e) : extents(std::move(e)) {}

  std::size_t rank() const { return extents.size(); }

  std::size_t n() const {
    std::size_t p = 1;
    for (auto e : extents) p *= e;
    return p;
  }

  bool operator==(const GridDims&) const = default;
};

inline bool is_power_of_two(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Structural check used everywhere a grid of positive extents is enough.
inline void validate_grid(const GridDims& dims) {
  if (dims.rank() == 0 || dims.rank() > 3)
    throw std::invalid_argument("grid rank must be 1, 2 or 3");
  for (auto e : dims.extents)
    if (e == 0) throw std::invalid_argument("grid extent must be positive");
}

// Stricter check for acquisition grids (FFT / wavelet domains).
inline void validate_acquisition_grid(const GridDims& dims) {
  validate_grid(dims);
  for (auto e : dims.extents)
    if (e < 2 || !is_power_of_two(e))
      throw std::invalid_argument("acquisition grid extents must be powers of two >= 2");
}

inline std::array<std::size_t, 3> row_major_strides(const GridDims& dims) {
  std::array<std::size_t, 3> s{1, 1, 1};
  const std::size_t d = dims.rank();
  s[d - 1] = 1;
  for (std::size_t a = d - 1; a > 0; --a) s[a - 1] = s[a] * dims.extents[a];
  return s;
}

inline std::size_t linear_index(const GridDims& dims, const std::array<std::size_t, 3>& mi) {
  auto s = row_major_strides(dims);
  std::size_t lin = 0;
  for (std::size_t a = 0; a < dims.rank(); ++a) lin += mi[a] * s[a];
  return lin;
}

inline std::array<std::size_t, 3> multi_index(const GridDims& dims, std::size_t lin) {
  std::array<std::size_t, 3> mi{0, 0, 0};
  for (std::size_t a = dims.rank(); a-- > 0;) {
    mi[a] = lin % dims.extents[a];
    lin /= dims.extents[a];
  }
  return mi;
}

// Centered frequency coordinates of a linear index: k_a = c_a - N_a/2.
inline std::array<long, 3> centered_freq(const GridDims& dims, std::size_t lin) {
  auto mi = multi_index(dims, lin);
  std::array<long, 3> k{0, 0, 0};
  for (std::size_t a = 0; a < dims.rank(); ++a)
    k[a] = static_cast<long>(mi[a]) - static_cast<long>(dims.extents[a] / 2);
  return k;
}

// Per-axis layout conversions. Frequency k = c - N/2 maps to the FFT bin
// k mod N; both directions reduce to (i + N/2) mod N for even N.
inline std::size_t axis_centered_to_fft(std::uint32_t extent, std::size_t c) {
  long k = static_cast<long>(c) - static_cast<long>(extent / 2);
  long f = k % static_cast<long>(extent);
  if (f < 0) f += extent;
  return static_cast<std::size_t>(f);
}

inline std::size_t axis_fft_to_centered(std::uint32_t extent, std::size_t f) {
  long k = static_cast<long>(f);
  if (k >= static_cast<long>(extent) - static_cast<long>(extent / 2)) k -= extent;
  return static_cast<std::size_t>(k + static_cast<long>(extent / 2));
}

inline std::size_t centered_to_fft(const GridDims& dims, std::size_t lin) {
  auto mi = multi_index(dims, lin);
  std::array<std::size_t, 3> out{0, 0, 0};
  for (std::size_t a = 0; a < dims.rank(); ++a)
    out[a] = axis_centered_to_fft(dims.extents[a], mi[a]);
  return linear_index(dims, out);
}

inline std::size_t fft_to_centered(const GridDims& dims, std::size_t lin) {
  auto mi = multi_index(dims, lin);
  std::array<std::size_t, 3> out{0, 0, 0};
  for (std::size_t a = 0; a < dims.rank(); ++a)
    out[a] = axis_fft_to_centered(dims.extents[a], mi[a]);
  return linear_index(dims, out);
}

// Whole-grid permutations between the two layouts.
template <class T>
std::vector<T> shift_to_centered(const GridDims& dims, const std::vector<T>& fft_layout) {
  if (fft_layout.size() != dims.n()) throw std::invalid_argument("shift: size mismatch");
  std::vector<T> out(fft_layout.size());
  for (std::size_t i = 0; i < fft_layout.size(); ++i)
    out[fft_to_centered(dims, i)] = fft_layout[i];
  return out;
}

template <class T>
std::vector<T> shift_to_fft(const GridDims& dims, const std::vector<T>& centered_layout) {
  if (centered_layout.size() != dims.n()) throw std::invalid_argument("shift: size mismatch");
  std::vector<T> out(centered_layout.size());
  for (std::size_t i = 0; i < centered_layout.size(); ++i)
    out[centered_to_fft(dims, i)] = centered_layout[i];
  return out;
}

}  // namespace vds
