#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vds/grid.hpp"

namespace vds {

enum class Provenance { IID, Mixed, Markov, TSP, Spiral, Radial, RadialRandom, Lines3D };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::IID: return "iid";
    case Provenance::Mixed: return "mixed";
    case Provenance::Markov: return "markov";
    case Provenance::TSP: return "tsp";
    case Provenance::Spiral: return "spiral";
    case Provenance::Radial: return "radial";
    case Provenance::RadialRandom: return "radial_random";
    case Provenance::Lines3D: return "lines3d";
  }
  throw std::logic_error("unknown provenance");
}

inline Provenance provenance_from_name(const std::string& s) {
  if (s == "iid") return Provenance::IID;
  if (s == "mixed") return Provenance::Mixed;
  if (s == "markov") return Provenance::Markov;
  if (s == "tsp") return Provenance::TSP;
  if (s == "spiral") return Provenance::Spiral;
  if (s == "radial") return Provenance::Radial;
  if (s == "radial_random") return Provenance::RadialRandom;
  if (s == "lines3d") return Provenance::Lines3D;
  throw std::invalid_argument("unknown provenance name: " + s);
}

// A set of acquired grid indices (centered frequency layout) plus the raw
// draw/visit sequence that produced it.
//   omega     acquisition order, distinct indices
//   omega1    deterministically acquired subset, ascending
//   draw_log  every raw draw or chain/curve visit, duplicates kept
struct SamplingScheme {
  GridDims dims;
  std::vector<std::size_t> omega;
  std::vector<std::size_t> omega1;
  std::vector<std::size_t> draw_log;
  std::uint64_t seed = 0;
  Provenance provenance = Provenance::IID;
  double markov_alpha = 0.0;  // jump weight, Markov provenance only
};

inline void validate_scheme(const SamplingScheme& s) {
  validate_grid(s.dims);
  const std::size_t n = s.dims.n();
  if (s.omega.size() > n) throw std::invalid_argument("scheme: |omega| > n");
  std::vector<char> in_omega(n, 0);
  for (auto i : s.omega) {
    if (i >= n) throw std::invalid_argument("scheme: omega index out of range");
    if (in_omega[i]) throw std::invalid_argument("scheme: duplicate omega index");
    in_omega[i] = 1;
  }
  for (auto i : s.omega1) {
    if (i >= n || !in_omega[i])
      throw std::invalid_argument("scheme: omega1 must be a subset of omega");
  }
  for (auto i : s.draw_log) {
    if (i >= n || !in_omega[i])
      throw std::invalid_argument("scheme: draw_log entry missing from omega");
  }
}

}  // namespace vds
