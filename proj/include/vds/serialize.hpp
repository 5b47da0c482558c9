#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vds/density.hpp"
#include "vds/empirical.hpp"
#include "vds/grid.hpp"
#include "vds/markov.hpp"
#include "vds/reconstruct.hpp"
#include "vds/scheme.hpp"
#include "vds/tsp.hpp"

namespace vds {

using json = nlohmann::json;

inline json scheme_to_json(const SamplingScheme& s) {
  validate_scheme(s);
  json j;
  j["format"] = "vds-scheme";
  j["version"] = 1;
  j["dims"] = s.dims.extents;
  j["seed"] = s.seed;
  j["provenance"] = provenance_name(s.provenance);
  j["markov_alpha"] = s.markov_alpha;
  j["omega"] = s.omega;
  j["omega1"] = s.omega1;
  j["draw_log"] = s.draw_log;
  return j;
}

inline SamplingScheme scheme_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "vds-scheme")
    throw std::invalid_argument("scheme_from_json: not a scheme document");
  if (j.value("version", 0) != 1)
    throw std::invalid_argument("scheme_from_json: unsupported version");
  SamplingScheme s;
  s.dims.extents = j.at("dims").get<std::vector<std::uint32_t>>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.provenance = provenance_from_name(j.at("provenance").get<std::string>());
  s.markov_alpha = j.value("markov_alpha", 0.0);
  s.omega = j.at("omega").get<std::vector<std::size_t>>();
  s.omega1 = j.value("omega1", std::vector<std::size_t>{});
  s.draw_log = j.value("draw_log", std::vector<std::size_t>{});
  validate_scheme(s);
  return s;
}

inline void write_scheme_json(const SamplingScheme& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_scheme_json: cannot open " + path);
  os << scheme_to_json(s).dump(2) << "\n";
  if (!os) throw std::runtime_error("write_scheme_json: write failed");
}

inline SamplingScheme read_scheme_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_scheme_json: cannot open " + path);
  json j;
  is >> j;
  return scheme_from_json(j);
}

inline json index_set_to_json(const GridDims& dims, const std::vector<std::size_t>& indices) {
  validate_grid(dims);
  for (auto i : indices)
    if (i >= dims.n()) throw std::out_of_range("index_set_to_json: index out of range");
  return json{{"dims", dims.extents}, {"indices", indices}};
}

inline std::pair<GridDims, std::vector<std::size_t>> index_set_from_json(const json& j) {
  GridDims dims;
  dims.extents = j.at("dims").get<std::vector<std::uint32_t>>();
  validate_grid(dims);
  auto idx = j.at("indices").get<std::vector<std::size_t>>();
  for (auto i : idx)
    if (i >= dims.n()) throw std::out_of_range("index_set_from_json: index out of range");
  return {dims, idx};
}

// Plain-text PBM (P1) mask of a 2-d sampling pattern; sampled cells are 1.
inline void write_mask_pbm(const GridDims& dims, const std::vector<std::size_t>& omega,
                           const std::string& path) {
  validate_grid(dims);
  if (dims.rank() != 2) throw std::invalid_argument("write_mask_pbm: needs a 2-d grid");
  std::vector<char> mask(dims.n(), 0);
  for (auto i : omega) {
    if (i >= dims.n()) throw std::out_of_range("write_mask_pbm: index out of range");
    mask[i] = 1;
  }
  const std::size_t rows = dims.extents[0], cols = dims.extents[1];
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_mask_pbm: cannot open " + path);
  os << "P1\n" << cols << " " << rows << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) os << " ";
      os << (mask[r * cols + c] ? 1 : 0);
    }
    os << "\n";
  }
  if (!os) throw std::runtime_error("write_mask_pbm: write failed");
}

inline json density_to_json(const DensityGrid& p) {
  validate_density(p);
  return json{{"dims", p.dims.extents}, {"mass", p.mass}};
}

inline json to_json(const BoundReport& r) {
  json j;
  switch (r.kind) {
    case BoundKind::IID: j["kind"] = "iid"; break;
    case BoundKind::Mixed: j["kind"] = "mixed"; break;
    case BoundKind::Markov: j["kind"] = "markov"; break;
  }
  j["K"] = r.K;
  j["m_required"] = r.m_required;
  j["s"] = r.s;
  j["eta"] = r.eta;
  j["n"] = r.n;
  if (r.kind == BoundKind::Mixed) j["m1"] = r.m1;
  if (r.kind == BoundKind::Markov) j["eps"] = r.eps;
  return j;
}

inline json to_json(const SpectralReport& r) {
  return json{{"lambda2", r.lambda2},
              {"gap", r.gap},
              {"method", r.method == SpectralReport::Method::DenseSymmetricEig ? "dense" : "lanczos"}};
}

inline json to_json(const CheegerReport& r) {
  return json{{"gap", r.gap}, {"bound", r.bound}, {"holds", r.holds}};
}

inline json to_json(const CertificateReport& r) {
  return json{{"infnorm_residual", r.infnorm_residual},
              {"max_certified_s", r.max_certified_s},
              {"visits", r.visits}};
}

inline json to_json(const BhhEstimate& r) {
  return json{{"cities", r.cities}, {"trials", r.trials}, {"mean", r.mean}, {"stddev", r.stddev}};
}

inline json to_json(const TspLimitReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"cities", row.cities},
                        {"corrected_tv", row.corrected_tv},
                        {"uncorrected_tv_target", row.uncorrected_tv_target},
                        {"uncorrected_tv_limit", row.uncorrected_tv_limit},
                        {"uncorrected_slope", row.uncorrected_slope}});
  return json{{"h", r.h}, {"trials", r.trials}, {"rows", rows}};
}

inline json to_json(const ConvergenceReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"N", row.N}, {"mean_tv", row.mean_tv}, {"std_tv", row.std_tv}});
  return json{{"rows", rows}, {"tv_decreasing", r.tv_decreasing}};
}

inline json to_json(const ReconstructionResult& r) {
  return json{{"iterations", r.iterations},
              {"converged", r.converged},
              {"fp_residual", r.fp_residual},
              {"feasibility", r.feasibility},
              {"l1_objective", r.l1_objective}};
}

// Minimal CSV writer; cells are emitted verbatim, so callers quote
// anything containing commas themselves.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("write_csv: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << "\n";
  }
  if (!os) throw std::runtime_error("write_csv: write failed");
}

inline std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace vds
