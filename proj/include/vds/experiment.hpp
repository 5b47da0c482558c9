#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vds/acquisition.hpp"
#include "vds/density.hpp"
#include "vds/empirical.hpp"
#include "vds/io.hpp"
#include "vds/markov.hpp"
#include "vds/parallel.hpp"
#include "vds/parametric.hpp"
#include "vds/phantom.hpp"
#include "vds/reconstruct.hpp"
#include "vds/sampler_iid.hpp"
#include "vds/scheme.hpp"
#include "vds/serialize.hpp"
#include "vds/trajectory.hpp"
#include "vds/tsp.hpp"
#include "vds/wavelet.hpp"

namespace vds {

inline WaveletSpec wavelet_from_json(const json& j) {
  if (j.is_null()) return WaveletSpec::symmlet10(3);
  const std::string family = j.value("family", "symmlet10");
  const unsigned levels = j.value("levels", 3u);
  if (family == "identity") return WaveletSpec::identity();
  if (family == "haar") return WaveletSpec::haar(levels);
  if (family == "symmlet10") return WaveletSpec::symmlet10(levels);
  if (family == "custom")
    return WaveletSpec::custom(j.at("taps").get<std::vector<double>>(), levels);
  throw std::invalid_argument("wavelet_from_json: unknown family " + family);
}

inline json wavelet_to_json(const WaveletSpec& w) {
  json j;
  switch (w.family) {
    case WaveletFamily::Haar: j["family"] = w.levels == 0 ? "identity" : "haar"; break;
    case WaveletFamily::Symmlet10: j["family"] = "symmlet10"; break;
    case WaveletFamily::CustomOrthogonal:
      j["family"] = "custom";
      j["taps"] = w.custom_taps;
      break;
  }
  j["levels"] = w.levels;
  return j;
}

// Density specs: {"kind":"uniform"} | {"kind":"polynomial","exponent":e}
// | {"kind":"optimal"} | {"kind":"file","path":...}. A null spec means
// the optimal density of the model.
inline DensityGrid density_from_json(const json& j, const GridDims& dims,
                                     const AcquisitionModel* model) {
  const std::string kind = j.is_null() ? "optimal" : j.value("kind", "optimal");
  if (kind == "uniform") return uniform_density(dims);
  if (kind == "polynomial") return polynomial_density(dims, j.at("exponent").get<double>());
  if (kind == "optimal") {
    if (model == nullptr || !(model->dims == dims))
      throw std::invalid_argument("density_from_json: optimal density needs the sensing model");
    return optimal_density(*model);
  }
  if (kind == "file") {
    GridDims file_dims;
    auto mass = read_vdsg_real(j.at("path").get<std::string>(), file_dims);
    if (!(file_dims == dims)) throw std::invalid_argument("density_from_json: grid mismatch");
    DensityGrid p{file_dims, std::move(mass)};
    validate_density(p);
    return p;
  }
  throw std::invalid_argument("density_from_json: unknown kind " + kind);
}

inline ReconstructionConfig reconstruction_from_json(const json& j) {
  ReconstructionConfig cfg;
  if (j.is_null()) return cfg;
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.tol_fp = j.value("tol_fp", cfg.tol_fp);
  cfg.tol_feas = j.value("tol_feas", cfg.tol_feas);
  cfg.max_iter = j.value("max_iter", cfg.max_iter);
  return cfg;
}

struct ExperimentConfig {
  GridDims dims;
  WaveletSpec wavelet;
  double R = 5.0;           // sampling ratio n/m; R = 1 means full sampling
  double m1_fraction = 0.0; // deterministic share of the mask for mixed schemes
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string phantom = "builtin";
  std::string out_dir = ".";
  std::vector<json> schemes;
  ReconstructionConfig recon;
};

inline ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.dims.extents = j.at("dims").get<std::vector<std::uint32_t>>();
  validate_acquisition_grid(cfg.dims);
  cfg.wavelet = wavelet_from_json(j.contains("wavelet") ? j["wavelet"] : json());
  cfg.R = j.value("R", 5.0);
  if (!(cfg.R >= 1.0)) throw std::invalid_argument("experiment: R must be >= 1");
  cfg.m1_fraction = j.value("m1_fraction", 0.0);
  if (!(cfg.m1_fraction >= 0.0 && cfg.m1_fraction < 1.0))
    throw std::invalid_argument("experiment: m1_fraction must be in [0, 1)");
  cfg.trials = j.value("trials", std::size_t{1});
  if (cfg.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.phantom = j.value("phantom", "builtin");
  if (cfg.phantom != "builtin" && !std::filesystem::exists(cfg.phantom))
    throw std::invalid_argument("experiment: phantom file not found: " + cfg.phantom);
  cfg.out_dir = j.value("out", ".");
  if (!j.contains("schemes") || !j["schemes"].is_array() || j["schemes"].empty())
    throw std::invalid_argument("experiment: schemes must be a non-empty array");
  for (const auto& s : j["schemes"]) {
    if (!s.contains("sampler")) throw std::invalid_argument("experiment: scheme needs a sampler");
    cfg.schemes.push_back(s);
  }
  cfg.recon = reconstruction_from_json(j.contains("reconstruction") ? j["reconstruction"] : json());
  return cfg;
}

inline json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  json j;
  is >> j;
  return j;
}

// Build a sampling scheme from a spec object. Size parameters must be
// resolved (see calibrate_scheme_size). When the sampler is trajectory
// based and traj_out is given, the underlying curve is copied there.
inline SamplingScheme generate_scheme(const json& spec, const GridDims& dims,
                                      const AcquisitionModel& model, std::uint64_t seed,
                                      Trajectory* traj_out = nullptr) {
  const std::string sampler = spec.at("sampler").get<std::string>();
  const json dj = spec.contains("density") ? spec["density"] : json();
  if (sampler == "iid") {
    const DensityGrid p = density_from_json(dj, dims, &model);
    if (spec.contains("m_distinct"))
      return draw_iid_distinct(p, spec["m_distinct"].get<std::size_t>(), seed);
    return draw_iid(p, spec.at("m").get<std::size_t>(), seed);
  }
  if (sampler == "mixed") {
    const DensityGrid p = density_from_json(dj, dims, &model);
    const std::size_t m1 = spec.at("m1").get<std::size_t>();
    if (spec.contains("m2_distinct"))
      return draw_mixed_distinct(model, p, m1, spec["m2_distinct"].get<std::size_t>(), seed);
    return draw_mixed(model, p, m1, spec.at("m2").get<std::size_t>(), seed);
  }
  if (sampler == "markov") {
    const DensityGrid p = density_from_json(dj, dims, &model);
    TransitionKernel kernel = metropolis_kernel(p, {.periodic = false});
    const double alpha = spec.value("alpha", 0.0);
    if (alpha > 0.0) kernel = mix_with_jumps(kernel, p, alpha);
    if (spec.contains("steps"))
      return run_chain(kernel, ChainStop::steps(spec["steps"].get<std::size_t>()), seed);
    return run_chain(kernel, ChainStop::distinct(spec.at("target_distinct").get<std::size_t>()),
                     seed);
  }
  if (sampler == "tsp") {
    const DensityGrid p = density_from_json(dj, dims, &model);
    const DensityGrid q = target_to_initial_density(p);
    TspEffort effort;
    effort.two_opt = spec.value("two_opt", true);
    effort.max_passes = spec.value("max_passes", effort.max_passes);
    const auto cities = draw_points(q, spec.at("cities").get<std::size_t>(), seed);
    Trajectory traj = solve_tsp(cities, effort);
    if (traj_out) *traj_out = traj;
    return regrid_trajectory(traj, dims, Provenance::TSP, seed);
  }
  if (sampler == "spiral") {
    SpiralSpec sp;
    sp.r0 = spec.value("r0", sp.r0);
    sp.r1 = spec.value("r1", sp.r1);
    sp.turns = spec.at("turns").get<std::size_t>();
    sp.vertices_per_turn = spec.value("vertices_per_turn", sp.vertices_per_turn);
    Trajectory traj = spiral_trajectory(sp);
    if (traj_out) *traj_out = traj;
    return regrid_trajectory(traj, dims, Provenance::Spiral, seed);
  }
  if (sampler == "radial" || sampler == "radial_random")
    return radial_scheme(dims, spec.at("spokes").get<std::size_t>(), sampler == "radial_random",
                         seed);
  if (sampler == "lines3d") {
    if (dims.rank() != 3) throw std::invalid_argument("lines3d sampler needs a rank-3 grid");
    GridDims plane;
    plane.extents = {dims.extents[0], dims.extents[1]};
    const DensityGrid p2d = density_from_json(dj, plane, nullptr);
    return lines3d_scheme(dims, p2d, spec.at("m_lines").get<std::size_t>(), seed);
  }
  throw std::invalid_argument("generate_scheme: unknown sampler " + sampler);
}

namespace detail {

// Smallest parameter value whose mask reaches m_target (then the closer
// of it and its predecessor). The mask size is evaluated with a fixed
// calibration seed so the search is deterministic.
inline std::size_t search_scheme_parameter(const json& spec, const std::string& key,
                                           std::size_t lo, std::size_t cap,
                                           const GridDims& dims, const AcquisitionModel& model,
                                           std::size_t m_target, std::uint64_t seed) {
  auto mask_size = [&](std::size_t v) {
    json s2 = spec;
    s2[key] = v;
    return generate_scheme(s2, dims, model, derive_seed(seed, 0xCA1Bull)).omega.size();
  };
  std::size_t hi = lo;
  std::size_t hi_mask = mask_size(hi);
  while (hi_mask < m_target && hi < cap) {
    hi = std::min(cap, hi * 2 + 1);
    hi_mask = mask_size(hi);
  }
  if (hi_mask < m_target) return hi;  // saturated below target; best effort
  std::size_t lo_bound = lo;
  while (lo_bound + 1 < hi) {
    const std::size_t mid = lo_bound + (hi - lo_bound) / 2;
    if (mask_size(mid) >= m_target)
      hi = mid;
    else
      lo_bound = mid;
  }
  if (hi == lo) return hi;
  const std::size_t below = hi - 1;
  if (below < lo) return hi;
  const std::size_t mask_below = mask_size(below);
  const std::size_t mask_at = mask_size(hi);
  const auto dist = [&](std::size_t mask) {
    return mask > m_target ? mask - m_target : m_target - mask;
  };
  return dist(mask_below) < dist(mask_at) ? below : hi;
}

}  // namespace detail

// Fill in a scheme spec's free size parameter so the generated mask has
// about m_target cells. Specs that already carry their size are returned
// unchanged.
inline json calibrate_scheme_size(json spec, const GridDims& dims, const AcquisitionModel& model,
                                  std::size_t m_target, double m1_fraction, std::uint64_t seed) {
  const std::string sampler = spec.at("sampler").get<std::string>();
  if (sampler == "iid") {
    if (!spec.contains("m") && !spec.contains("m_distinct")) spec["m_distinct"] = m_target;
    return spec;
  }
  if (sampler == "mixed") {
    if (!spec.contains("m1"))
      spec["m1"] = static_cast<std::size_t>(std::llround(m1_fraction * m_target));
    const std::size_t m1 = spec["m1"].get<std::size_t>();
    if (!spec.contains("m2") && !spec.contains("m2_distinct"))
      spec["m2_distinct"] = m_target > m1 ? m_target - m1 : 0;
    return spec;
  }
  if (sampler == "markov") {
    if (!spec.contains("steps") && !spec.contains("target_distinct"))
      spec["target_distinct"] = m_target;
    return spec;
  }
  std::string key;
  std::size_t lo = 1, cap = 1 << 22;
  if (sampler == "tsp") {
    key = "cities";
    lo = 2;
    cap = 1 << 16;  // the tour heuristics are quadratic in the city count
  } else if (sampler == "spiral") {
    key = "turns";
    cap = 1 << 14;
  } else if (sampler == "radial" || sampler == "radial_random") {
    key = "spokes";
    cap = 1 << 14;
  } else if (sampler == "lines3d") {
    key = "m_lines";
    cap = GridDims{{dims.extents[0], dims.extents[1]}}.n();
  } else {
    throw std::invalid_argument("calibrate_scheme_size: unknown sampler " + sampler);
  }
  if (!spec.contains(key))
    spec[key] = detail::search_scheme_parameter(spec, key, lo, cap, dims, model, m_target, seed);
  return spec;
}

struct BenchmarkTrial {
  std::string scheme;
  std::size_t trial = 0;
  std::size_t mask = 0;
  double psnr_db = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

struct BenchmarkRow {
  std::string scheme;
  std::size_t trials = 0;
  double mask_mean = 0.0;
  double psnr_mean = 0.0;
  double psnr_std = 0.0;
  double psnr_max = 0.0;
  std::size_t nonconverged = 0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkTrial> trial_rows;
  std::vector<json> resolved_schemes;
};

inline std::vector<double> load_phantom(const ExperimentConfig& cfg) {
  if (cfg.phantom == "builtin") return shepp_logan_phantom(cfg.dims);
  GridDims d;
  auto img = read_vdsg_real(cfg.phantom, d);
  if (!(d == cfg.dims)) throw std::invalid_argument("phantom grid does not match config dims");
  return img;
}

// Monte Carlo PSNR study: every scheme is calibrated to the same mask
// budget m = round(n/R), then `trials` masks are drawn and the phantom
// reconstructed from each. PSNR at machine precision (above 200 dB) is
// reported as the exactness sentinel +inf.
inline BenchmarkResult run_benchmark(const ExperimentConfig& cfg, std::size_t threads = 1) {
  const AcquisitionModel model = make_acquisition_model(cfg.dims, cfg.wavelet);
  const std::vector<double> reference = load_phantom(cfg);
  const std::size_t n = cfg.dims.n();
  const std::size_t m_target =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(n / cfg.R)));
  const bool full = m_target >= n;

  std::vector<std::complex<double>> image_c(n);
  for (std::size_t i = 0; i < n; ++i) image_c[i] = reference[i];
  const auto coeffs0 = wavelet_forward(cfg.dims, image_c, cfg.wavelet);

  BenchmarkResult result;
  for (std::size_t s_idx = 0; s_idx < cfg.schemes.size(); ++s_idx) {
    json spec = cfg.schemes[s_idx];
    const std::string name =
        spec.value("name", spec.at("sampler").get<std::string>() + "_" + std::to_string(s_idx));
    if (!full)
      spec = calibrate_scheme_size(spec, cfg.dims, model, m_target, cfg.m1_fraction, cfg.seed);
    result.resolved_schemes.push_back(spec);

    std::vector<BenchmarkTrial> trials(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
      const std::uint64_t trial_seed = derive_seed(cfg.seed, s_idx * cfg.trials + t);
      SamplingScheme sch;
      if (full) {
        sch.dims = cfg.dims;
        sch.seed = trial_seed;
        sch.provenance = provenance_from_name(spec.at("sampler").get<std::string>());
        sch.omega.resize(n);
        std::iota(sch.omega.begin(), sch.omega.end(), std::size_t{0});
      } else {
        sch = generate_scheme(spec, cfg.dims, model, trial_seed);
      }
      const auto y = measure_coeffs(model, sch.omega, coeffs0);
      const auto res = douglas_rachford(model, sch.omega, y, cfg.recon);
      std::vector<double> recon(n);
      for (std::size_t i = 0; i < n; ++i) recon[i] = res.image[i].real();
      double db = psnr(reference, recon);
      if (db > 200.0) db = std::numeric_limits<double>::infinity();
      trials[t] = {name, t, sch.omega.size(), db, res.iterations, res.converged};
    });

    BenchmarkRow row;
    row.scheme = name;
    row.trials = cfg.trials;
    row.psnr_max = -std::numeric_limits<double>::infinity();
    double finite_sum = 0.0, finite_sq = 0.0;
    std::size_t finite_cnt = 0;
    bool any_inf = false;
    for (const auto& tr : trials) {
      row.mask_mean += static_cast<double>(tr.mask) / static_cast<double>(cfg.trials);
      row.psnr_max = std::max(row.psnr_max, tr.psnr_db);
      if (!tr.converged) ++row.nonconverged;
      if (std::isinf(tr.psnr_db)) {
        any_inf = true;
      } else {
        finite_sum += tr.psnr_db;
        finite_sq += tr.psnr_db * tr.psnr_db;
        ++finite_cnt;
      }
      result.trial_rows.push_back(tr);
    }
    if (any_inf && finite_cnt == 0) {
      row.psnr_mean = std::numeric_limits<double>::infinity();
      row.psnr_std = 0.0;
    } else if (any_inf) {
      row.psnr_mean = std::numeric_limits<double>::infinity();
      row.psnr_std = 0.0;  // dispersion undefined with the sentinel present
    } else {
      row.psnr_mean = finite_sum / static_cast<double>(finite_cnt);
      row.psnr_std =
          finite_cnt > 1
              ? std::sqrt(std::max(0.0, (finite_sq - finite_sum * finite_sum / finite_cnt) /
                                            static_cast<double>(finite_cnt - 1)))
              : 0.0;
    }
    result.rows.push_back(row);
  }
  return result;
}

inline json benchmark_to_json(const BenchmarkResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"scheme", row.scheme},     {"trials", row.trials},
            {"mask_mean", row.mask_mean}, {"psnr_std", row.psnr_std},
            {"nonconverged", row.nonconverged}};
    jr["psnr_mean"] = std::isinf(row.psnr_mean) ? json("inf") : json(row.psnr_mean);
    jr["psnr_max"] = std::isinf(row.psnr_max) ? json("inf") : json(row.psnr_max);
    rows.push_back(jr);
  }
  return json{{"rows", rows}};
}

// ---------------------------------------------------------------------
// verification suites (cmd_verify)

namespace detail {

inline DensityGrid verify_density(const json& cfg, const GridDims& dims,
                                  const AcquisitionModel* model) {
  return density_from_json(cfg.contains("density") ? cfg["density"] : json(), dims, model);
}

inline GridDims dims_from(const json& cfg) {
  GridDims dims;
  dims.extents = cfg.at("dims").get<std::vector<std::uint32_t>>();
  validate_grid(dims);
  return dims;
}

inline json verify_coherence(const json& cfg, std::uint64_t seed) {
  const GridDims dims = dims_from(cfg);
  const AcquisitionModel model =
      make_acquisition_model(dims, wavelet_from_json(cfg.contains("wavelet") ? cfg["wavelet"] : json()));
  const DensityGrid pi = optimal_density(model);
  const double k_pi = K_value(model, pi);
  const double k_star = K_star(model);
  const double identity_residual = std::abs(k_pi - k_star);
  const std::size_t draws = cfg.value("random_q", std::size_t{1000});
  Rng rng(seed);
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < draws; ++t) {
    std::vector<double> raw(dims.n());
    for (auto& v : raw) v = uniform01(rng) + 1e-12;
    const DensityGrid q = normalize_density(dims, std::move(raw));
    const double margin = K_value(model, q) - k_pi;
    min_margin = std::min(min_margin, margin);
    if (margin < -1e-12) ++violations;
  }
  const bool pass = identity_residual <= 1e-12 && violations == 0;
  return json{{"check", "coherence"},
              {"pass", pass},
              {"K_pi", k_pi},
              {"K_star", k_star},
              {"identity_residual", identity_residual},
              {"random_q", draws},
              {"violations", violations},
              {"min_margin", min_margin}};
}

inline json verify_pure_fourier(const json& cfg) {
  const GridDims dims = dims_from(cfg);
  const AcquisitionModel model = make_acquisition_model(dims, WaveletSpec::identity());
  const DensityGrid pi = optimal_density(model);
  const double unif = 1.0 / static_cast<double>(dims.n());
  double max_dev = 0.0;
  for (double v : pi.mass) max_dev = std::max(max_dev, std::abs(v - unif));
  const double k_dev = std::abs(K_value(model, pi) - 1.0);
  const double k_star_dev = std::abs(K_star(model) - 1.0);
  const bool pass = max_dev <= 1e-13 * unif * dims.n() && k_dev <= 1e-13 && k_star_dev <= 1e-13;
  return json{{"check", "pure_fourier"},
              {"pass", pass},
              {"pi_max_deviation", max_dev},
              {"K_deviation", k_dev},
              {"K_star_deviation", k_star_dev}};
}

inline json verify_kernel(const json& cfg) {
  const GridDims dims = dims_from(cfg);
  const DensityGrid p = density_from_json(
      cfg.contains("density") ? cfg["density"] : json{{"kind", "polynomial"}, {"exponent", 2.0}},
      dims, nullptr);
  TransitionKernel k = metropolis_kernel(p, {.periodic = cfg.value("periodic", false)});
  const double alpha = cfg.value("alpha", 0.0);
  if (alpha > 0.0) k = mix_with_jumps(k, p, alpha);
  const double rs = row_sum_residual(k);
  const double db = detailed_balance_residual(k);
  const double st = stationarity_residual(k);
  const bool pass = rs < 1e-12 && db < 1e-12 && st < 1e-12;
  return json{{"check", "kernel"},
              {"pass", pass},
              {"row_sum_residual", rs},
              {"detailed_balance_residual", db},
              {"stationarity_residual", st}};
}

inline json verify_chain_tv(const json& cfg, std::uint64_t seed) {
  const GridDims dims = dims_from(cfg);
  const DensityGrid p = density_from_json(
      cfg.contains("density") ? cfg["density"] : json{{"kind", "polynomial"}, {"exponent", 2.0}},
      dims, nullptr);
  TransitionKernel k = metropolis_kernel(p, {.periodic = false});
  const double alpha = cfg.value("alpha", 0.0);
  if (alpha > 0.0) k = mix_with_jumps(k, p, alpha);
  const std::size_t steps = cfg.value("steps", std::size_t{100000});
  const double target = cfg.value("target_tv", 0.05);
  const auto scheme = run_chain(k, ChainStop::steps(steps), seed);
  const double tv = tv_distance(empirical_measure(scheme.draw_log, dims).measure(), p);
  return json{{"check", "chain_tv"}, {"pass", tv < target}, {"steps", steps},
              {"tv", tv},           {"target_tv", target}};
}

inline json verify_cheeger(const json& cfg) {
  json reports = json::array();
  bool pass = true;
  for (const auto& ext : cfg.at("extents_list")) {
    GridDims dims;
    dims.extents = ext.get<std::vector<std::uint32_t>>();
    const CheegerReport r = verify_cheeger_bound(dims);
    pass = pass && r.holds;
    json jr = to_json(r);
    jr["dims"] = dims.extents;
    reports.push_back(jr);
  }
  return json{{"check", "cheeger"}, {"pass", pass}, {"reports", reports}};
}

inline json verify_weyl(const json& cfg) {
  const GridDims dims = dims_from(cfg);
  const DensityGrid p = density_from_json(
      cfg.contains("density") ? cfg["density"] : json{{"kind", "polynomial"}, {"exponent", 2.0}},
      dims, nullptr);
  const TransitionKernel base = metropolis_kernel(p, {.periodic = false});
  json reports = json::array();
  bool pass = true;
  for (double alpha : cfg.at("alphas").get<std::vector<double>>()) {
    const SpectralReport r = spectral_gap(mix_with_jumps(base, p, alpha));
    const bool holds = r.gap >= alpha - 1e-12;
    pass = pass && holds;
    json jr = to_json(r);
    jr["alpha"] = alpha;
    jr["holds"] = holds;
    reports.push_back(jr);
  }
  return json{{"check", "weyl"}, {"pass", pass}, {"reports", reports}};
}

inline json verify_certificate(const json& cfg, std::uint64_t seed) {
  const GridDims dims = dims_from(cfg);
  const AcquisitionModel model =
      make_acquisition_model(dims, wavelet_from_json(cfg.contains("wavelet") ? cfg["wavelet"] : json()));
  const std::size_t s_max = cfg.value("s_max", std::size_t{64});
  json out{{"check", "certificate"}};
  bool pass = true;

  // full deterministic sweep with uniform density: W is the Gram of the
  // whole frame, the identity up to roundoff
  const DensityGrid unif = uniform_density(dims);
  std::vector<std::size_t> sweep(dims.n());
  std::iota(sweep.begin(), sweep.end(), std::size_t{0});
  const CertificateReport full = juditsky_certificate(model, unif, sweep, s_max);
  out["full_sweep"] = to_json(full);
  pass = pass && full.infnorm_residual <= 1e-12;

  const DensityGrid p = verify_density(cfg, dims, &model);
  json rows = json::array();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::uint64_t stream = 1;
  for (std::size_t m : cfg.at("m_list").get<std::vector<std::size_t>>()) {
    const auto scheme = draw_iid(p, m, derive_seed(seed, stream++));
    const CertificateReport r = juditsky_certificate(model, p, scheme.draw_log, s_max);
    json jr = to_json(r);
    jr["m"] = m;
    rows.push_back(jr);
    if (r.infnorm_residual > prev) decreasing = false;
    prev = r.infnorm_residual;
  }
  out["iid_rows"] = rows;
  out["residual_decreasing"] = decreasing;
  out["pass"] = pass && decreasing;
  return out;
}

inline json verify_tsp_limit(const json& cfg, std::uint64_t seed) {
  const GridDims dims = dims_from(cfg);
  const DensityGrid p = density_from_json(
      cfg.contains("density") ? cfg["density"] : json{{"kind", "polynomial"}, {"exponent", 2.0}},
      dims, nullptr);
  TspEffort effort;
  effort.max_passes = cfg.value("max_passes", effort.max_passes);
  const auto city_counts = cfg.at("city_counts").get<std::vector<std::size_t>>();
  const std::size_t trials = cfg.value("trials", std::size_t{20});
  const TspLimitReport rep = verify_limit_density(p, city_counts, trials, seed, effort);
  const double d = static_cast<double>(dims.rank());
  const double want_slope = (d - 1.0) / d;
  const auto& last = rep.rows.back();
  const bool pass = last.corrected_tv < cfg.value("target_tv", 0.1) &&
                    std::abs(last.uncorrected_slope - want_slope) <= cfg.value("slope_tol", 0.05);
  json out = to_json(rep);
  out["check"] = "tsp_limit";
  out["pass"] = pass;
  out["expected_slope"] = want_slope;
  return out;
}

inline json verify_bhh(const json& cfg, std::uint64_t seed) {
  const auto city_counts = cfg.at("city_counts").get<std::vector<std::size_t>>();
  if (city_counts.size() < 2) throw std::invalid_argument("bhh check needs >= 2 city counts");
  std::vector<std::size_t> trials;
  if (cfg.contains("trials_per")) {
    trials = cfg["trials_per"].get<std::vector<std::size_t>>();
    if (trials.size() != city_counts.size())
      throw std::invalid_argument("bhh check: trials_per length mismatch");
  } else {
    trials.assign(city_counts.size(), cfg.value("trials", std::size_t{4}));
  }
  json rows = json::array();
  std::vector<double> means;
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < city_counts.size(); ++i) {
    const BhhEstimate est =
        estimate_bhh_constant(city_counts[i], trials[i], derive_seed(seed, stream++));
    means.push_back(est.mean);
    rows.push_back(to_json(est));
  }
  const double spread = std::abs(means.back() - means.front()) / means.back();
  const bool in_band = means.back() > 0.6 && means.back() < 0.8;
  return json{{"check", "bhh"},
              {"pass", spread < cfg.value("max_spread", 0.1) && in_band},
              {"rows", rows},
              {"relative_spread", spread},
              {"in_band", in_band}};
}

inline json verify_spiral(const json& cfg) {
  SpiralSpec sp;
  sp.r0 = cfg.value("r0", sp.r0);
  sp.r1 = cfg.value("r1", sp.r1);
  sp.vertices_per_turn = cfg.value("vertices_per_turn", sp.vertices_per_turn);
  const auto turns_list = cfg.at("turns_list").get<std::vector<std::size_t>>();
  const std::size_t bins = cfg.value("bins", std::size_t{32});
  json rows = json::array();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  double last_tv = 1.0;
  for (std::size_t turns : turns_list) {
    sp.turns = turns;
    const auto occ = radial_occupation(spiral_trajectory(sp), sp.r0, sp.r1, bins);
    const auto want = spiral_radial_prediction(sp, bins);
    double tv = 0.0;
    for (std::size_t b = 0; b < bins; ++b) tv += std::abs(occ[b] - want[b]);
    tv *= 0.5;
    rows.push_back(json{{"turns", turns}, {"tv", tv}});
    if (tv > prev) decreasing = false;
    prev = tv;
    last_tv = tv;
  }
  const bool pass = last_tv < cfg.value("target_tv", 0.05) && decreasing;
  return json{{"check", "spiral"}, {"pass", pass}, {"rows", rows}, {"decreasing", decreasing}};
}

inline json verify_bounds(const json& cfg) {
  const GridDims dims = dims_from(cfg);
  const AcquisitionModel model =
      make_acquisition_model(dims, wavelet_from_json(cfg.contains("wavelet") ? cfg["wavelet"] : json()));
  const DensityGrid pi = optimal_density(model);
  const double K = K_value(model, pi);
  const double s = cfg.value("s", 10.0);
  const double eta = cfg.value("eta", 0.1);
  const std::size_t n = dims.n();
  json out{{"check", "bounds"}, {"pass", true}, {"K", K}};
  out["iid"] = to_json(bound_iid(K, s, eta, n));
  const std::size_t m1 = cfg.value("m1", std::size_t{0});
  const auto omega1 = deterministic_set(model, m1);
  const DensityGrid p1 = m1 > 0 ? restrict_and_renormalize(pi, omega1) : pi;
  const double K1 = m1 > 0 ? K_value_excluding(model, p1, omega1) : K;
  out["mixed"] = to_json(bound_mixed(K1, static_cast<double>(m1), s, eta, n));
  out["markov"] = to_json(bound_markov(K, s, eta, cfg.value("eps", 0.1), n));
  return out;
}

inline json verify_vds_convergence(const json& cfg, std::uint64_t seed) {
  const GridDims dims = dims_from(cfg);
  const DensityGrid p = density_from_json(
      cfg.contains("density") ? cfg["density"] : json{{"kind", "polynomial"}, {"exponent", 2.0}},
      dims, nullptr);
  const auto N_list = cfg.at("N_list").get<std::vector<std::size_t>>();
  const std::size_t trials = cfg.value("trials", std::size_t{8});
  const std::string process = cfg.value("process", "iid");
  ConvergenceReport rep;
  if (process == "iid") {
    rep = vds_convergence_report(
        [&](std::size_t N, std::uint64_t s) { return draw_iid(p, N, s).draw_log; }, p, N_list,
        trials, seed);
  } else if (process == "markov") {
    TransitionKernel k = metropolis_kernel(p, {.periodic = false});
    const double alpha = cfg.value("alpha", 0.0);
    if (alpha > 0.0) k = mix_with_jumps(k, p, alpha);
    rep = vds_convergence_report(
        [&](std::size_t N, std::uint64_t s) { return run_chain(k, ChainStop::steps(N), s).draw_log; },
        p, N_list, trials, seed);
  } else {
    throw std::invalid_argument("vds_convergence: unknown process " + process);
  }
  json out = to_json(rep);
  out["check"] = "vds_convergence";
  out["process"] = process;
  out["pass"] = rep.tv_decreasing;
  return out;
}

}  // namespace detail

// Dispatch a verification suite described by {"check": ..., ...}.
inline json run_verify(const json& cfg, std::uint64_t seed) {
  const std::string check = cfg.at("check").get<std::string>();
  if (check == "coherence") return detail::verify_coherence(cfg, seed);
  if (check == "pure_fourier") return detail::verify_pure_fourier(cfg);
  if (check == "kernel") return detail::verify_kernel(cfg);
  if (check == "chain_tv") return detail::verify_chain_tv(cfg, seed);
  if (check == "cheeger") return detail::verify_cheeger(cfg);
  if (check == "weyl") return detail::verify_weyl(cfg);
  if (check == "certificate") return detail::verify_certificate(cfg, seed);
  if (check == "tsp_limit") return detail::verify_tsp_limit(cfg, seed);
  if (check == "bhh") return detail::verify_bhh(cfg, seed);
  if (check == "spiral") return detail::verify_spiral(cfg);
  if (check == "bounds") return detail::verify_bounds(cfg);
  if (check == "vds_convergence") return detail::verify_vds_convergence(cfg, seed);
  throw std::invalid_argument("run_verify: unknown check " + check);
}

}  // namespace vds
