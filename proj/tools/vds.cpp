// Command-line front end: scheme generation, verification suites,
// reconstruction, and Monte Carlo benchmarks, driven by JSON configs.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vds/vds.hpp"

namespace fs = std::filesystem;
using vds::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "master seed (overrides config)")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  cmd->add_option("--threads", opts.threads, "worker threads for independent trials");
}

// Resolve config + flag precedence: flags win over config keys.
json load_config(const CommonOpts& opts) {
  json cfg = vds::load_json_file(opts.config_path);
  if (opts.seed_given) cfg["seed"] = opts.seed;
  if (!opts.out_dir.empty()) cfg["out"] = opts.out_dir;
  return cfg;
}

fs::path prepare_out_dir(const json& cfg) {
  fs::path dir = cfg.value("out", ".");
  fs::create_directories(dir);
  return dir;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> load_phantom_arg(const std::string& source, const vds::GridDims& dims) {
  if (source == "builtin") return vds::shepp_logan_phantom(dims);
  vds::GridDims file_dims;
  auto img = vds::read_vdsg_real(source, file_dims);
  if (!(file_dims == dims)) throw std::invalid_argument("phantom grid does not match config dims");
  return img;
}

int cmd_density(const CommonOpts& opts) {
  const json cfg = load_config(opts);
  vds::GridDims dims;
  dims.extents = cfg.at("dims").get<std::vector<std::uint32_t>>();
  vds::validate_acquisition_grid(dims);
  const vds::AcquisitionModel model = vds::make_acquisition_model(
      dims, vds::wavelet_from_json(cfg.contains("wavelet") ? cfg["wavelet"] : json()));
  const vds::DensityGrid p = vds::density_from_json(
      cfg.contains("density") ? cfg["density"] : json(), dims, &model);

  const fs::path dir = prepare_out_dir(cfg);
  vds::write_vdsg((dir / "density.vdsg").string(), p.dims, p.mass);
  json meta{{"dims", dims.extents},
            {"wavelet", vds::wavelet_to_json(model.wavelet)},
            {"K", vds::K_value(model, p)},
            {"K_star", vds::K_star(model)}};
  if (cfg.contains("density")) meta["density"] = cfg["density"];
  write_json_file(dir / "density.json", meta);
  std::cout << "wrote " << (dir / "density.vdsg").string() << " (K = " << meta["K"]
            << ", K* = " << meta["K_star"] << ")\n";
  return 0;
}

int cmd_scheme(const CommonOpts& opts) {
  const json cfg = load_config(opts);
  vds::GridDims dims;
  dims.extents = cfg.at("dims").get<std::vector<std::uint32_t>>();
  vds::validate_acquisition_grid(dims);
  const vds::AcquisitionModel model = vds::make_acquisition_model(
      dims, vds::wavelet_from_json(cfg.contains("wavelet") ? cfg["wavelet"] : json()));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  const json spec = cfg.at("scheme");

  vds::Trajectory traj;
  const vds::SamplingScheme scheme = vds::generate_scheme(spec, dims, model, seed, &traj);

  const fs::path dir = prepare_out_dir(cfg);
  vds::write_scheme_json(scheme, (dir / "scheme.json").string());
  if (dims.rank() == 2) vds::write_mask_pbm(dims, scheme.omega, (dir / "mask.pbm").string());
  if (!traj.vertices.empty())
    vds::write_trajectory_csv(traj, (dir / "trajectory.csv").string());
  if (cfg.value("export_kernel", false)) {
    const vds::DensityGrid p = vds::density_from_json(
        spec.contains("density") ? spec["density"] : json(), dims, &model);
    vds::TransitionKernel kernel = vds::metropolis_kernel(p, {.periodic = false});
    const double alpha = spec.value("alpha", 0.0);
    if (alpha > 0.0) kernel = vds::mix_with_jumps(kernel, p, alpha);
    vds::export_kernel_coo(kernel, (dir / "kernel.txt").string());
  }
  std::cout << "wrote " << (dir / "scheme.json").string() << " (|omega| = " << scheme.omega.size()
            << ", draws = " << scheme.draw_log.size() << ")\n";
  return 0;
}

int cmd_reconstruct(const CommonOpts& opts) {
  const json cfg = load_config(opts);
  vds::GridDims dims;
  dims.extents = cfg.at("dims").get<std::vector<std::uint32_t>>();
  vds::validate_acquisition_grid(dims);
  const vds::AcquisitionModel model = vds::make_acquisition_model(
      dims, vds::wavelet_from_json(cfg.contains("wavelet") ? cfg["wavelet"] : json()));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});

  const std::vector<double> reference = load_phantom_arg(cfg.value("phantom", "builtin"), dims);
  std::vector<std::complex<double>> image_c(reference.begin(), reference.end());
  const auto coeffs0 = vds::wavelet_forward(dims, image_c, model.wavelet);

  vds::SamplingScheme scheme;
  if (cfg.contains("scheme_file")) {
    scheme = vds::read_scheme_json(cfg["scheme_file"].get<std::string>());
    if (!(scheme.dims == dims)) throw std::invalid_argument("scheme grid mismatch");
  } else {
    scheme = vds::generate_scheme(cfg.at("scheme"), dims, model, seed);
  }
  const auto y = vds::measure_coeffs(model, scheme.omega, coeffs0);
  const vds::ReconstructionConfig rc = vds::reconstruction_from_json(
      cfg.contains("reconstruction") ? cfg["reconstruction"] : json());
  const vds::ReconstructionResult res = vds::douglas_rachford(model, scheme.omega, y, rc);

  std::vector<double> recon(res.image.size());
  for (std::size_t i = 0; i < recon.size(); ++i) recon[i] = res.image[i].real();
  const double db = vds::psnr(reference, recon);

  const fs::path dir = prepare_out_dir(cfg);
  vds::write_vdsg((dir / "reconstruction.vdsg").string(), dims, recon);
  json metrics = vds::to_json(res);
  metrics["psnr_db"] = std::isinf(db) ? json("inf") : json(db);
  metrics["mask"] = scheme.omega.size();
  write_json_file(dir / "metrics.json", metrics);
  std::cout << "psnr = " << db << " dB after " << res.iterations << " iterations"
            << (res.converged ? "" : " (not converged)") << "\n";
  return res.converged ? 0 : 2;
}

int cmd_verify(const CommonOpts& opts) {
  const json cfg = load_config(opts);
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  std::vector<json> checks;
  if (cfg.contains("checks"))
    for (const auto& c : cfg["checks"]) checks.push_back(c);
  else
    checks.push_back(cfg);

  json reports = json::array();
  bool all_pass = true;
  for (const auto& check : checks) {
    const json rep = vds::run_verify(check, seed);
    const bool pass = rep.value("pass", false);
    all_pass = all_pass && pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << rep.value("check", "?") << "\n";
    reports.push_back(rep);
  }
  const fs::path dir = prepare_out_dir(cfg);
  write_json_file(dir / "verify.json", json{{"reports", reports}, {"pass", all_pass}});

  // convergence tables additionally as CSV for plotting
  for (const auto& rep : reports) {
    if (rep.value("check", "") != "vds_convergence") continue;
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : rep.at("rows"))
      rows.push_back({std::to_string(row.at("N").get<std::size_t>()),
                      vds::format_double(row.at("mean_tv").get<double>()),
                      vds::format_double(row.at("std_tv").get<double>())});
    vds::write_csv((dir / "convergence.csv").string(), {"N", "mean_tv", "std_tv"}, rows);
  }
  return all_pass ? 0 : 2;
}

int cmd_benchmark(const CommonOpts& opts) {
  const json cfg = load_config(opts);
  const vds::ExperimentConfig exp = vds::experiment_from_json(cfg);
  const vds::BenchmarkResult result = vds::run_benchmark(exp, opts.threads);

  const fs::path dir = prepare_out_dir(cfg);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : result.rows)
    rows.push_back({r.scheme, std::to_string(r.trials), vds::format_double(r.mask_mean),
                    vds::format_double(r.psnr_mean), vds::format_double(r.psnr_std),
                    vds::format_double(r.psnr_max), std::to_string(r.nonconverged)});
  vds::write_csv((dir / "benchmark.csv").string(),
                 {"scheme", "trials", "mask_mean", "psnr_mean", "psnr_std", "psnr_max",
                  "nonconverged"},
                 rows);

  std::vector<std::vector<std::string>> trial_rows;
  for (const auto& t : result.trial_rows)
    trial_rows.push_back({t.scheme, std::to_string(t.trial), std::to_string(t.mask),
                          vds::format_double(t.psnr_db), std::to_string(t.iterations),
                          t.converged ? "1" : "0"});
  vds::write_csv((dir / "benchmark_trials.csv").string(),
                 {"scheme", "trial", "mask", "psnr_db", "iterations", "converged"}, trial_rows);

  json meta = vds::benchmark_to_json(result);
  meta["resolved_schemes"] = result.resolved_schemes;
  write_json_file(dir / "benchmark.json", meta);

  for (const auto& r : result.rows)
    std::cout << r.scheme << ": psnr mean " << r.psnr_mean << " dB (std " << r.psnr_std
              << ", max " << r.psnr_max << ", mask " << r.mask_mean << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variable-density sampling schemes, verification, and reconstruction"};
  app.require_subcommand(1);

  CommonOpts density_opts, scheme_opts, reconstruct_opts, verify_opts, benchmark_opts;
  auto* density = app.add_subcommand("density", "compute and export a sampling density");
  add_common(density, density_opts);
  auto* scheme = app.add_subcommand("scheme", "generate a sampling scheme");
  add_common(scheme, scheme_opts);
  auto* reconstruct = app.add_subcommand("reconstruct", "l1 reconstruction from a scheme");
  add_common(reconstruct, reconstruct_opts);
  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, verify_opts);
  auto* benchmark = app.add_subcommand("benchmark", "Monte Carlo reconstruction benchmark");
  add_common(benchmark, benchmark_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (density->parsed()) return cmd_density(density_opts);
    if (scheme->parsed()) return cmd_scheme(scheme_opts);
    if (reconstruct->parsed()) return cmd_reconstruct(reconstruct_opts);
    if (verify->parsed()) return cmd_verify(verify_opts);
    if (benchmark->parsed()) return cmd_benchmark(benchmark_opts);
  } catch (const vds::ChainBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
