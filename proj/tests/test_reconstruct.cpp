#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "vds/acquisition.hpp"
#include "vds/density.hpp"
#include "vds/phantom.hpp"
#include "vds/reconstruct.hpp"
#include "vds/rng.hpp"
#include "vds/sampler_iid.hpp"

using namespace vds;
using cplx = std::complex<double>;

namespace {

double rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += std::norm(got[i] - want[i]);
    den += std::norm(want[i]);
  }
  return std::sqrt(num / den);
}

double l2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("soft threshold minimizes its proximal objective") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const cplx z{4.0 * (uniform01(rng) - 0.5), 4.0 * (uniform01(rng) - 0.5)};
    const double gamma = 0.01 + 2.0 * uniform01(rng);
    const cplx u = soft_threshold(z, gamma);
    const double fu = gamma * std::abs(u) + 0.5 * std::norm(u - z);
    // no nearby candidate does better
    for (int k = 0; k < 40; ++k) {
      const cplx c = u + cplx{0.3 * (uniform01(rng) - 0.5), 0.3 * (uniform01(rng) - 0.5)};
      const double fc = gamma * std::abs(c) + 0.5 * std::norm(c - z);
      CHECK(fu <= fc + 1e-12);
    }
  }
  // exact zeroing below the threshold
  CHECK(soft_threshold(cplx{0.3, 0.0}, 0.5) == cplx{0.0, 0.0});
  const cplx shrunk = soft_threshold(cplx{0.0, -2.0}, 0.5);
  CHECK(shrunk.real() == Catch::Approx(0.0).margin(1e-15));
  CHECK(shrunk.imag() == Catch::Approx(-1.5).margin(1e-15));
}

TEST_CASE("affine projection restores feasibility exactly once") {
  const GridDims dims{{16, 16}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(2));
  const auto p = optimal_density(model);
  const auto scheme = draw_iid_distinct(p, 100, 3);

  const auto z0 = sparse_coeffs(dims.n(), 12, 5);
  const auto y = measure_coeffs(model, scheme.omega, z0);
  REQUIRE(y.size() == 100);

  Rng rng(9);
  std::vector<cplx> w(dims.n());
  for (auto& v : w) v = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};

  const auto pw = project_affine(model, scheme.omega, y, w);
  const auto yy = measure_coeffs(model, scheme.omega, pw);
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(std::abs(yy[k] - y[k]) < 1e-12);

  // idempotent
  const auto pw2 = project_affine(model, scheme.omega, y, pw);
  CHECK(rel_err(pw2, pw) < 1e-12);

  // non-expansive
  std::vector<cplx> w2(dims.n());
  for (auto& v : w2) v = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
  const auto pw3 = project_affine(model, scheme.omega, y, w2);
  std::vector<cplx> dw(dims.n()), dpw(dims.n());
  for (std::size_t i = 0; i < dims.n(); ++i) {
    dw[i] = w[i] - w2[i];
    dpw[i] = pw[i] - pw3[i];
  }
  CHECK(l2(dpw) <= l2(dw) + 1e-12);
}

TEST_CASE("measurement sets are validated") {
  const GridDims dims{{8, 8}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(1));
  const std::vector<cplx> z(dims.n(), cplx{1.0, 0.0});
  CHECK_THROWS_AS(measure_coeffs(model, {}, z), std::invalid_argument);
  CHECK_THROWS_AS(measure_coeffs(model, {1, 1}, z), std::invalid_argument);
  CHECK_THROWS_AS(measure_coeffs(model, {64}, z), std::out_of_range);
}

TEST_CASE("douglas rachford recovers a one-sparse vector from half the rows") {
  const GridDims dims{{16, 16}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(2));
  const auto p = optimal_density(model);
  const auto scheme = draw_iid_distinct(p, 128, 7);

  std::vector<cplx> z0(dims.n(), cplx{0.0, 0.0});
  z0[37] = {1.0, 0.0};
  const auto y = measure_coeffs(model, scheme.omega, z0);

  const auto res = douglas_rachford(model, scheme.omega, y, {});
  CHECK(res.converged);
  CHECK(rel_err(res.coeffs, z0) < 1e-6);
  CHECK(res.feasibility < 1e-8);
  CHECK(res.fp_residual < 1e-8);

  double l1 = 0.0;
  for (const auto& v : res.coeffs) l1 += std::abs(v);
  CHECK(res.l1_objective == Catch::Approx(l1).margin(1e-12));
  CHECK(res.l1_objective == Catch::Approx(1.0).epsilon(1e-5));

  // the reported image is the wavelet synthesis of the coefficients
  const auto img = wavelet_inverse(dims, res.coeffs, model.wavelet);
  CHECK(rel_err(res.image, img) < 1e-14);
}

TEST_CASE("recovery error falls as the mask grows") {
  const GridDims dims{{32, 32}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(3));
  const auto p = optimal_density(model);
  const auto z0 = sparse_coeffs(dims.n(), 10, 13);

  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m : {102, 256, 512}) {
    const auto scheme = draw_iid_distinct(p, m, 17);
    const auto y = measure_coeffs(model, scheme.omega, z0);
    ReconstructionConfig cfg;
    cfg.max_iter = 30000;
    const auto res = douglas_rachford(model, scheme.omega, y, cfg);
    const double err = rel_err(res.coeffs, z0);
    CHECK(err <= prev + 0.05);
    prev = err;
  }
  CHECK(prev < 1e-4);  // s = 10 from 512 of 1024 rows recovers exactly
}

TEST_CASE("iteration cap reports non-convergence without breaking results") {
  const GridDims dims{{16, 16}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(2));
  const auto p = optimal_density(model);
  const auto scheme = draw_iid_distinct(p, 64, 19);
  const auto z0 = sparse_coeffs(dims.n(), 20, 23);
  const auto y = measure_coeffs(model, scheme.omega, z0);

  ReconstructionConfig cfg;
  cfg.max_iter = 5;
  const auto res = douglas_rachford(model, scheme.omega, y, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 5);
  CHECK(res.coeffs.size() == dims.n());
  CHECK(res.feasibility < 1e-8);  // projection output is always feasible
}

TEST_CASE("reconstruction config is validated") {
  const GridDims dims{{8, 8}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(1));
  const std::vector<std::size_t> omega = {1, 2, 3};
  const std::vector<cplx> y(3, cplx{1.0, 0.0});
  ReconstructionConfig bad;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(douglas_rachford(model, omega, y, bad), std::invalid_argument);
  bad = {};
  bad.lambda = 2.5;
  CHECK_THROWS_AS(douglas_rachford(model, omega, y, bad), std::invalid_argument);
  bad = {};
  bad.max_iter = 0;
  CHECK_THROWS_AS(douglas_rachford(model, omega, y, bad), std::invalid_argument);

  const std::vector<cplx> short_y(2, cplx{0.0, 0.0});
  CHECK_THROWS_AS(douglas_rachford(model, omega, short_y, {}), std::invalid_argument);
}

TEST_CASE("psnr formula on explicit cases") {
  const std::vector<double> ref = {1.0, 0.0};
  CHECK(std::isinf(psnr(ref, ref)));
  const std::vector<double> rec = {0.9, 0.1};
  CHECK(psnr(ref, rec) == Catch::Approx(20.0).margin(1e-12));

  // complex overload measures modulus of the error
  const std::vector<cplx> cref = {{1.0, 0.0}, {0.0, 0.0}};
  const std::vector<cplx> crec = {{0.9, 0.0}, {0.0, 0.1}};
  CHECK(psnr(cref, crec) == Catch::Approx(20.0).margin(1e-12));

  const std::vector<double> zeros = {0.0, 0.0};
  CHECK_THROWS_AS(psnr(zeros, rec), std::domain_error);

  const std::vector<double> longer = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(psnr(ref, longer), std::invalid_argument);
}

TEST_CASE("phantom pixels match the ellipse table") {
  const GridDims dims{{64, 64}};
  const auto img = shepp_logan_phantom(dims);
  REQUIRE(img.size() == 64 * 64);

  // corners lie outside every ellipse
  CHECK(img[0] == 0.0);
  CHECK(img[63] == 0.0);
  CHECK(img[64 * 63] == 0.0);

  // center: head (1.0) plus brain (-0.8) = 0.2
  const auto at = [&](double x, double y) {
    const std::size_t c = static_cast<std::size_t>((x + 1.0) / 2.0 * 64.0);
    const std::size_t r = static_cast<std::size_t>((y + 1.0) / 2.0 * 64.0);
    return img[r * 64 + c];
  };
  CHECK(at(0.0, 0.0) == Catch::Approx(0.2).margin(1e-12));
  // top of the skull: inside the outer ellipse only
  CHECK(at(0.0, 0.9) == Catch::Approx(1.0).margin(1e-12));
  // inside the upper ventricle blob (0, 0.35): 1 - 0.8 + 0.1
  CHECK(at(0.0, 0.35) == Catch::Approx(0.3).margin(1e-12));

  double lo = 1e300, hi = -1e300;
  for (double v : img) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= -1e-12);  // gray levels never go negative
  CHECK(hi <= 1.0 + 1e-12);

  CHECK_THROWS_AS(shepp_logan_phantom(GridDims{{8}}), std::invalid_argument);
}

TEST_CASE("sparse coefficient generator honors its contract") {
  const auto z = sparse_coeffs(256, 24, 31);
  std::size_t nz = 0;
  for (const auto& v : z) {
    if (v != cplx{0.0, 0.0}) {
      ++nz;
      CHECK(std::abs(std::abs(v.real()) - 1.0) < 1e-15);
      CHECK(v.imag() == 0.0);
    }
  }
  CHECK(nz == 24);
  CHECK(sparse_coeffs(256, 24, 31) == z);
  CHECK(sparse_coeffs(256, 24, 32) != z);
  CHECK_THROWS_AS(sparse_coeffs(8, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sparse_coeffs(8, 9, 1), std::invalid_argument);
}
