#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "vds/acquisition.hpp"
#include "vds/density.hpp"
#include "vds/empirical.hpp"
#include "vds/markov.hpp"
#include "vds/rng.hpp"

using namespace vds;

namespace {

DensityGrid random_density(const GridDims& dims, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> raw(dims.n());
  for (auto& v : raw) v = 0.05 + uniform01(rng);
  return normalize_density(dims, std::move(raw));
}

}  // namespace

TEST_CASE("two-state metropolis kernel matches the hand computation") {
  DensityGrid p{GridDims{{2}}, {1.0 / 3.0, 2.0 / 3.0}};
  const auto k = metropolis_kernel(p, {.periodic = false});
  // flow out of the light state is always accepted, out of the heavy one
  // with probability p0/p1 = 1/2
  CHECK(kernel_entry(k, 0, 1) == Catch::Approx(1.0).margin(1e-15));
  CHECK(kernel_entry(k, 0, 0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(kernel_entry(k, 1, 0) == Catch::Approx(0.5).margin(1e-15));
  CHECK(kernel_entry(k, 1, 1) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("metropolis kernels satisfy exact balance on random densities") {
  for (bool periodic : {false, true}) {
    const GridDims dims{{4, 6}};
    const auto p = random_density(dims, periodic ? 2 : 1);
    const auto k = metropolis_kernel(p, {.periodic = periodic});
    CHECK(row_sum_residual(k) < 1e-14);
    CHECK(detailed_balance_residual(k) < 1e-15);
    CHECK(stationarity_residual(k) < 1e-14);
  }
}

TEST_CASE("periodic duplicate neighbors collapse to one slot") {
  // width-2 periodic axis: left and right neighbor coincide
  const GridDims dims{{2, 4}};
  const auto p = random_density(dims, 3);
  const auto k = metropolis_kernel(p, {.periodic = true});
  CHECK(row_sum_residual(k) < 1e-14);
  CHECK(detailed_balance_residual(k) < 1e-15);
  for (std::size_t i = 0; i < k.n; ++i) {
    std::set<std::size_t> cols;
    for (std::size_t e = k.row_ptr[i]; e < k.row_ptr[i + 1]; ++e) {
      CHECK(cols.insert(k.col[e]).second);  // no duplicate columns
      CHECK(k.val[e] >= 0.0);
    }
  }
}

TEST_CASE("uniform torus spectral gap matches the closed form") {
  {
    const GridDims dims{{16}};
    const auto k = metropolis_kernel(uniform_density(dims), {.periodic = true});
    const auto rep = spectral_gap(k);
    const double expected = 1.0 - std::cos(2.0 * std::numbers::pi / 16.0);
    CHECK(rep.gap == Catch::Approx(expected).margin(1e-10));
    CHECK(rep.method == SpectralReport::Method::DenseSymmetricEig);
  }
  {
    const GridDims dims{{8, 8}};
    const auto k = metropolis_kernel(uniform_density(dims), {.periodic = true});
    const double expected = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi / 8.0));
    CHECK(spectral_gap(k).gap == Catch::Approx(expected).margin(1e-10));
  }
}

TEST_CASE("two-state gap comes out as one minus the trace minus one") {
  DensityGrid p{GridDims{{2}}, {1.0 / 3.0, 2.0 / 3.0}};
  const auto rep = spectral_gap(metropolis_kernel(p, {.periodic = false}));
  // eigenvalues are 1 and -1/2
  CHECK(rep.lambda2 == Catch::Approx(-0.5).margin(1e-12));
  CHECK(rep.gap == Catch::Approx(1.5).margin(1e-12));
}

TEST_CASE("jump mixing keeps balance and composes affinely") {
  const GridDims dims{{4, 4}};
  const auto p = random_density(dims, 4);
  const auto base = metropolis_kernel(p, {.periodic = false});
  const auto mixed = mix_with_jumps(base, p, 0.25);
  CHECK(mixed.jump_alpha == Catch::Approx(0.25).margin(1e-15));
  CHECK(row_sum_residual(mixed) < 1e-14);
  CHECK(detailed_balance_residual(mixed) < 1e-15);
  CHECK(stationarity_residual(mixed) < 1e-14);

  // entrywise: (1 - a) P + a p_j
  for (std::size_t i = 0; i < mixed.n; ++i)
    for (std::size_t j = 0; j < mixed.n; ++j)
      CHECK(kernel_entry(mixed, i, j) ==
            Catch::Approx(0.75 * kernel_entry(base, i, j) + 0.25 * p.mass[j]).margin(1e-14));

  const auto twice = mix_with_jumps(mixed, p, 0.5);
  CHECK(twice.jump_alpha == Catch::Approx(1.0 - 0.75 * 0.5).margin(1e-15));

  CHECK_THROWS_AS(mix_with_jumps(base, p, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(mix_with_jumps(base, p, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(mix_with_jumps(base, random_density(dims, 5), 0.2), std::invalid_argument);
}

TEST_CASE("jump weight floors the spectral gap") {
  const GridDims dims{{4, 4}};
  const auto p = random_density(dims, 6);
  const auto base = metropolis_kernel(p, {.periodic = false});
  for (double alpha : {0.1, 0.3, 0.7}) {
    const auto rep = spectral_gap(mix_with_jumps(base, p, alpha));
    CHECK(rep.gap >= alpha - 1e-12);
    CHECK(rep.lambda2 <= (1.0 - alpha) + 1e-12);
  }
  // pure jumps: rank one, lambda2 = 0
  const auto pure = spectral_gap(mix_with_jumps(base, p, 1.0));
  CHECK(pure.lambda2 == Catch::Approx(0.0).margin(1e-10));
  CHECK(pure.gap == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("spectral gap rejects non-reversible kernels") {
  const GridDims dims{{4}};
  auto k = metropolis_kernel(random_density(dims, 7), {.periodic = false});
  // shuffle probability between two entries of one row: rows still sum to
  // one but balance is broken
  REQUIRE(k.row_ptr[1] - k.row_ptr[0] >= 2);
  k.val[k.row_ptr[0]] += 0.05;
  k.val[k.row_ptr[0] + 1] -= 0.05;
  CHECK_THROWS_AS(spectral_gap(k), std::invalid_argument);
}

TEST_CASE("lanczos and dense eigensolver agree") {
  const GridDims dims{{16, 16}};
  const auto k = metropolis_kernel(uniform_density(dims), {.periodic = true});
  const double expected = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi / 16.0));
  const double l2 = detail::lanczos_lambda2(k);
  CHECK(1.0 - l2 == Catch::Approx(expected).margin(1e-9));

  const auto p = random_density(GridDims{{8, 8}}, 8);
  const auto km = mix_with_jumps(metropolis_kernel(p, {.periodic = false}), p, 0.2);
  const double dense = spectral_gap(km).lambda2;
  CHECK(detail::lanczos_lambda2(km) == Catch::Approx(dense).margin(1e-8));
}

TEST_CASE("cheeger bound holds on even tori") {
  const auto r2 = verify_cheeger_bound(GridDims{{16, 16}});
  CHECK(r2.bound == Catch::Approx(2.0 / 16.0).margin(1e-15));
  CHECK(r2.holds);
  CHECK(r2.gap > 0.0);

  const auto r3 = verify_cheeger_bound(GridDims{{8, 8, 8}});
  CHECK(r3.bound == Catch::Approx((4.0 / 3.0) / 8.0).margin(1e-15));
  CHECK(r3.holds);

  CHECK_THROWS_AS(verify_cheeger_bound(GridDims{{15, 15}}), std::invalid_argument);
  CHECK_THROWS_AS(verify_cheeger_bound(GridDims{{8, 16}}), std::invalid_argument);
}

TEST_CASE("chains are deterministic and respect stopping rules") {
  const GridDims dims{{8, 8}};
  const auto p = random_density(dims, 9);
  const auto k = mix_with_jumps(metropolis_kernel(p, {.periodic = false}), p, 0.1);

  const auto a = run_chain(k, ChainStop::steps(500), 41);
  const auto b = run_chain(k, ChainStop::steps(500), 41);
  CHECK(a.draw_log == b.draw_log);
  CHECK(a.draw_log.size() == 500);
  CHECK(a.provenance == Provenance::Markov);
  CHECK(a.markov_alpha == Catch::Approx(0.1).margin(1e-15));
  CHECK_NOTHROW(validate_scheme(a));

  const auto c = run_chain(k, ChainStop::distinct(40), 43);
  CHECK(c.omega.size() == 40);
  CHECK(c.draw_log.size() >= 40);

  // consecutive states are neighbors, equal, or jumps
  for (std::size_t t = 1; t < a.draw_log.size(); ++t)
    CHECK(kernel_entry(k, a.draw_log[t - 1], a.draw_log[t]) > 0.0);
}

TEST_CASE("chain budget exhaustion carries the partial scheme") {
  const GridDims dims{{8, 8}};
  const auto p = random_density(dims, 10);
  const auto k = metropolis_kernel(p, {.periodic = false});
  try {
    run_chain(k, ChainStop::distinct(60, 70), 47);
    FAIL("expected ChainBudgetError");
  } catch (const ChainBudgetError& e) {
    CHECK(e.partial.draw_log.size() == 70);
    CHECK(e.partial.omega.size() < 60);
    CHECK_NOTHROW(validate_scheme(e.partial));
  }
}

TEST_CASE("long chains approach the stationary density") {
  const GridDims dims{{8, 8}};
  const auto p = random_density(dims, 11);
  const auto k = mix_with_jumps(metropolis_kernel(p, {.periodic = false}), p, 0.15);
  const auto s = run_chain(k, ChainStop::steps(100000), 53);
  const double tv = tv_distance(empirical_measure(s.draw_log, dims).measure(), p);
  CHECK(tv < 0.05);
}

TEST_CASE("chain start state follows the stationary density") {
  DensityGrid p{GridDims{{2}}, {0.25, 0.75}};
  const auto k = metropolis_kernel(p, {.periodic = false});
  std::size_t heavy = 0;
  const std::size_t trials = 4000;
  for (std::size_t t = 0; t < trials; ++t)
    heavy += run_chain(k, ChainStop::steps(1), 1000 + t).draw_log[0] == 1 ? 1 : 0;
  // 4.5 sigma band around 3000
  CHECK(std::abs(static_cast<double>(heavy) - 3000.0) < 4.5 * std::sqrt(trials * 0.25 * 0.75));
}

TEST_CASE("one-draw certificate matches the dense rank-one residual") {
  const GridDims dims{{16}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(1));
  const auto p = optimal_density(model);
  const std::size_t n = dims.n();

  for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{15}}) {
    std::vector<std::complex<double>> e(n, 0.0);
    e[i] = 1.0;
    const auto row = apply_A_adjoint(model, e);  // conj of row i of A
    // dense real-representation residual ||I - Theta_i||_inf
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        const double w = (row[r].real() * row[c].real() + row[r].imag() * row[c].imag()) /
                         p.mass[i];
        const double id = (r == c) ? 1.0 : 0.0;
        acc = std::max(acc, std::abs(id - w));
      }
      worst = std::max(worst, acc);
    }
    const auto rep = juditsky_certificate(model, p, {i}, n);
    CHECK(rep.visits == 1);
    CHECK(rep.infnorm_residual == Catch::Approx(worst).margin(1e-12));
  }
}

TEST_CASE("full sweep under the uniform density certifies maximal sparsity") {
  const GridDims dims{{8, 8}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(2));
  const auto p = uniform_density(dims);
  std::vector<std::size_t> all(dims.n());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto rep = juditsky_certificate(model, p, all, 1000);
  CHECK(rep.infnorm_residual < 1e-12);
  CHECK(rep.max_certified_s == 1000);
}

TEST_CASE("certificate residual shrinks with more draws") {
  const GridDims dims{{8, 8}};
  const auto model = make_acquisition_model(dims, WaveletSpec::haar(1));
  const auto p = optimal_density(model);
  double prev = 1e300;
  for (std::size_t m : {200, 2000, 20000}) {
    const auto s = draw_iid(p, m, 61);
    const auto rep = juditsky_certificate(model, p, s.draw_log, 1000);
    CHECK(rep.infnorm_residual < prev);
    prev = rep.infnorm_residual;
  }
  CHECK(prev < 0.5);  // certifies s = 1 by 20000 draws
}
