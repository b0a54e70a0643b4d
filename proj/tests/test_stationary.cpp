#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chns/diagnostics.hpp"
#include "chns/error.hpp"
#include "chns/stationary.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace chns;
using namespace chns::testing;
using std::numbers::pi;

namespace {

double cell_stddev(const ScalarField& f) {
  const ScalarField d = zero_mean(f);
  return std::sqrt(l2_inner(d, d) / f.grid().area());
}

std::vector<double> times(int n, double t0, double t1) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * k / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("uniform seed is already stationary") {
  const GridSpec g{8, 8, 8.0, 8.0};
  ModelParams p;
  p.c0 = 0.3;
  p.alpha = 1.0;
  const Equilibrium eq = solve_stationary(ScalarField(g, 0.3), p);
  CHECK(eq.iterations == 0);
  CHECK(eq.residual <= 1e-14);
  CHECK(max_diff(eq.phi_inf, ScalarField(g, 0.3)) == 0.0);
}

TEST_CASE("stable uniform state is recovered from a perturbation") {
  // theta0 / theta below the spinodal threshold at mean 0.5: Psi''(0.5) > 0.
  const GridSpec g{16, 16, 4.0, 4.0};
  std::mt19937_64 rng(31);
  ModelParams p;
  p.potential.theta = 1.0;
  p.potential.theta0 = 1.2;
  REQUIRE(psi0_second(p.potential, 0.5) - p.potential.theta0 > 0.0);
  ScalarField seed = random_field(g, rng, 0.45, 0.55);
  StationaryConfig cfg;
  cfg.phi_mean = 0.5;
  const Equilibrium eq = solve_stationary(seed, p, cfg);
  CHECK(max_diff(eq.phi_inf, ScalarField(g, 0.5)) <= 1e-7);
  CHECK(std::abs(eq.mass_phi - 0.5) <= 1e-10);
}

TEST_CASE("converged output satisfies the stationary system") {
  const GridSpec g{16, 16, 16.0, 16.0};
  std::mt19937_64 rng(37);
  ModelParams p;
  p.chi = 0.3;
  p.beta = 0.05;
  p.alpha = 0.2;
  p.c0 = 0.1;
  const ScalarField seed = random_field(g, rng, -0.2, 0.4);
  StationaryConfig cfg;
  cfg.sigma_mean = 0.25;
  const Equilibrium eq = solve_stationary(seed, p, cfg);
  const double tol = cfg.rel_tol * p.potential.theta0;
  CHECK(max_abs(stationary_residual(eq.phi_inf, eq.sigma_inf, p)) <= tol);
  CHECK(eq.residual <= tol);
  CHECK(cell_stddev(eq.sigma_inf - p.chi * eq.phi_inf) <= 1e-12);
  CHECK(std::abs(eq.mass_phi - p.c0) <= 1e-10);
  CHECK(std::abs(eq.mass_sigma - 0.25) <= 1e-10);
  CHECK(max_abs(eq.phi_inf) < 1.0);
  // Separated into two phases.
  CHECK(max_abs(eq.phi_inf) > 0.5);
  CHECK(eq.free_energy_at == doctest::Approx(free_energy(eq.phi_inf, eq.sigma_inf, p, cfg.solver)));
  ScalarField start = seed;
  start += p.c0 - mean(seed);
  CHECK(eq.free_energy_at <= free_energy(start, reduced_sigma(start, 0.25, p.chi), p) + 1e-8);
}

TEST_CASE("mean target follows the relaxation switch") {
  const GridSpec g{8, 8, 8.0, 8.0};
  std::mt19937_64 rng(41);
  ModelParams p;
  p.c0 = -0.2;
  const ScalarField seed = random_field(g, rng, 0.0, 0.2);
  const Equilibrium eq = solve_stationary(seed, p);
  CHECK(std::abs(eq.mass_phi - mean(seed)) <= 1e-10);
  StationaryConfig cfg;
  cfg.phi_mean = 0.05;
  CHECK(std::abs(solve_stationary(seed, p, cfg).mass_phi - 0.05) <= 1e-10);
}

TEST_CASE("non-convergence reports the residual history") {
  const GridSpec g{16, 16, 16.0, 16.0};
  std::mt19937_64 rng(43);
  ModelParams p;
  StationaryConfig cfg;
  cfg.max_iter = 3;
  try {
    (void)solve_stationary(random_field(g, rng, -0.1, 0.1), p, cfg);
    FAIL("expected StationaryFailure");
  } catch (const StationaryFailure& e) {
    CHECK(e.history().size() == 4);
    CHECK(e.history().back() > 0.0);
  }
}

TEST_CASE("reduced sigma and deficit") {
  const GridSpec g{8, 8, 1.0, 1.0};
  std::mt19937_64 rng(47);
  const ScalarField phi = random_field(g, rng);
  const ScalarField s = reduced_sigma(phi, 0.7, 0.4);
  CHECK(mean(s) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(cell_stddev(s - 0.4 * phi) <= 1e-15);
  CHECK(h1_deficit(phi, phi) == 0.0);
  // A constant offset has no gradient: deficit = |c| sqrt(|Omega|).
  CHECK(h1_deficit(phi + ScalarField(g, 0.5), phi) == doctest::Approx(0.5));
}

TEST_CASE("rate fit recovers algebraic exponents") {
  const std::vector<double> t = times(40, 0.0, 100.0);
  for (double m : {-1.0, -0.5, -0.25, -3.0}) {
    CAPTURE(m);
    std::vector<double> d;
    for (double x : t) d.push_back(2.5 * std::pow(1.0 + x, m));
    const RateFit f = rate_fit(t, d);
    CHECK(f.slope == doctest::Approx(m).epsilon(1e-12));
    CHECK(std::abs(f.kappa_hat - (-m / (1.0 - 2.0 * m))) <= 1e-10);
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK_FALSE(f.flagged);
    CHECK(f.t_end == 100.0);
  }
  std::vector<double> d;
  for (double x : t) d.push_back(std::pow(1.0 + x, -1.0));
  CHECK(std::abs(rate_fit(t, d).kappa_hat - 1.0 / 3.0) <= 1e-10);
  d.clear();
  for (double x : t) d.push_back(std::pow(1.0 + x, -0.5));
  CHECK(std::abs(rate_fit(t, d).kappa_hat - 0.25) <= 1e-10);
}

TEST_CASE("rate fit refuses or flags non-algebraic data") {
  const std::vector<double> t = times(40, 0.0, 40.0);
  std::vector<double> d;
  for (double x : t) d.push_back(std::exp(-0.5 * x));
  bool refused = false, flagged = false;
  try {
    flagged = rate_fit(t, d).flagged;
  } catch (const InvalidArgument&) {
    refused = true;
  }
  CHECK((refused || flagged));

  // Growing deficit: slope > 0, kappa outside (0, 1/2).
  d.clear();
  for (double x : t) d.push_back(1.0 + 0.0 * x);
  CHECK(rate_fit(t, d).flagged);

  std::vector<double> bumpy;
  for (double x : t) bumpy.push_back(1.0 / (1.0 + x));
  bumpy[35] = 1.0;
  CHECK_THROWS_AS(rate_fit(t, bumpy), InvalidArgument);
  std::vector<double> negative(t.size(), -1.0);
  CHECK_THROWS_AS(rate_fit(t, negative), InvalidArgument);
  CHECK_THROWS_AS(rate_fit(std::vector<double>{0, 1, 2}, std::vector<double>{1, 0.5, 0.3}), InvalidArgument);
}
