#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "chns/chd.hpp"
#include "chns/diagnostics.hpp"
#include "chns/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace chns;
using namespace chns::testing;
using std::numbers::pi;

namespace {

ModelParams quartic(double theta0 = 2.0) {
  ModelParams p;
  p.potential.kind = PotentialKind::quartic;
  p.potential.theta0 = theta0;
  return p;
}

ModelParams logarithmic(double theta = 1.5, double theta0 = 3.0) {
  ModelParams p;
  p.potential.theta = theta;
  p.potential.theta0 = theta0;
  return p;
}

// Independent oracle for one pure Cahn-Hilliard step (alpha = beta = chi = 0,
// v = 0): eliminate mu and run dense Newton on
//   G(phi) = phi - phi_n - dt L(-L phi + Psi0'(phi) - theta0 phi_n + gamma (phi - phi_n)/dt).
Eigen::VectorXd dense_ch_oracle(const GridSpec& g, const Eigen::VectorXd& phi_n, const ModelParams& p, double dt) {
  const Eigen::MatrixXd l = dense_neumann_laplacian(g);
  const auto n = phi_n.size();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const double th0 = p.potential.theta0;
  Eigen::VectorXd phi = phi_n;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd d0(n), d1(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      d0[k] = psi0_prime(p.potential, phi[k]);
      d1[k] = psi0_second(p.potential, phi[k]) + p.gamma / dt;
    }
    const Eigen::VectorXd mu = -l * phi + d0 - th0 * phi_n + p.gamma * (phi - phi_n) / dt;
    const Eigen::VectorXd res = phi - phi_n - dt * l * mu;
    if (res.lpNorm<Eigen::Infinity>() < 1e-15) break;
    const Eigen::MatrixXd jac = id - dt * l * (-l + Eigen::MatrixXd(d1.asDiagonal()));
    phi -= jac.fullPivLu().solve(res);
  }
  return phi;
}

}  // namespace

TEST_CASE("uniform states are fixed points") {
  const GridSpec g{8, 6, 1.0, 0.75};
  ModelParams p = logarithmic();
  p.chi = 0.7;
  p.alpha = 0.4;
  p.beta = 2.0;
  p.c0 = 0.2;
  const ScalarField phi(g, 0.2), sigma(g, -0.3);
  const ChStepResult r = ch_step(phi, sigma, MacVelocity(g), p, 0.05);
  CHECK(max_diff(r.phi, phi) <= 1e-13);
  const double mu_expected = psi_prime(p.potential, 0.2) - p.chi * -0.3;
  CHECK(max_diff(r.mu, ScalarField(g, mu_expected)) <= 1e-12);
  CHECK(max_diff(sigma_step(sigma, r.phi, MacVelocity(g), p, 0.05), sigma) <= 1e-14);
}

TEST_CASE("discrete mean law") {
  const GridSpec g{12, 10, 1.2, 1.0};
  std::mt19937_64 rng(11);
  ModelParams p = logarithmic();
  p.alpha = 3.0;
  p.c0 = -0.25;
  p.chi = 0.4;
  p.beta = 1.5;
  const double dt = 0.01;
  for (int trial = 0; trial < 3; ++trial) {
    const ScalarField phi = random_field(g, rng, -0.6, 0.6);
    const ScalarField sigma = random_field(g, rng);
    const ChStepResult r = ch_step(phi, sigma, swirl(g, 0.3), p, dt);
    const double expected = (mean(phi) - p.c0) / (1.0 + p.alpha * dt);
    CHECK(std::abs((mean(r.phi) - p.c0) - expected) <= 1e-10 * std::abs(expected));
  }
}

TEST_CASE("quartic step against dense Newton oracle") {
  const GridSpec g{8, 8, 1.0, 1.0};
  std::mt19937_64 rng(5);
  const ScalarField phi_n = random_field(g, rng, -0.8, 0.8);
  for (double gamma : {0.0, 0.3}) {
    CAPTURE(gamma);
    ModelParams p = quartic(2.0);
    p.gamma = gamma;
    const double dt = 1e-3;
    ChdOptions opt;
    opt.newton.tol = 1e-13;
    const ChStepResult r = ch_step(phi_n, ScalarField(g), MacVelocity(g), p, dt, opt);
    const ScalarField oracle = from_eigen(g, dense_ch_oracle(g, to_eigen(phi_n), p, dt));
    CHECK(max_diff(r.phi, oracle) <= 1e-9);
    CHECK(r.report.newton_iters >= 1);
  }
}

TEST_CASE("sigma step against dense oracle") {
  const GridSpec g{8, 8, 1.0, 1.0};
  ModelParams p;
  p.chi = 1.0;
  const double dt = 0.02;
  const ScalarField phi = sample(g, [&](double x, double) { return std::cos(pi * x / g.lx); });
  ChdOptions opt;
  opt.solver.rel_tol = 1e-14;
  const ScalarField s = sigma_step(ScalarField(g), phi, MacVelocity(g), p, dt, opt);

  const Eigen::MatrixXd l = dense_neumann_laplacian(g);
  const auto n = l.rows();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - dt * l;
  const Eigen::VectorXd rhs = -dt * p.chi * (l * to_eigen(phi));
  const ScalarField oracle = from_eigen(g, a.ldlt().solve(rhs));
  CHECK(max_diff(s, oracle) <= 1e-10);
}

TEST_CASE("sigma mean is conserved") {
  const GridSpec g{16, 12, 2.0, 1.5};
  std::mt19937_64 rng(21);
  ModelParams p;
  p.chi = -0.8;
  const ScalarField sigma = random_field(g, rng, 0.0, 2.0);
  const ScalarField phi = random_field(g, rng, -0.9, 0.9);
  const ScalarField next = sigma_step(sigma, phi, swirl(g, 0.5), p, 0.01);
  CHECK(std::abs(mean(next) - mean(sigma)) <= 1e-12);
  CHECK(max_diff(sigma_step(ScalarField(g, 0.4), ScalarField(g, -0.1), MacVelocity(g), p, 0.1),
                 ScalarField(g, 0.4)) <= 1e-14);
}

TEST_CASE("chd_step is the composition of the sub-steps") {
  const GridSpec g{10, 10, 1.0, 1.0};
  std::mt19937_64 rng(2);
  ModelParams p = logarithmic();
  p.chi = 0.5;
  SimState s(g);
  s.phi = random_field(g, rng, -0.5, 0.5);
  s.sigma = random_field(g, rng);
  s.t = 0.3;
  const MacVelocity v = swirl(g, 0.2);
  ChdStepReport rep;
  const SimState next = chd_step(s, v, p, 0.01, {}, &rep);
  const ChStepResult ch = ch_step(s.phi, s.sigma, v, p, 0.01);
  CHECK(max_diff(next.phi, ch.phi) == 0.0);
  CHECK(max_diff(next.mu, ch.mu) == 0.0);
  CHECK(max_diff(next.sigma, sigma_step(s.sigma, ch.phi, v, p, 0.01)) == 0.0);
  CHECK(next.t == doctest::Approx(0.31));
  CHECK(rep.newton_iters == ch.report.newton_iters);
}

TEST_CASE("pure Cahn-Hilliard energy decays at any step size") {
  const GridSpec g{16, 16, 16.0, 16.0};
  std::mt19937_64 rng(7);
  const ModelParams p = logarithmic();
  for (double dt : {0.01, 0.1, 1.0}) {
    CAPTURE(dt);
    SimState s(g);
    s.phi = random_field(g, rng, -0.3, 0.3);
    double f = free_energy(s.phi, s.sigma, p);
    int increases = 0;
    for (int n = 0; n < 100; ++n) {
      s = chd_step(s, MacVelocity(g), p, dt);
      const double f_next = free_energy(s.phi, s.sigma, p);
      if (f_next > f + 1e-10) ++increases;
      f = f_next;
    }
    CHECK(increases == 0);
  }
}

TEST_CASE("phase bound and barrier limiter") {
  const GridSpec g{16, 16, 4.0, 4.0};
  const ModelParams p = logarithmic(0.5, 4.0);
  // A sharp, nearly saturated profile with a large step pushes Newton toward
  // the barrier.
  SimState s(g);
  s.phi = sample(g, [](double x, double) { return x < 2.0 ? 0.999 : -0.999; });
  long clipped = 0;
  for (int n = 0; n < 20; ++n) {
    ChdStepReport rep;
    s = chd_step(s, MacVelocity(g), p, 0.5, {}, &rep);
    CHECK(rep.phi_max < 1.0 - 1e-12);
    CHECK(rep.phi_min > -1.0 + 1e-12);
    clipped += rep.clipped_steps;
  }
  CHECK(max_abs(s.phi) < 1.0 - 1e-12);
  MESSAGE("limiter activations: " << clipped);
}

TEST_CASE("chemical potential agrees with the Newton output") {
  const GridSpec g{12, 12, 1.0, 1.0};
  std::mt19937_64 rng(9);
  ModelParams p = logarithmic();
  p.beta = 0.0;
  const ScalarField phi_n = random_field(g, rng, -0.5, 0.5);
  ChdOptions opt;
  opt.newton.tol = 1e-13;
  const ChStepResult r = ch_step(phi_n, ScalarField(g), MacVelocity(g), p, 1e-3, opt);
  // mu' = Psi'(phi') - lap phi' + theta0 (phi' - phi_n)
  ScalarField expected = chemical_potential(r.phi, ScalarField(g), p);
  expected += p.potential.theta0 * (r.phi - phi_n);
  CHECK(max_diff(r.mu, expected) <= 1e-9);
}

TEST_CASE("invalid arguments") {
  const GridSpec g{4, 4, 1.0, 1.0};
  const ModelParams p = logarithmic();
  CHECK_THROWS_AS(ch_step(ScalarField(g), ScalarField(g), MacVelocity(g), p, 0.0), InvalidArgument);
  CHECK_THROWS_AS(sigma_step(ScalarField(g), ScalarField(g), MacVelocity(g), p, -1.0), InvalidArgument);
  const GridSpec h{5, 4, 1.0, 1.0};
  CHECK_THROWS_AS(ch_step(ScalarField(g), ScalarField(h), MacVelocity(g), p, 0.1), InvalidArgument);
  ChdOptions opt;
  opt.newton.max_iter = 0;
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(ch_step(random_field(g, rng, -0.5, 0.5), ScalarField(g), MacVelocity(g), p, 0.1, opt),
                  SolverError);
}
