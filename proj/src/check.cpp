#include "chns/check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chns/diagnostics.hpp"
#include "chns/elliptic.hpp"

namespace chns {
namespace {

double rel(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

ScalarField random_field(const GridSpec& g, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> d(-amp, amp);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
  return f;
}

MacVelocity random_faces(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MacVelocity w(g);
  for (double& x : w.u_values()) x = d(rng);
  for (double& x : w.v_values()) x = d(rng);
  w.clamp_boundary();
  return w;
}

}  // namespace

std::vector<CheckResult> run_checks(const AppConfig& cfg) {
  const double t = cfg.check_tol;
  const GridSpec& g = cfg.run.grid;
  const ModelParams& p = cfg.run.params;
  std::mt19937_64 rng(cfg.run.seed);
  std::vector<CheckResult> out;
  auto record = [&](const char* name, double value, double limit) {
    out.push_back({name, value, limit, value <= limit});
  };

  const ScalarField f = random_field(g, rng, 1.0), h = random_field(g, rng, 1.0);
  const MacVelocity w = random_faces(g, rng);
  record("grad/div adjointness", rel(face_inner(grad_to_faces(f), w), -l2_inner(f, div_faces(w))), t);
  record("laplacian symmetry", rel(l2_inner(f, laplacian_neumann(h)), l2_inner(laplacian_neumann(f), h)), t);

  const SolverConfig tight{std::min(cfg.run.solver.rel_tol, 1e-12), 0};
  const ScalarField u = zero_mean(f);
  const ScalarField back = inverse_neumann_laplacian(-1.0 * laplacian_neumann(u), tight);
  record("N round trip", max_abs(back - u) / max_abs(u), 100.0 * t);

  const ScalarField nu = inverse_neumann_laplacian(u, SolverConfig{1e-13, 0});
  const MacVelocity gnu = grad_to_faces(nu);
  record("dual norm identity", rel(face_inner(gnu, gnu), l2_inner(u, nu)), t);

  // Central difference of F along a zero-mean direction against (mu, delta).
  {
    const ScalarField phi = random_field(g, rng, 0.8);
    const ScalarField sigma = random_field(g, rng, 1.0);
    const ScalarField delta = zero_mean(random_field(g, rng, 1.0));
    const SolverConfig n_cfg{1e-13, 0};
    const double step = 1e-5;
    const double fd = (free_energy(phi + step * delta, sigma, p, n_cfg) -
                       free_energy(phi - step * delta, sigma, p, n_cfg)) /
                      (2.0 * step);
    const double exact = l2_inner(chemical_potential(phi, sigma, p, n_cfg), delta);
    record("free-energy derivative", rel(fd, exact), 1e4 * t);
  }

  // Mean laws over 20 steps of the configured run.
  {
    RunConfig rc = cfg.run;
    rc.t_end = 20.0 * rc.dt;
    rc.cadence = 1;
    const RunResult r = run(rc);
    const MassReport m = mass_check(r.ledger, p);
    const double law0 = std::abs(r.ledger.front().mean_phi - p.c0);
    record("phi mean law", law0 > 1e-8 ? m.phi_law_rel : m.phi_law_abs, 10.0 * t);
    record("sigma mean conservation", m.sigma_drift, 0.1 * t);
  }
  return out;
}

}  // namespace chns
