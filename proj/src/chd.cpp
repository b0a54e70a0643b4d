#include "chns/chd.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "chns/error.hpp"
#include "chns/potential.hpp"

namespace chns {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Neumann Laplacian stencil entries (matching laplacian_neumann) for cell
// (i, j), offset into a larger matrix.
void push_laplacian_row(const GridSpec& g, int i, int j, int row, int col0, double scale,
                        std::vector<Triplet>& t) {
  const double cx = scale / (g.hx() * g.hx());
  const double cy = scale / (g.hy() * g.hy());
  const int k = j * g.nx + i;
  double diag = 0.0;
  if (i > 0) t.emplace_back(row, col0 + k - 1, cx), diag -= cx;
  if (i < g.nx - 1) t.emplace_back(row, col0 + k + 1, cx), diag -= cx;
  if (j > 0) t.emplace_back(row, col0 + k - g.nx, cy), diag -= cy;
  if (j < g.ny - 1) t.emplace_back(row, col0 + k + g.nx, cy), diag -= cy;
  t.emplace_back(row, col0 + k, diag);
}

// Jacobian of the scaled residual
//   R1 = phi - phi_n + dt A - dt lap mu + dt alpha (mean phi - c0) - dt S
//   R2 = mu + lap phi - Psi0'(phi) - gamma (phi - phi_n)/dt - g
// without the rank-one mean term (handled by Sherman-Morrison).
SpMat assemble_jacobian(const GridSpec& g, double dt, double gamma, std::span<const double> psi0pp) {
  const int n = static_cast<int>(g.cells());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * 12);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int k = j * g.nx + i;
      t.emplace_back(k, k, 1.0);
      push_laplacian_row(g, i, j, k, n, -dt, t);
      push_laplacian_row(g, i, j, n + k, 0, 1.0, t);
      t.emplace_back(n + k, k, -psi0pp[k] - gamma / dt);
      t.emplace_back(n + k, n + k, 1.0);
    }
  }
  SpMat m(2 * n, 2 * n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

double max_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

ScalarField explicit_potential_part(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                                    const SolverConfig& cfg, int* linear_iters) {
  ScalarField g = -p.potential.theta0 * phi;
  if (p.chi != 0.0) g -= p.chi * sigma;
  if (p.beta != 0.0) {
    SolveStats st;
    g += p.beta * inverse_neumann_laplacian(zero_mean(phi), cfg, &st);
    if (linear_iters) *linear_iters += st.iterations;
  }
  return g;
}

ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                               const SolverConfig& cfg) {
  ScalarField mu = -1.0 * laplacian_neumann(phi);
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += psi_prime(p.potential, phi[k]);
  if (p.chi != 0.0) mu -= p.chi * sigma;
  if (p.beta != 0.0) mu += p.beta * inverse_neumann_laplacian(zero_mean(phi), cfg);
  return mu;
}

ChStepResult ch_step(const ScalarField& phi_n, const ScalarField& sigma_n, const MacVelocity& vel,
                     const ModelParams& p, double dt, const ChdOptions& opt) {
  require_same_grid(phi_n.grid(), sigma_n.grid(), "ch_step");
  require_same_grid(phi_n.grid(), vel.grid(), "ch_step");
  if (!(dt > 0.0)) throw InvalidArgument("ch_step: dt must be positive");
  const GridSpec& g = phi_n.grid();
  const int n = static_cast<int>(g.cells());
  const PotentialParams& pot = p.potential;
  const bool barrier = pot.kind == PotentialKind::logarithmic;

  ChdStepReport rep;
  const ScalarField explicit_part = explicit_potential_part(phi_n, sigma_n, p, opt.solver, &rep.linear_iters);

  // Everything in R1 that does not depend on the unknowns.
  ScalarField r1_const = phi_n;
  r1_const -= dt * advect_scalar(vel, phi_n);
  r1_const += dt * p.alpha * p.c0;
  double source_mean = 0.0;
  if (opt.sources && opt.sources->phi) {
    r1_const += dt * *opt.sources->phi;
    source_mean = mean(*opt.sources->phi);
  }
  const double target_mean = (mean(phi_n) + dt * p.alpha * p.c0 + dt * source_mean) / (1.0 + dt * p.alpha);

  // Initial guess: phi_n, and the mu that satisfies R2 exactly there.
  ScalarField phi = phi_n;
  ScalarField mu = -1.0 * laplacian_neumann(phi);
  for (int k = 0; k < n; ++k) mu[k] += psi0_prime(pot, phi[k]) + explicit_part[k];

  const double rhs_norm = std::max(max_abs(r1_const), max_abs(explicit_part));
  const double tol = opt.newton.tol * (1.0 + rhs_norm);

  Eigen::VectorXd res(2 * n), y(2 * n), z(2 * n), rank_one(2 * n);
  std::vector<double> psi0pp(n);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;

  auto residual = [&](Eigen::VectorXd& r) {
    const ScalarField lap_mu = laplacian_neumann(mu);
    const ScalarField lap_phi = laplacian_neumann(phi);
    const double mphi = mean(phi);
    for (int k = 0; k < n; ++k) {
      r[k] = phi[k] - dt * lap_mu[k] + dt * p.alpha * mphi - r1_const[k];
      r[n + k] = mu[k] + lap_phi[k] - psi0_prime(pot, phi[k]) - p.gamma * (phi[k] - phi_n[k]) / dt -
                 explicit_part[k];
    }
    return max_norm(std::span<const double>(r.data(), r.size()));
  };

  double rnorm = residual(res);
  int it = 0;
  while (rnorm > tol) {
    if (it >= opt.newton.max_iter) {
      std::ostringstream msg;
      msg << "ch_step: Newton did not converge in " << it << " iterations, residual " << rnorm
          << " (tolerance " << tol << ")";
      throw SolverError(msg.str(), it, rnorm);
    }
    for (int k = 0; k < n; ++k) psi0pp[k] = psi0_second(pot, phi[k]);
    const SpMat jac = assemble_jacobian(g, dt, p.gamma, psi0pp);
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) throw SolverError("ch_step: Jacobian factorization failed", it, rnorm);
    y = lu.solve(-res);
    rep.linear_iters += 1;
    if (p.alpha != 0.0) {
      // J = J0 + u v^T with u = dt alpha [1; 0], v = [1/n; 0].
      rank_one.setZero();
      rank_one.head(n).setConstant(dt * p.alpha);
      z = lu.solve(rank_one);
      rep.linear_iters += 1;
      const double vy = y.head(n).mean();
      const double vz = z.head(n).mean();
      y -= z * (vy / (1.0 + vz));
    }

    double step = 1.0;
    if (barrier) {
      for (int k = 0; k < n; ++k) {
        const double d = y[k];
        if (d == 0.0) continue;
        const double room = d > 0.0 ? 1.0 - phi[k] : 1.0 + phi[k];
        const double limit = 0.9 * room;
        if (std::abs(d) > limit) step = std::min(step, limit / std::abs(d));
      }
      if (step < 1.0) ++rep.clipped_steps;
    }
    for (int k = 0; k < n; ++k) {
      phi[k] += step * y[k];
      mu[k] += step * y[n + k];
    }
    ++it;
    rnorm = residual(res);
  }

  // The mean obeys a linear law that full Newton steps satisfy up to rounding;
  // pin it exactly.
  const double shift = target_mean - mean(phi);
  bool can_shift = true;
  if (barrier) {
    for (int k = 0; k < n && can_shift; ++k) can_shift = std::abs(phi[k] + shift) < 1.0 - 1e-13;
  }
  if (can_shift) phi += shift;

  rep.newton_iters = it;
  rep.newton_residual = rnorm;
  const auto [lo, hi] = std::minmax_element(phi.values().begin(), phi.values().end());
  rep.phi_min = *lo;
  rep.phi_max = *hi;
  return {std::move(phi), std::move(mu), rep};
}

ScalarField sigma_step(const ScalarField& sigma_n, const ScalarField& phi_next, const MacVelocity& vel,
                       const ModelParams& p, double dt, const ChdOptions& opt) {
  require_same_grid(sigma_n.grid(), phi_next.grid(), "sigma_step");
  require_same_grid(sigma_n.grid(), vel.grid(), "sigma_step");
  if (!(dt > 0.0)) throw InvalidArgument("sigma_step: dt must be positive");

  ScalarField rhs = sigma_n;
  rhs -= dt * advect_scalar(vel, sigma_n);
  if (p.chi != 0.0) rhs -= (dt * p.chi) * laplacian_neumann(phi_next);
  double target_mean = mean(sigma_n);
  if (opt.sources && opt.sources->sigma) {
    rhs += dt * *opt.sources->sigma;
    target_mean += dt * mean(*opt.sources->sigma);
  }

  const ScalarOperator implicit_diffusion = [dt](const ScalarField& s) {
    ScalarField out = s;
    out -= dt * laplacian_neumann(s);
    return out;
  };
  ScalarField sigma = solve_spd(implicit_diffusion, rhs, opt.solver, Kernel::none);
  // Transport and diffusion are mean-free; the mean is carried over exactly.
  sigma += target_mean - mean(sigma);
  return sigma;
}

SimState chd_step(const SimState& s, const MacVelocity& vel, const ModelParams& p, double dt,
                  const ChdOptions& opt, ChdStepReport* report) {
  ChStepResult ch = ch_step(s.phi, s.sigma, vel, p, dt, opt);
  SimState next = s;
  next.sigma = sigma_step(s.sigma, ch.phi, vel, p, dt, opt);
  next.phi = std::move(ch.phi);
  next.mu = std::move(ch.mu);
  next.t = s.t + dt;
  if (report) *report = ch.report;
  return next;
}

}  // namespace chns
