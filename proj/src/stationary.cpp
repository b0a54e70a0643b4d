#include "chns/stationary.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "chns/diagnostics.hpp"
#include "chns/potential.hpp"

namespace chns {
namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k], my += y[k];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("rate_fit: time samples do not span an interval");
  LineFit f;
  f.slope = sxy / sxx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void push_minus_laplacian(const GridSpec& g, int i, int j, int row, int col0, std::vector<Triplet>& t) {
  const double cx = 1.0 / (g.hx() * g.hx()), cy = 1.0 / (g.hy() * g.hy());
  const int k = j * g.nx + i;
  double diag = 0.0;
  if (i > 0) t.emplace_back(row, col0 + k - 1, -cx), diag += cx;
  if (i < g.nx - 1) t.emplace_back(row, col0 + k + 1, -cx), diag += cx;
  if (j > 0) t.emplace_back(row, col0 + k - g.nx, -cy), diag += cy;
  if (j < g.ny - 1) t.emplace_back(row, col0 + k + g.nx, -cy), diag += cy;
  if (diag != 0.0) t.emplace_back(row, col0 + k, diag);
}

// Newton on the reduced stationary system with unknowns (phi, w, lambda, kappa):
//   -lap phi + Psi'(phi) - chi^2 phi + beta w - lambda = 0
//   -lap w - phi + m + kappa = 0,   mean(w) = 0,   mean(phi) = m
// so w = N(phi - m). Returns nothing if Newton fails or leaves (-1, 1).
std::optional<ScalarField> newton_polish(const ScalarField& start, const ModelParams& p, double m,
                                         const SolverConfig& cfg, double tol) {
  const GridSpec& g = start.grid();
  const int n = static_cast<int>(g.cells());
  const int dim = 2 * n + 2;
  const PotentialParams& pot = p.potential;
  const bool barrier = pot.kind == PotentialKind::logarithmic;
  const double chi2 = p.chi * p.chi;

  ScalarField phi = start;
  ScalarField w = inverse_neumann_laplacian(zero_mean(phi), cfg);
  double lambda = 0.0, kappa = 0.0;
  {
    ScalarField r = -1.0 * laplacian_neumann(phi);
    for (int k = 0; k < n; ++k) r[k] += psi_prime(pot, phi[k]) - chi2 * phi[k] + p.beta * w[k];
    lambda = mean(r);
  }

  Eigen::VectorXd res(dim), dx(dim);
  auto residual = [&]() {
    const ScalarField lp = laplacian_neumann(phi), lw = laplacian_neumann(w);
    for (int k = 0; k < n; ++k) {
      res[k] = -lp[k] + psi_prime(pot, phi[k]) - chi2 * phi[k] + p.beta * w[k] - lambda;
      res[n + k] = -lw[k] - phi[k] + m + kappa;
    }
    res[2 * n] = mean(phi) - m;
    res[2 * n + 1] = mean(w);
    return res.lpNorm<Eigen::Infinity>();
  };

  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  const double inv_n = 1.0 / n;
  for (int it = 0; it < 40; ++it) {
    if (residual() <= 1e-3 * tol) return phi;
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n) * 14);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const int k = j * g.nx + i;
        push_minus_laplacian(g, i, j, k, 0, t);
        t.emplace_back(k, k, psi0_second(pot, phi[k]) - pot.theta0 - chi2);
        if (p.beta != 0.0) t.emplace_back(k, n + k, p.beta);
        t.emplace_back(k, 2 * n, -1.0);
        push_minus_laplacian(g, i, j, n + k, n, t);
        t.emplace_back(n + k, k, -1.0);
        t.emplace_back(n + k, 2 * n + 1, 1.0);
        t.emplace_back(2 * n, k, inv_n);
        t.emplace_back(2 * n + 1, n + k, inv_n);
      }
    }
    SpMat jac(dim, dim);
    jac.setFromTriplets(t.begin(), t.end());
    jac.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) return std::nullopt;
    dx = lu.solve(-res);
    if (!dx.allFinite()) return std::nullopt;
    double step = 1.0;
    if (barrier) {
      for (int k = 0; k < n; ++k) {
        const double room = dx[k] > 0.0 ? 1.0 - phi[k] : 1.0 + phi[k];
        if (std::abs(dx[k]) > 0.9 * room) step = std::min(step, 0.9 * room / std::abs(dx[k]));
      }
    }
    for (int k = 0; k < n; ++k) {
      phi[k] += step * dx[k];
      w[k] += step * dx[n + k];
    }
    lambda += step * dx[2 * n];
    kappa += step * dx[2 * n + 1];
  }
  return residual() <= 1e-3 * tol ? std::optional<ScalarField>(phi) : std::nullopt;
}

}  // namespace

ScalarField reduced_sigma(const ScalarField& phi, double sigma_mean, double chi) {
  ScalarField s = chi * phi;
  s += sigma_mean - chi * mean(phi);
  return s;
}

ScalarField stationary_residual(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                                const SolverConfig& cfg) {
  return zero_mean(chemical_potential(phi, sigma, p, cfg));
}

Equilibrium solve_stationary(const ScalarField& seed_phi, const ModelParams& p, const StationaryConfig& cfg) {
  p.validate();
  const GridSpec& g = seed_phi.grid();
  const double target = p.alpha > 0.0 ? p.c0 : cfg.phi_mean.value_or(mean(seed_phi));
  ScalarField phi = seed_phi;
  phi += target - mean(phi);
  if (p.potential.kind == PotentialKind::logarithmic && !(max_abs(phi) < 1.0)) {
    throw InvalidArgument("solve_stationary: seed shifted to the target mean leaves (-1, 1)");
  }

  // Flow parameters: no Oono relaxation (the mean is already at its target),
  // no viscous regularization.
  ModelParams flow = p;
  flow.alpha = 0.0;
  flow.gamma = 0.0;
  ChdOptions opt;
  opt.solver = cfg.solver;
  opt.newton = cfg.newton;
  const MacVelocity still(g);

  double dt_cap = cfg.dt_max;
  if (p.beta > 0.0) dt_cap = std::min(dt_cap, 1.0 / p.beta);
  double dt = std::min(cfg.dt_initial, dt_cap);
  const double tol = cfg.rel_tol * p.potential.theta0;

  // Near rest the flow can crawl along nearly flat directions; a Newton solve
  // of the stationary equations finishes the job once the residual is small.
  // Its result is kept only if it is admissible and does not raise F.
  const double polish_below = 1e-3 * p.potential.theta0;
  constexpr int kPolishEvery = 25;
  int last_polish = -kPolishEvery;

  std::vector<double> history;
  ScalarField sigma = reduced_sigma(phi, cfg.sigma_mean, p.chi);
  for (int it = 0;; ++it) {
    double res = max_abs(stationary_residual(phi, sigma, p, cfg.solver));
    if (res > tol && res <= polish_below && it - last_polish >= kPolishEvery) {
      last_polish = it;
      if (auto polished = newton_polish(phi, p, target, cfg.solver, tol)) {
        *polished += target - mean(*polished);
        const bool inside = p.potential.kind != PotentialKind::logarithmic || max_abs(*polished) < 1.0;
        if (inside) {
          const ScalarField s2 = reduced_sigma(*polished, cfg.sigma_mean, p.chi);
          const double r2 = max_abs(stationary_residual(*polished, s2, p, cfg.solver));
          if (r2 <= tol && free_energy(*polished, s2, p, cfg.solver) <= free_energy(phi, sigma, p, cfg.solver)) {
            phi = std::move(*polished);
            sigma = s2;
            res = r2;
          }
        }
      }
    }
    history.push_back(res);
    if (res <= tol) {
      Equilibrium eq;
      eq.residual = res;
      eq.mass_phi = mean(phi);
      eq.mass_sigma = mean(sigma);
      eq.free_energy_at = free_energy(phi, sigma, p, cfg.solver);
      eq.iterations = it;
      eq.phi_inf = std::move(phi);
      eq.sigma_inf = std::move(sigma);
      return eq;
    }
    if (it >= cfg.max_iter) {
      std::ostringstream msg;
      msg << "solve_stationary: no convergence in " << it << " iterations; residual " << res
          << " (tolerance " << tol << "); last residuals:";
      for (std::size_t k = history.size() > 5 ? history.size() - 5 : 0; k < history.size(); ++k)
        msg << ' ' << history[k];
      throw StationaryFailure(msg.str(), it, std::move(history));
    }
    try {
      ChStepResult r = ch_step(phi, sigma, still, flow, dt, opt);
      phi = std::move(r.phi);
      sigma = reduced_sigma(phi, cfg.sigma_mean, p.chi);
      if (r.report.newton_iters <= 6) dt = std::min(1.5 * dt, dt_cap);
    } catch (const SolverError&) {
      dt *= 0.25;
      if (dt < 1e-12) throw StationaryFailure("solve_stationary: step size collapsed", it, std::move(history));
    }
  }
}

double h1_deficit(const ScalarField& phi, const ScalarField& psi) {
  const ScalarField d = phi - psi;
  const MacVelocity gd = grad_to_faces(d);
  return std::sqrt(face_inner(gd, gd)) + l2_norm(d);
}

RateFit rate_fit(std::span<const double> t, std::span<const double> deficit, double tail_fraction) {
  if (t.size() != deficit.size()) throw InvalidArgument("rate_fit: time and deficit series differ in length");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidArgument("rate_fit: tail fraction must lie in (0, 1]");
  const std::size_t n = t.size();
  const std::size_t start = n - static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  if (n - start < 4) throw InvalidArgument("rate_fit: need at least 4 samples in the tail window");

  std::vector<double> x, y;
  for (std::size_t k = start; k < n; ++k) {
    if (!(deficit[k] > 0.0) || !std::isfinite(deficit[k]))
      throw InvalidArgument("rate_fit refused: deficit must be positive and finite in the tail");
    if (!(t[k] > -1.0)) throw InvalidArgument("rate_fit refused: times must exceed -1");
    if (k > start && !(t[k] > t[k - 1])) throw InvalidArgument("rate_fit refused: times must increase");
    if (k > start && deficit[k] > deficit[k - 1]) {
      std::ostringstream msg;
      msg << "rate_fit refused: tail is not monotone (deficit rises at t = " << t[k] << ")";
      throw InvalidArgument(msg.str());
    }
    x.push_back(std::log1p(t[k]));
    y.push_back(std::log(deficit[k]));
  }

  const LineFit all = least_squares(x, y);
  const std::size_t half = x.size() / 2;
  const LineFit first = least_squares(std::span(x).first(half + 1), std::span(y).first(half + 1));
  const LineFit second = least_squares(std::span(x).subspan(half), std::span(y).subspan(half));
  if (first.slope < 0.0 && second.slope < 1.25 * first.slope) {
    std::ostringstream msg;
    msg << "rate_fit refused: log-log slope steepens from " << first.slope << " to " << second.slope
        << " across the tail; the decay is faster than any algebraic rate";
    throw InvalidArgument(msg.str());
  }

  RateFit f;
  f.slope = all.slope;
  f.r2 = all.r2;
  f.kappa_hat = -all.slope / (1.0 - 2.0 * all.slope);
  f.t_begin = t[start];
  f.t_end = t[n - 1];
  f.flagged = !(f.kappa_hat > 0.0 && f.kappa_hat < 0.5);
  return f;
}

}  // namespace chns
