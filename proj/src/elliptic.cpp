#include "chns/elliptic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "chns/error.hpp"

namespace chns {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void remove_mean(std::span<double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  const double m = s / static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw InvalidArgument("solver rel_tol must lie in (0, 1e-4]");
  if (max_iter < 0) throw InvalidArgument("solver max_iter must be >= 1 (or 0 for automatic)");
}

int SolverConfig::iteration_cap(std::size_t unknowns) const {
  return max_iter > 0 ? max_iter : static_cast<int>(10 * unknowns);
}

SolveStats conjugate_gradient(const VectorOperator& apply, std::span<const double> rhs,
                              std::span<double> x, Kernel kernel, const SolverConfig& cfg) {
  const std::size_t n = rhs.size();
  std::vector<double> b(rhs.begin(), rhs.end());
  if (kernel == Kernel::constants) {
    remove_mean(b);
    remove_mean(x);
  }
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0, 0.0};
  }
  const double target = cfg.rel_tol * bnorm;
  const int cap = cfg.iteration_cap(n);

  std::vector<double> r(n), p(n), ap(n);
  int it = 0;
  double rnorm = 0.0;
  // Restart from the true residual when the recurrence claims convergence but
  // the recomputed residual disagrees.
  for (int restart = 0; restart < 4; ++restart) {
    apply(x, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    if (kernel == Kernel::constants) remove_mean(r);
    double rr = dot(r, r);
    rnorm = std::sqrt(rr);
    if (rnorm <= target) return {it, rnorm / bnorm};
    p = r;
    while (it < cap) {
      apply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double a = rr / pap;
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += a * p[k];
        r[k] -= a * ap[k];
      }
      if (kernel == Kernel::constants) remove_mean(r);
      const double rr_new = dot(r, r);
      ++it;
      if (std::sqrt(rr_new) <= target) break;
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    }
    if (kernel == Kernel::constants) remove_mean(x);
    if (it >= cap) break;
  }
  apply(x, ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
  if (kernel == Kernel::constants) remove_mean(r);
  rnorm = std::sqrt(dot(r, r));
  if (rnorm <= target) return {it, rnorm / bnorm};
  std::ostringstream msg;
  msg << "conjugate gradient did not converge: relative residual " << rnorm / bnorm << " after " << it
      << " iterations (tolerance " << cfg.rel_tol << ")";
  throw SolverError(msg.str(), it, rnorm / bnorm);
}

SolveStats dense_solve(const VectorOperator& apply, std::span<const double> rhs, std::span<double> x,
                       Kernel kernel) {
  const auto n = static_cast<Eigen::Index>(rhs.size());
  Eigen::MatrixXd a(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    e[c] = 1.0;
    apply(e, col);
    e[c] = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) a(r, c) = col[r];
  }
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  if (kernel == Kernel::constants) {
    b.array() -= b.mean();
    // A + e e^T / n is definite and maps zero-mean solutions onto zero-mean data.
    a.array() += 1.0 / static_cast<double>(n);
  }
  Eigen::VectorXd sol = a.ldlt().solve(b);
  if (kernel == Kernel::constants) sol.array() -= sol.mean();
  Eigen::Map<Eigen::VectorXd>(x.data(), n) = sol;

  std::vector<double> ax(n);
  apply(x, ax);
  double rn = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) rn += (ax[k] - b[k]) * (ax[k] - b[k]);
  const double bn = b.norm();
  return {1, bn > 0.0 ? std::sqrt(rn) / bn : std::sqrt(rn)};
}

ScalarField solve_spd(const ScalarOperator& apply, const ScalarField& rhs, const SolverConfig& cfg,
                      Kernel kernel, SolveStats* stats) {
  const GridSpec& g = rhs.grid();
  VectorOperator op = [&](std::span<const double> in, std::span<double> out) {
    ScalarField f(g);
    std::copy(in.begin(), in.end(), f.values().begin());
    const ScalarField af = apply(f);
    std::copy(af.values().begin(), af.values().end(), out.begin());
  };
  ScalarField x(g);
  const SolveStats s = cfg.mode == SolverMode::dense ? dense_solve(op, rhs.values(), x.values(), kernel)
                                                     : conjugate_gradient(op, rhs.values(), x.values(), kernel, cfg);
  if (stats) *stats = s;
  return x;
}

ScalarField inverse_neumann_laplacian(const ScalarField& f, const SolverConfig& cfg, SolveStats* stats) {
  const double m = mean(f);
  const double scale = max_abs(f);
  // Roundoff left by zero_mean of a near-constant field is accepted.
  if (std::abs(m) > 1e-10 * scale && std::abs(m) > 1e-14) {
    std::ostringstream msg;
    msg << "inverse_neumann_laplacian: mean-incompatible right-hand side (mean " << m << ", max " << scale
        << ")";
    throw InvalidArgument(msg.str());
  }
  if (scale == 0.0) {
    if (stats) *stats = {};
    return ScalarField(f.grid());
  }
  ScalarOperator minus_lap = [](const ScalarField& u) { return -1.0 * laplacian_neumann(u); };
  ScalarField u = solve_spd(minus_lap, f, cfg, Kernel::constants, stats);
  u += -mean(u);
  return u;
}

double v0_norm_sq(const ScalarField& f, const SolverConfig& cfg) {
  return l2_inner(f, inverse_neumann_laplacian(f, cfg));
}

}  // namespace chns
