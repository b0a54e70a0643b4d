#pragma once

// Shared fixtures for the unit tests: seeded random fields and dense matrices
// assembled straight from the stencil definitions, independent of the
// matrix-free kernels they check.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "chns/grid.hpp"

namespace chns::testing {

inline ScalarField random_field(const GridSpec& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
  return f;
}

inline ScalarField random_zero_mean(const GridSpec& g, std::mt19937_64& rng) {
  return zero_mean(random_field(g, rng));
}

// Random face field with vanishing boundary-normal faces.
inline MacVelocity random_faces(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MacVelocity w(g);
  for (double& x : w.u_values()) x = d(rng);
  for (double& x : w.v_values()) x = d(rng);
  w.clamp_boundary();
  return w;
}

// Smooth divergence-free field with zero normal flux.
inline MacVelocity swirl(const GridSpec& g, double amp = 1.0) {
  const double lx = g.lx, ly = g.ly;
  return from_stream_function(g, [=](double x, double y) {
    return amp * std::sin(std::numbers::pi * x / lx) * std::sin(std::numbers::pi * y / ly);
  });
}

inline ScalarField sample(const GridSpec& g, auto&& fn) {
  ScalarField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = fn(g.xc(i), g.yc(j));
  return f;
}

inline Eigen::VectorXd to_eigen(const ScalarField& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t k = 0; k < f.size(); ++k) v[static_cast<Eigen::Index>(k)] = f[k];
  return v;
}

inline ScalarField from_eigen(const GridSpec& g, const Eigen::VectorXd& v) {
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = v[static_cast<Eigen::Index>(k)];
  return f;
}

// Dense Neumann Laplacian: every existing neighbor contributes +1/h^2
// off-diagonal and -1/h^2 on the diagonal.
inline Eigen::MatrixXd dense_neumann_laplacian(const GridSpec& g) {
  const int n = static_cast<int>(g.cells());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const double cx = 1.0 / (g.hx() * g.hx()), cy = 1.0 / (g.hy() * g.hy());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int k = j * g.nx + i;
      const int di[4] = {-1, 1, 0, 0};
      const int dj[4] = {0, 0, -1, 1};
      for (int q = 0; q < 4; ++q) {
        const int ii = i + di[q], jj = j + dj[q];
        if (ii < 0 || jj < 0 || ii >= g.nx || jj >= g.ny) continue;
        const double c = q < 2 ? cx : cy;
        m(k, jj * g.nx + ii) += c;
        m(k, k) -= c;
      }
    }
  }
  return m;
}

// Dense N on zero-mean data: pseudo-inverse of -L restricted to zero mean.
inline Eigen::MatrixXd dense_inverse_neumann(const GridSpec& g) {
  const Eigen::MatrixXd a = -dense_neumann_laplacian(g);
  const auto n = a.rows();
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - ones;
  return proj * (a + ones).inverse() * proj;
}

inline double rel_diff(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace chns::testing
