#include <cmath>
#include <numbers>
#include <random>

#include "chns/elliptic.hpp"
#include "chns/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace chns;
using namespace chns::testing;
using std::numbers::pi;

TEST_CASE("solver config validation") {
  CHECK_NOTHROW(SolverConfig{}.validate());
  CHECK_THROWS_AS((SolverConfig{1e-3, 0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((SolverConfig{0.0, 0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((SolverConfig{1e-8, -1}.validate()), InvalidArgument);
  CHECK(SolverConfig{}.iteration_cap(64) == 640);
}

TEST_CASE("N of zero is zero") {
  const GridSpec g{8, 8, 1.0, 1.0};
  CHECK(max_abs(inverse_neumann_laplacian(ScalarField(g))) == 0.0);
  CHECK(v0_norm_sq(ScalarField(g)) == 0.0);
}

TEST_CASE("N of a cosine mode uses the discrete eigenvalue") {
  const GridSpec g{32, 16, 3.0, 1.0};
  const ScalarField f = zero_mean(sample(g, [&](double x, double) { return std::cos(pi * x / g.lx); }));
  const ScalarField u = inverse_neumann_laplacian(f);
  const double lambda = 2.0 * (1.0 - std::cos(pi * g.hx() / g.lx)) / (g.hx() * g.hx());
  ScalarField expected = f;
  expected *= 1.0 / lambda;
  CHECK(max_diff(u, expected) < 1e-8 * max_abs(expected));
  // And the continuum value (lx/pi)^2 cos to second order.
  ScalarField continuum = f;
  continuum *= (g.lx / pi) * (g.lx / pi);
  CHECK(max_diff(u, continuum) < 0.01 * max_abs(continuum));
}

TEST_CASE("N round trip and mean") {
  std::mt19937_64 rng(4);
  for (int n : {8, 16, 40}) {
    const GridSpec g{n, n, 1.0, 1.5};
    const ScalarField u = random_zero_mean(g, rng);
    const ScalarField back = inverse_neumann_laplacian(-1.0 * laplacian_neumann(u));
    CHECK(max_diff(back, u) < 1e-8);
    CHECK(std::abs(mean(back)) < 1e-15);
  }
}

TEST_CASE("N rejects right-hand sides with a mean") {
  const GridSpec g{8, 8, 1.0, 1.0};
  ScalarField f = sample(g, [](double x, double y) { return x + y; });
  CHECK_THROWS_WITH_AS(inverse_neumann_laplacian(f), doctest::Contains("mean-incompatible"), InvalidArgument);
}

TEST_CASE("dual norm identities") {
  std::mt19937_64 rng(8);
  const GridSpec g{24, 20, 2.0, 1.0};
  const SolverConfig tight{1e-13, 0};
  for (int trial = 0; trial < 3; ++trial) {
    const ScalarField f = random_zero_mean(g, rng);
    const ScalarField nf = inverse_neumann_laplacian(f, tight);
    const MacVelocity gr = grad_to_faces(nf);
    CHECK(rel_diff(face_inner(gr, gr), l2_inner(f, nf)) < 1e-10);
    CHECK(rel_diff(v0_norm_sq(2.0 * f, tight), 4.0 * v0_norm_sq(f, tight)) < 1e-12);
    CHECK(v0_norm_sq(f) > 0.0);
  }
}

TEST_CASE("N is self-adjoint and positive") {
  std::mt19937_64 rng(12);
  const GridSpec g{16, 16, 1.0, 1.0};
  const SolverConfig tight{1e-13, 0};
  const ScalarField f = random_zero_mean(g, rng);
  const ScalarField h = random_zero_mean(g, rng);
  const double a = l2_inner(f, inverse_neumann_laplacian(h, tight));
  const double b = l2_inner(inverse_neumann_laplacian(f, tight), h);
  CHECK(rel_diff(a, b) < 1e-10);
  CHECK(l2_inner(f, inverse_neumann_laplacian(f)) > 0.0);
}

TEST_CASE("dense and iterative modes agree") {
  std::mt19937_64 rng(31);
  for (int n : {4, 8, 16}) {
    const GridSpec g{n, n, 1.0, 1.0};
    const ScalarField f = random_zero_mean(g, rng);
    const ScalarField it = inverse_neumann_laplacian(f, {1e-12, 0, SolverMode::iterative});
    const ScalarField de = inverse_neumann_laplacian(f, {1e-12, 0, SolverMode::dense});
    CHECK(max_diff(it, de) < 1e-8);
    // Independent dense pseudo-inverse.
    const ScalarField oracle = from_eigen(g, dense_inverse_neumann(g) * to_eigen(f));
    CHECK(max_diff(it, oracle) < 1e-9);
  }
}

TEST_CASE("solve_spd: identity converges in one iteration") {
  const GridSpec g{6, 6, 1.0, 1.0};
  std::mt19937_64 rng(2);
  const ScalarField rhs = random_field(g, rng);
  SolveStats st;
  const ScalarField x = solve_spd([](const ScalarField& f) { return f; }, rhs, {}, Kernel::none, &st);
  CHECK(st.iterations == 1);
  CHECK(max_diff(x, rhs) < 1e-14);
}

TEST_CASE("solve_spd: 4x4 Neumann system against a dense direct solve") {
  const GridSpec g{4, 4, 1.0, 1.0};
  std::mt19937_64 rng(17);
  const ScalarField rhs = random_zero_mean(g, rng);
  const ScalarField x = solve_spd([](const ScalarField& f) { return -1.0 * laplacian_neumann(f); }, rhs,
                                  {1e-12, 0}, Kernel::constants);
  CHECK(std::abs(mean(x)) < 1e-15);
  const Eigen::VectorXd direct = dense_inverse_neumann(g) * to_eigen(rhs);
  CHECK(max_diff(x, from_eigen(g, direct)) <= 1e-9);
}

TEST_CASE("solve_spd: kernel projection removes the mean of the right-hand side") {
  const GridSpec g{8, 8, 1.0, 1.0};
  std::mt19937_64 rng(5);
  ScalarField rhs = random_zero_mean(g, rng);
  ScalarField shifted = rhs;
  shifted += 3.0;
  auto op = [](const ScalarField& f) { return -1.0 * laplacian_neumann(f); };
  const ScalarField a = solve_spd(op, rhs, {}, Kernel::constants);
  const ScalarField b = solve_spd(op, shifted, {}, Kernel::constants);
  CHECK(std::abs(mean(b)) < 1e-14);
  CHECK(max_diff(a, b) < 1e-9);
}

TEST_CASE("solve_spd reports non-convergence") {
  const GridSpec g{32, 32, 1.0, 1.0};
  std::mt19937_64 rng(5);
  const ScalarField rhs = random_zero_mean(g, rng);
  auto op = [](const ScalarField& f) { return -1.0 * laplacian_neumann(f); };
  CHECK_THROWS_AS(solve_spd(op, rhs, {1e-10, 3}, Kernel::constants), SolverError);
}
