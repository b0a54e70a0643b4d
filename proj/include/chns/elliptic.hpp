#pragma once

// Symmetric positive (semi)definite solves on grid functions: the inverse
// Neumann Laplacian on zero-mean fields, the dual norm it induces, and the
// conjugate-gradient solver shared by the pressure, diffusion and viscous
// solves.

#include <functional>
#include <span>
#include <vector>

#include "chns/grid.hpp"

namespace chns {

enum class SolverMode { iterative, dense };

struct SolverConfig {
  double rel_tol = 1e-10;
  int max_iter = 0;  // 0 -> 10 * (number of unknowns)
  SolverMode mode = SolverMode::iterative;

  void validate() const;
  int iteration_cap(std::size_t unknowns) const;
};

// Null space of the operator handed to the solver.
enum class Kernel { none, constants };

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // ||A x - b|| / ||b||
};

using VectorOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

// Conjugate gradients on plain vectors. x holds the initial guess on entry.
// With Kernel::constants the right-hand side, the iterates and the solution are
// kept orthogonal to constants. Throws SolverError when the cap is reached.
SolveStats conjugate_gradient(const VectorOperator& apply, std::span<const double> rhs,
                              std::span<double> x, Kernel kernel, const SolverConfig& cfg);

// Assemble the operator column by column and solve directly. Meant for small
// systems (test oracles).
SolveStats dense_solve(const VectorOperator& apply, std::span<const double> rhs, std::span<double> x,
                       Kernel kernel);

using ScalarOperator = std::function<ScalarField(const ScalarField&)>;

// Solve apply(x) = rhs. Dispatches on cfg.mode.
ScalarField solve_spd(const ScalarOperator& apply, const ScalarField& rhs, const SolverConfig& cfg,
                      Kernel kernel = Kernel::none, SolveStats* stats = nullptr);

// N f: the zero-mean u with -laplacian_neumann(u) = f. f must have zero mean
// up to 1e-10 * max|f|.
ScalarField inverse_neumann_laplacian(const ScalarField& f, const SolverConfig& cfg = {},
                                      SolveStats* stats = nullptr);

// (f, N f) = ||grad N f||^2 for zero-mean f.
double v0_norm_sq(const ScalarField& f, const SolverConfig& cfg = {});

}  // namespace chns
