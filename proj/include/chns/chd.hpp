#pragma once

// One step of the convective Cahn-Hilliard-diffusion subsystem with a given,
// discretely divergence-free velocity:
//
//   (phi' - phi)/dt + div(v phi) = lap mu' - alpha (mean(phi') - c0)
//   mu' = -lap phi' + Psi0'(phi') - theta0 phi - chi sigma
//         + beta N(phi - mean(phi)) + gamma (phi' - phi)/dt
//   (sigma' - sigma)/dt + div(v sigma) = lap sigma' - chi lap phi'
//
// The convex part of the potential and the Oono mean term are implicit; the
// concave part, chemotaxis and the nonlocal term are lagged. The (phi', mu')
// system is solved by Newton's method with a step limiter that never lets a
// cell cover more than 90% of its distance to the barrier at +-1.

#include <optional>

#include "chns/elliptic.hpp"
#include "chns/grid.hpp"
#include "chns/params.hpp"
#include "chns/state.hpp"

namespace chns {

struct ChdStepReport {
  int newton_iters = 0;
  double newton_residual = 0.0;
  int linear_iters = 0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  int clipped_steps = 0;  // Newton updates shortened by the barrier limiter
};

struct NewtonConfig {
  int max_iter = 50;
  double tol = 1e-9;  // on max-norm residual, relative to 1 + ||rhs||
};

// Optional source terms (manufactured solutions), sampled at the new time level.
struct ChdSources {
  std::optional<ScalarField> phi;
  std::optional<ScalarField> sigma;
};

struct ChdOptions {
  SolverConfig solver{};
  NewtonConfig newton{};
  const ChdSources* sources = nullptr;
};

struct ChStepResult {
  ScalarField phi;
  ScalarField mu;
  ChdStepReport report;
};

// Coupled implicit (phi, mu) update. Throws SolverError if Newton stalls.
ChStepResult ch_step(const ScalarField& phi_n, const ScalarField& sigma_n, const MacVelocity& vel,
                     const ModelParams& p, double dt, const ChdOptions& opt = {});

// Implicit diffusion, explicit transport and cross-diffusion; mean preserved.
ScalarField sigma_step(const ScalarField& sigma_n, const ScalarField& phi_next, const MacVelocity& vel,
                       const ModelParams& p, double dt, const ChdOptions& opt = {});

// ch_step followed by sigma_step; advances phi, mu, sigma and t.
SimState chd_step(const SimState& s, const MacVelocity& vel, const ModelParams& p, double dt,
                  const ChdOptions& opt = {}, ChdStepReport* report = nullptr);

// Lagged part of the chemical potential: -theta0 phi - chi sigma + beta N(phi - mean phi).
ScalarField explicit_potential_part(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                                    const SolverConfig& cfg, int* linear_iters = nullptr);

// Full chemical potential -lap phi + Psi'(phi) - chi sigma + beta N(phi - mean phi).
ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                               const SolverConfig& cfg = {});

}  // namespace chns
