#pragma once

// Navier-Stokes step on the MAC grid with phase-dependent viscosity and the
// capillary (Korteweg) force (mu + chi sigma) grad phi, followed by a Chorin
// projection onto discretely divergence-free, no-penetration fields.
//
// The viscous term is the negative gradient of the discrete dissipation
// functional
//
//   Phi(v) = sum_cells nu_c (D11^2 + D22^2) |cell| + sum_nodes 2 nu_n D12^2 w_n
//
// with D12 at cell corners, tangential no-slip through antisymmetric ghosts
// and trapezoid corner weights w_n (half on walls, a quarter at corners).
// Corner viscosity is the arithmetic mean of the adjacent cells. This makes
// -(viscous_force(v), v)_faces = integral of 2 nu |Dv|^2 exactly.

#include "chns/elliptic.hpp"
#include "chns/grid.hpp"
#include "chns/params.hpp"

namespace chns {

struct ProjectionReport {
  int pressure_iters = 0;
  double div_inf_norm = 0.0;
};

// nu(r) = nu1 (1 + r)/2 + nu2 (1 - r)/2 with r clamped to [-1, 1].
double viscosity(const ModelParams& p, double r);
ScalarField viscosity_field(const ScalarField& phi, const ModelParams& p);

// Face interpolation of (mu + chi sigma) times grad_to_faces(phi).
MacVelocity korteweg_force(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                           const ModelParams& p);

// div(2 nu D v) with cell-centered nu; zero on boundary-normal faces.
MacVelocity viscous_force(const MacVelocity& vel, const ScalarField& nu);
// Integral of 2 nu |Dv|^2.
double viscous_dissipation(const MacVelocity& vel, const ScalarField& nu);

// Conservative centered div(v v); does no work on divergence-free fields.
MacVelocity momentum_advection(const MacVelocity& vel);

// Leray projection: solves lap q = div(w)/dt and returns w - dt grad q.
MacVelocity project(const MacVelocity& w, double dt, const SolverConfig& cfg, ScalarField* pressure = nullptr,
                    ProjectionReport* report = nullptr);

struct NsStepResult {
  MacVelocity vel;
  ScalarField pressure;
  ProjectionReport report;
};

// Throws InvalidArgument when dt * max|v| / min(hx, hy) > 1.
NsStepResult ns_step(const MacVelocity& vel_n, const ScalarField& phi, const ScalarField& mu,
                     const ScalarField& sigma, const ModelParams& p, double dt, const SolverConfig& cfg = {});

namespace serial {

MacVelocity viscous_force(const MacVelocity& vel, const ScalarField& nu);
MacVelocity momentum_advection(const MacVelocity& vel);

}  // namespace serial

}  // namespace chns
