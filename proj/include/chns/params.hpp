#pragma once

#include "chns/potential.hpp"

namespace chns {

// Physical coefficients. The interface-thickness parameter is fixed to one and
// the density of both fluids is one.
struct ModelParams {
  double nu1 = 1.0;  // viscosity of the phi = +1 fluid
  double nu2 = 1.0;  // viscosity of the phi = -1 fluid
  double chi = 0.0;  // chemotaxis / active transport
  double alpha = 0.0;
  double beta = 0.0;
  double c0 = 0.0;
  double gamma = 0.0;  // viscous Cahn-Hilliard regularization
  PotentialParams potential{};

  double nu_min() const { return nu1 < nu2 ? nu1 : nu2; }
  double nu_max() const { return nu1 < nu2 ? nu2 : nu1; }

  // Enforces nu1, nu2 > 0, alpha >= 0, c0 in (-1,1), gamma >= 0 and the
  // potential constraints. Messages name the violated hypothesis.
  void validate() const;
};

}  // namespace chns
