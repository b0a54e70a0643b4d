#pragma once

#include "chns/grid.hpp"

namespace chns {

// Full time-stepping state (v, phi, mu, sigma, p) at time t.
struct SimState {
  MacVelocity vel;
  ScalarField phi;
  ScalarField mu;
  ScalarField sigma;
  ScalarField pressure;
  double t = 0.0;
  long step = 0;

  SimState() = default;
  explicit SimState(const GridSpec& g) : vel(g), phi(g), mu(g), sigma(g), pressure(g) {}

  const GridSpec& grid() const { return phi.grid(); }
};

}  // namespace chns
