#pragma once

// Fast invariant suite behind `chns check`: operator identities on random
// fields of the configured grid, the N round trip, the variational derivative
// of the free energy, and the mean laws over 20 steps of the configured run.
//
// Limits scale with the tolerance t (default 1e-10):
//   grad/div adjointness, Laplacian symmetry, dual-norm identity   t
//   N round trip (max norm, relative)                               100 t
//   free-energy derivative vs (mu, delta)                           1e4 t
//   phi mean law (relative), sigma mean drift (absolute)            10 t, t/10

#include <string>
#include <vector>

#include "chns/config.hpp"

namespace chns {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

std::vector<CheckResult> run_checks(const AppConfig& cfg);

}  // namespace chns
