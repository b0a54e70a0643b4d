#include "chns/params.hpp"

#include <cmath>

#include "chns/error.hpp"

namespace chns {

void ModelParams::validate() const {
  if (!(nu1 > 0.0) || !(nu2 > 0.0)) throw InvalidArgument("violates (H1): viscosities nu1, nu2 must be > 0");
  if (!std::isfinite(chi)) throw InvalidArgument("violates (H3): chi must be a finite real number");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("violates (H3): alpha must be >= 0");
  if (!std::isfinite(beta)) throw InvalidArgument("violates (H3): beta must be a finite real number");
  if (!(c0 > -1.0 && c0 < 1.0)) throw InvalidArgument("violates (H3): c0 must lie in (-1, 1)");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma (viscous regularization) must be >= 0");
  potential.validate();
}

}  // namespace chns
