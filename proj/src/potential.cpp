#include "chns/potential.hpp"

#include <cmath>
#include <string>

#include "chns/error.hpp"

namespace chns {
namespace {

// r ln r with the continuous extension 0 ln 0 = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void require_closed(double r) {
  if (!(std::abs(r) <= 1.0)) {
    throw DomainError("logarithmic potential evaluated outside [-1,1] at r = " + std::to_string(r));
  }
}

void require_open(double r) {
  if (!(std::abs(r) < 1.0)) {
    throw DomainError("logarithmic potential derivative evaluated at |r| >= 1, r = " + std::to_string(r));
  }
}

}  // namespace

void PotentialParams::validate() const {
  if (kind == PotentialKind::logarithmic) {
    if (!(theta > 0.0) || !(theta0 > theta)) {
      throw InvalidArgument("violates (H2): logarithmic potential needs 0 < theta < theta0");
    }
  } else if (!(theta0 > 1.0)) {
    throw InvalidArgument("violates (H2): quartic convex split needs theta0 > 1");
  }
}

double psi0(const PotentialParams& p, double r) {
  if (p.kind == PotentialKind::logarithmic) {
    require_closed(r);
    return 0.5 * p.theta * (xlogx(1.0 - r) + xlogx(1.0 + r)) + 0.5 * p.theta0;
  }
  const double r2 = r * r;
  return 0.25 * r2 * r2 + 0.5 * (p.theta0 - 1.0) * r2 + 0.25;
}

double psi(const PotentialParams& p, double r) {
  if (p.kind == PotentialKind::logarithmic) {
    require_closed(r);
    return 0.5 * p.theta * (xlogx(1.0 - r) + xlogx(1.0 + r)) + 0.5 * p.theta0 * (1.0 - r * r);
  }
  const double s = 1.0 - r * r;
  return 0.25 * s * s;
}

double psi0_prime(const PotentialParams& p, double r) {
  if (p.kind == PotentialKind::logarithmic) {
    require_open(r);
    // atanh(r) = (1/2) ln((1+r)/(1-r)), accurate near r = 0.
    return p.theta * std::atanh(r);
  }
  return r * r * r + (p.theta0 - 1.0) * r;
}

double psi_prime(const PotentialParams& p, double r) {
  if (p.kind == PotentialKind::logarithmic) return psi0_prime(p, r) - p.theta0 * r;
  return r * r * r - r;
}

double psi0_second(const PotentialParams& p, double r) {
  if (p.kind == PotentialKind::logarithmic) {
    require_open(r);
    return p.theta / ((1.0 - r) * (1.0 + r));
  }
  return 3.0 * r * r + (p.theta0 - 1.0);
}

const char* to_string(PotentialKind k) {
  return k == PotentialKind::logarithmic ? "logarithmic" : "quartic";
}

}  // namespace chns
