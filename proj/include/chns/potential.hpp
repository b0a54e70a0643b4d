#pragma once

// Homogeneous free energy density and its convex-concave split
//
//   Psi(r) = Psi0(r) - (theta0 / 2) r^2,   Psi0'' >= theta > 0.
//
// Logarithmic (Flory-Huggins):
//   Psi(r)  = theta/2 [(1-r) ln(1-r) + (1+r) ln(1+r)] + theta0/2 (1 - r^2),  |r| <= 1
//   Psi0(r) = theta/2 [(1-r) ln(1-r) + (1+r) ln(1+r)] + theta0/2
// Quartic double well:
//   Psi(r)  = (1 - r^2)^2 / 4
//   Psi0(r) = r^4/4 + (theta0 - 1)/2 r^2 + 1/4,  so Psi0'' >= theta0 - 1.
//
// Outside [-1, 1] the logarithmic potential is +infinity; here that is a
// DomainError.

namespace chns {

enum class PotentialKind { logarithmic, quartic };

struct PotentialParams {
  PotentialKind kind = PotentialKind::logarithmic;
  double theta = 1.0;
  double theta0 = 2.0;

  // Lower bound of Psi0'' on the admissible range.
  double convexity_bound() const { return kind == PotentialKind::logarithmic ? theta : theta0 - 1.0; }

  // Logarithmic: 0 < theta < theta0. Quartic: theta0 > 1.
  void validate() const;
};

double psi(const PotentialParams& p, double r);
double psi0(const PotentialParams& p, double r);
double psi_prime(const PotentialParams& p, double r);
double psi0_prime(const PotentialParams& p, double r);
double psi0_second(const PotentialParams& p, double r);

const char* to_string(PotentialKind k);

}  // namespace chns
