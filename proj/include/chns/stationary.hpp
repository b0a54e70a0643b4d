#pragma once

// Steady states of the coupled system and an algebraic decay-rate fit.
//
// At a steady state sigma - chi phi is constant, so sigma is eliminated as
// sigma = chi phi + (mean_sigma - chi mean_phi) and phi solves a
// mass-constrained Cahn-Hilliard equation with the extra concave term
// -chi^2 phi. It is found by running that reduced gradient flow to rest.

#include <optional>
#include <span>
#include <vector>

#include "chns/chd.hpp"
#include "chns/error.hpp"
#include "chns/grid.hpp"
#include "chns/params.hpp"

namespace chns {

struct StationaryConfig {
  double rel_tol = 1e-8;  // stop when max|zero-mean residual| <= rel_tol * theta0
  int max_iter = 20000;
  double sigma_mean = 0.0;          // mean of sigma to preserve
  std::optional<double> phi_mean;   // target when alpha = 0; defaults to the seed mean
  double dt_initial = 0.1;
  double dt_max = 100.0;
  SolverConfig solver{1e-13, 0};
  NewtonConfig newton{50, 1e-11};
};

struct Equilibrium {
  ScalarField phi_inf;
  ScalarField sigma_inf;
  double residual = 0.0;
  double mass_phi = 0.0;
  double mass_sigma = 0.0;
  double free_energy_at = 0.0;
  int iterations = 0;
};

class StationaryFailure : public SolverError {
 public:
  StationaryFailure(const std::string& what, int iterations, std::vector<double> history)
      : SolverError(what, iterations, history.empty() ? 0.0 : history.back()), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

// Zero-mean part of -lap phi + Psi'(phi) - chi sigma + beta N(phi - mean phi).
ScalarField stationary_residual(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                                const SolverConfig& cfg = {1e-13, 0});

// sigma = chi phi + (sigma_mean - chi mean(phi)).
ScalarField reduced_sigma(const ScalarField& phi, double sigma_mean, double chi);

Equilibrium solve_stationary(const ScalarField& seed_phi, const ModelParams& p, const StationaryConfig& cfg = {});

// |phi - psi|_{H^1 seminorm} + ||phi - psi||_{L^2}.
double h1_deficit(const ScalarField& phi, const ScalarField& psi);

struct RateFit {
  double kappa_hat = 0.0;
  double slope = 0.0;  // d log(deficit) / d log(1 + t)
  double r2 = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  bool flagged = false;  // kappa_hat outside (0, 1/2)
};

// Least-squares fit of log(deficit) against log(1 + t) on the last
// `tail_fraction` of the samples, and kappa = -m / (1 - 2m). Refuses (throws
// InvalidArgument) on non-positive or non-monotone tails and on tails that
// steepen by more than 25% between their halves, which no algebraic rate does.
RateFit rate_fit(std::span<const double> t, std::span<const double> deficit, double tail_fraction = 0.5);

}  // namespace chns
