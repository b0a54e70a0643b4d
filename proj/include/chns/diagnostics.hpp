#pragma once

// Energies, dissipation rates, mass and separation observables, and the
// per-step ledger built from them.

#include <cstddef>
#include <vector>

#include "chns/elliptic.hpp"
#include "chns/grid.hpp"
#include "chns/params.hpp"
#include "chns/state.hpp"

namespace chns {

// Integral of Psi(phi) + sigma^2/2 - chi sigma phi plus |grad phi|^2 / 2 on
// faces plus (beta/2) (u, N u) with u = phi - mean(phi).
double free_energy(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                   const SolverConfig& cfg = {});
double kinetic_energy(const MacVelocity& vel);
double total_energy(const SimState& s, const ModelParams& p, const SolverConfig& cfg = {});

struct Dissipation {
  double visc = 0.0;   // integral of 2 nu(phi) |Dv|^2
  double mu = 0.0;     // integral of |grad mu|^2
  double cross = 0.0;  // integral of |grad(sigma - chi phi)|^2
};
Dissipation dissipation(const SimState& s, const ModelParams& p);

// alpha (mean(phi) - c0) times the integral of mu.
double oono_work(const SimState& s, const ModelParams& p);
// (sum sigma^4 |cell|)^(1/4).
double sigma_l4(const ScalarField& sigma);
double separation_margin(const ScalarField& phi);

struct LedgerRow {
  long step = 0;
  double t = 0.0;
  double kinetic = 0.0;
  double free_energy = 0.0;
  double total_energy = 0.0;
  double diss_visc = 0.0;
  double diss_mu = 0.0;
  double diss_cross = 0.0;
  double oono_work = 0.0;
  double bel_residual = 0.0;
  double mean_phi = 0.0;
  double mean_sigma = 0.0;
  double sep_delta = 0.0;
  double div_inf = 0.0;
  double sigma_l4 = 0.0;
  int newton_iters = 0;

  friend bool operator==(const LedgerRow&, const LedgerRow&) = default;
};

// Every column except bel_residual, which needs the previous row.
LedgerRow make_row(const SimState& s, const ModelParams& p, int newton_iters = 0, const SolverConfig& cfg = {});

// Options for the discrete energy balance. With a prescribed velocity the
// kinetic energy is not evolved: viscous dissipation is left out and the work
// done by transport on phi and sigma is added instead.
struct BelTerms {
  bool prescribed_velocity = false;
  double transport_work = 0.0;
};

// R = (E' - E) + dt (diss_visc' + diss_mu' + diss_cross') + dt oono_work' [+ transport work].
double bel_residual(const LedgerRow& prev, const LedgerRow& next, double dt, const BelTerms& extra = {});

// dt [(mu', div(v phi)) + (sigma' - chi phi', div(v sigma))] for the transport
// terms of one CHD step taken from `prev` to `next` with velocity `vel`.
double transport_work(const SimState& prev, const SimState& next, const MacVelocity& vel, const ModelParams& p,
                      double dt);

// Append-only sequence of rows.
class EnergyLedger {
 public:
  void append(const LedgerRow& row) { rows_.push_back(row); }
  const std::vector<LedgerRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const LedgerRow& operator[](std::size_t k) const { return rows_[k]; }
  const LedgerRow& front() const { return rows_.front(); }
  const LedgerRow& back() const { return rows_.back(); }

  friend bool operator==(const EnergyLedger&, const EnergyLedger&) = default;

 private:
  std::vector<LedgerRow> rows_;
};

struct MassReport {
  // (mean_phi - c0) against (mean_phi(0) - c0) prod (1 + alpha dt_k)^-1.
  double phi_law_abs = 0.0;
  double phi_law_rel = 0.0;  // relative to the law's value; 0 when it vanishes
  double sigma_drift = 0.0;  // max |mean_sigma - mean_sigma(0)|
  long steps = 0;
};

// Step sizes are recovered from consecutive rows; a gap of m steps is treated
// as m equal steps.
MassReport mass_check(const EnergyLedger& series, const ModelParams& p);

struct SeparationReport {
  double window_start = 0.0;  // time at which the final window begins
  double min_delta = 0.0;     // smallest sep_delta inside the window
  double overall_min = 0.0;   // smallest sep_delta over the whole run
  // No row in the window falls below the running minimum of the rows before it
  // by more than `tol`, i.e. the running minimum stays at its window-start value.
  bool running_min_nondecreasing = true;
  std::size_t first_drop = 0;  // row index of the first violation (if any)
};

SeparationReport separation(const EnergyLedger& series, double window_fraction = 0.2, double tol = 1e-12);

}  // namespace chns
