#pragma once

// Full system: per step, the Cahn-Hilliard-diffusion update with the lagged
// velocity, then the Navier-Stokes update with the new phi, mu and sigma.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "chns/chd.hpp"
#include "chns/diagnostics.hpp"
#include "chns/error.hpp"
#include "chns/hydro.hpp"
#include "chns/state.hpp"

namespace chns {

// Initial-data recipes.
//   spinodal  phi = phi_mean + noise U(-1,1), sigma = sigma_mean + noise U(-1,1), v = 0
//   droplet   phi = 0.9 tanh((radius - r)/sqrt 2) around the domain center
//   drift     smooth phi, sigma and a fixed stream-function velocity; only the
//             CHD subsystem is advanced
//   rest      uniform phi_mean, sigma_mean, v = 0
struct ScenarioConfig {
  std::string name = "spinodal";
  double noise = 0.05;
  std::optional<double> phi_mean;  // defaults to c0
  double sigma_mean = 0.0;
  std::optional<double> radius;  // droplet; defaults to a quarter of the shorter side
  double amplitude = 1.0;        // drift stream-function amplitude
};

struct RunConfig {
  GridSpec grid{32, 32, 32.0, 32.0};
  ModelParams params{};
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl_safety = 0.5;
  ScenarioConfig scenario{};
  std::uint64_t seed = 1;
  int cadence = 1;  // ledger row every `cadence` steps (and at the end)
  SolverConfig solver{};
  NewtonConfig newton{};

  // Grid, parameters, step control and scenario ranges. Throws ConfigError or
  // InvalidArgument.
  void validate() const;
  bool prescribed_velocity() const { return scenario.name == "drift"; }
};

SimState initial_state(const RunConfig& cfg);

// psi = amplitude sin(pi x/lx) sin(pi y/ly) on cell corners.
MacVelocity drift_velocity(const GridSpec& g, double amplitude);

struct StepInfo {
  ChdStepReport chd;
  ProjectionReport projection;
};

SimState coupled_step(const SimState& s, const ModelParams& p, double dt, const ChdOptions& opt = {},
                      StepInfo* info = nullptr);

// min(base_dt, safety min(hx, hy) / max(|v|_inf, 1e-12)).
double cfl_dt(const SimState& s, double base_dt, double safety);

struct RunResult {
  SimState final_state;
  EnergyLedger ledger;
  double bel_abs_sum = 0.0;    // sum over all steps of |R|
  double max_abs_phi = 0.0;    // over every step, including the initial state
  long clipped_steps = 0;      // total Newton limiter activations
  long newton_iters = 0;
  double max_div = 0.0;        // largest post-projection divergence
};

// Called after every step with the new state and its ledger row.
using StepObserver = std::function<void(const SimState&, const LedgerRow&)>;

// A step failed. Carries the index of the failing step and the last good state.
class RunFailure : public Error {
 public:
  RunFailure(const std::string& what, long step, SimState last_good, bool solver_failure)
      : Error(what), step_(step), state_(std::move(last_good)), solver_(solver_failure) {}
  long step() const { return step_; }
  const SimState& last_good() const { return state_; }
  bool solver_failure() const { return solver_; }

 private:
  long step_;
  SimState state_;
  bool solver_;
};

RunResult run(const RunConfig& cfg, const StepObserver& observer = {});
// Same, from a given starting state.
RunResult run_from(const RunConfig& cfg, SimState start, const StepObserver& observer = {});

}  // namespace chns
