#include "chns/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace chns {
namespace {

constexpr double kVelocityFloor = 1e-12;

double scenario_phi_mean(const RunConfig& cfg) { return cfg.scenario.phi_mean.value_or(cfg.params.c0); }

}  // namespace

void RunConfig::validate() const {
  grid.validate();
  params.validate();
  solver.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time.dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("time.t_end must be >= 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("time.cfl_safety must lie in (0, 1]");
  if (cadence < 1) throw ConfigError("output.cadence must be >= 1");
  if (newton.max_iter < 1 || !(newton.tol > 0.0)) throw ConfigError("solver Newton settings must be positive");

  const ScenarioConfig& s = scenario;
  const double m = scenario_phi_mean(*this);
  if (s.name == "spinodal") {
    if (!(s.noise >= 0.0)) throw ConfigError("scenario.noise must be >= 0");
    if (!(std::abs(m) + s.noise <= 1.0 - 1e-3))
      throw ConfigError("scenario: |phi_mean| + noise must not exceed 1 - 1e-3");
  } else if (s.name == "droplet") {
    if (s.radius && !(*s.radius > 0.0)) throw ConfigError("scenario.radius must be > 0");
  } else if (s.name == "drift") {
    if (!(std::abs(m) + 0.4 <= 1.0 - 1e-3)) throw ConfigError("scenario: drift needs |phi_mean| <= 0.599");
  } else if (s.name == "rest") {
    if (!(std::abs(m) < 1.0)) throw ConfigError("scenario.phi_mean must lie in (-1, 1)");
  } else {
    throw ConfigError("unknown scenario '" + s.name + "' (expected spinodal, droplet, drift or rest)");
  }
}

MacVelocity drift_velocity(const GridSpec& g, double amplitude) {
  using std::numbers::pi;
  const double lx = g.lx, ly = g.ly;
  return from_stream_function(
      g, [=](double x, double y) { return amplitude * std::sin(pi * x / lx) * std::sin(pi * y / ly); });
}

SimState initial_state(const RunConfig& cfg) {
  using std::numbers::pi;
  const GridSpec& g = cfg.grid;
  const ScenarioConfig& sc = cfg.scenario;
  const double m = scenario_phi_mean(cfg);
  SimState s(g);
  if (sc.name == "spinodal") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t k = 0; k < s.phi.size(); ++k) s.phi[k] = m + sc.noise * u(rng);
    for (std::size_t k = 0; k < s.sigma.size(); ++k) s.sigma[k] = sc.sigma_mean + sc.noise * u(rng);
  } else if (sc.name == "droplet") {
    const double r0 = sc.radius.value_or(0.25 * std::min(g.lx, g.ly));
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double r = std::hypot(g.xc(i) - 0.5 * g.lx, g.yc(j) - 0.5 * g.ly);
        s.phi(i, j) = 0.9 * std::tanh((r0 - r) / std::numbers::sqrt2);
      }
    }
    s.sigma = ScalarField(g, sc.sigma_mean);
  } else if (sc.name == "drift") {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.xc(i), y = g.yc(j);
        s.phi(i, j) = m + 0.4 * std::cos(pi * x / g.lx) * std::cos(pi * y / g.ly);
        s.sigma(i, j) = sc.sigma_mean + 0.3 * std::cos(2.0 * pi * x / g.lx);
      }
    }
    s.vel = drift_velocity(g, sc.amplitude);
  } else if (sc.name == "rest") {
    s.phi = ScalarField(g, m);
    s.sigma = ScalarField(g, sc.sigma_mean);
  } else {
    throw ConfigError("unknown scenario '" + sc.name + "'");
  }
  s.mu = chemical_potential(s.phi, s.sigma, cfg.params, cfg.solver);
  return s;
}

SimState coupled_step(const SimState& s, const ModelParams& p, double dt, const ChdOptions& opt, StepInfo* info) {
  StepInfo local;
  SimState next = chd_step(s, s.vel, p, dt, opt, &local.chd);
  NsStepResult ns = ns_step(s.vel, next.phi, next.mu, next.sigma, p, dt, opt.solver);
  next.vel = std::move(ns.vel);
  next.pressure = std::move(ns.pressure);
  next.step = s.step + 1;
  local.projection = ns.report;
  if (info) *info = local;
  return next;
}

double cfl_dt(const SimState& s, double base_dt, double safety) {
  const GridSpec& g = s.grid();
  const double vmax = std::max(max_abs(s.vel), kVelocityFloor);
  return std::min(base_dt, safety * std::min(g.hx(), g.hy()) / vmax);
}

RunResult run(const RunConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  return run_from(cfg, initial_state(cfg), observer);
}

RunResult run_from(const RunConfig& cfg, SimState start, const StepObserver& observer) {
  cfg.validate();
  require_same_grid(cfg.grid, start.grid(), "run");
  const ModelParams& p = cfg.params;
  const bool drift = cfg.prescribed_velocity();
  ChdOptions opt;
  opt.solver = cfg.solver;
  opt.newton = cfg.newton;

  RunResult res;
  SimState s = std::move(start);
  LedgerRow prev = make_row(s, p, 0, cfg.solver);
  res.ledger.append(prev);
  res.max_abs_phi = max_abs(s.phi);

  // Stop once the remaining time is below rounding of t_end.
  const double t_stop = cfg.t_end * (1.0 - 1e-12);
  while (s.t < t_stop) {
    const double dt = cfl_dt(s, std::min(cfg.dt, cfg.t_end - s.t), cfg.cfl_safety);
    SimState next;
    StepInfo info;
    double work = 0.0;
    try {
      if (drift) {
        next = chd_step(s, s.vel, p, dt, opt, &info.chd);
        next.step = s.step + 1;
        work = transport_work(s, next, s.vel, p, dt);
      } else {
        next = coupled_step(s, p, dt, opt, &info);
      }
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "step " << s.step + 1 << " (t = " << s.t << ", dt = " << dt << ") failed: " << e.what();
      const bool solver = dynamic_cast<const SolverError*>(&e) != nullptr;
      throw RunFailure(msg.str(), s.step + 1, s, solver);
    }

    LedgerRow row = make_row(next, p, info.chd.newton_iters, cfg.solver);
    row.bel_residual = bel_residual(prev, row, dt, BelTerms{drift, work});
    res.bel_abs_sum += std::abs(row.bel_residual);
    res.max_abs_phi = std::max(res.max_abs_phi, max_abs(next.phi));
    res.clipped_steps += info.chd.clipped_steps;
    res.newton_iters += info.chd.newton_iters;
    res.max_div = std::max(res.max_div, info.projection.div_inf_norm);

    s = std::move(next);
    prev = row;
    const bool last = !(s.t < t_stop);
    if (s.step % cfg.cadence == 0 || last) res.ledger.append(row);
    if (observer) observer(s, row);
  }
  res.final_state = std::move(s);
  return res;
}

}  // namespace chns
