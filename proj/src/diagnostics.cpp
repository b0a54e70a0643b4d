#include "chns/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "chns/error.hpp"
#include "chns/hydro.hpp"
#include "chns/potential.hpp"
#include "row_reduce.hpp"

namespace chns {

double free_energy(const ScalarField& phi, const ScalarField& sigma, const ModelParams& p,
                   const SolverConfig& cfg) {
  require_same_grid(phi.grid(), sigma.grid(), "free_energy");
  const GridSpec& g = phi.grid();
  const double bulk = detail::row_reduce(g.ny, [&](int j) {
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double r = phi(i, j), s = sigma(i, j);
      acc += psi(p.potential, r) + 0.5 * s * s - p.chi * s * r;
    }
    return acc;
  });
  const MacVelocity gr = grad_to_faces(phi);
  double f = bulk * g.cell_area() + 0.5 * face_inner(gr, gr);
  if (p.beta != 0.0) f += 0.5 * p.beta * v0_norm_sq(zero_mean(phi), cfg);
  return f;
}

double kinetic_energy(const MacVelocity& vel) { return 0.5 * face_inner(vel, vel); }

double total_energy(const SimState& s, const ModelParams& p, const SolverConfig& cfg) {
  return kinetic_energy(s.vel) + free_energy(s.phi, s.sigma, p, cfg);
}

Dissipation dissipation(const SimState& s, const ModelParams& p) {
  Dissipation d;
  d.visc = viscous_dissipation(s.vel, viscosity_field(s.phi, p));
  const MacVelocity gm = grad_to_faces(s.mu);
  d.mu = face_inner(gm, gm);
  const MacVelocity gc = grad_to_faces(s.sigma - p.chi * s.phi);
  d.cross = face_inner(gc, gc);
  return d;
}

double oono_work(const SimState& s, const ModelParams& p) {
  if (p.alpha == 0.0) return 0.0;
  return p.alpha * (mean(s.phi) - p.c0) * integrate(s.mu);
}

double sigma_l4(const ScalarField& sigma) {
  const GridSpec& g = sigma.grid();
  const double s4 = detail::row_reduce(g.ny, [&](int j) {
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double s2 = sigma(i, j) * sigma(i, j);
      acc += s2 * s2;
    }
    return acc;
  });
  return std::pow(s4 * g.cell_area(), 0.25);
}

double separation_margin(const ScalarField& phi) { return 1.0 - max_abs(phi); }

LedgerRow make_row(const SimState& s, const ModelParams& p, int newton_iters, const SolverConfig& cfg) {
  LedgerRow r;
  r.step = s.step;
  r.t = s.t;
  r.kinetic = kinetic_energy(s.vel);
  r.free_energy = free_energy(s.phi, s.sigma, p, cfg);
  r.total_energy = r.kinetic + r.free_energy;
  const Dissipation d = dissipation(s, p);
  r.diss_visc = d.visc;
  r.diss_mu = d.mu;
  r.diss_cross = d.cross;
  r.oono_work = oono_work(s, p);
  r.mean_phi = mean(s.phi);
  r.mean_sigma = mean(s.sigma);
  r.sep_delta = separation_margin(s.phi);
  r.div_inf = max_abs(div_faces(s.vel));
  r.sigma_l4 = sigma_l4(s.sigma);
  r.newton_iters = newton_iters;
  return r;
}

double bel_residual(const LedgerRow& prev, const LedgerRow& next, double dt, const BelTerms& extra) {
  const double visc = extra.prescribed_velocity ? 0.0 : next.diss_visc;
  return (next.total_energy - prev.total_energy) + dt * (visc + next.diss_mu + next.diss_cross) +
         dt * next.oono_work + extra.transport_work;
}

double transport_work(const SimState& prev, const SimState& next, const MacVelocity& vel, const ModelParams& p,
                      double dt) {
  const double w_phi = l2_inner(next.mu, advect_scalar(vel, prev.phi));
  const double w_sigma = l2_inner(next.sigma - p.chi * next.phi, advect_scalar(vel, prev.sigma));
  return dt * (w_phi + w_sigma);
}

MassReport mass_check(const EnergyLedger& series, const ModelParams& p) {
  if (series.empty()) throw InvalidArgument("mass_check: empty series");
  MassReport rep;
  const LedgerRow& first = series.front();
  double law = first.mean_phi - p.c0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const LedgerRow& a = series[k - 1];
    const LedgerRow& b = series[k];
    const long m = b.step - a.step;
    if (m > 0) {
      const double dt = (b.t - a.t) / static_cast<double>(m);
      for (long q = 0; q < m; ++q) law /= 1.0 + p.alpha * dt;
    }
    rep.steps = b.step - first.step;
    const double dev = std::abs((b.mean_phi - p.c0) - law);
    rep.phi_law_abs = std::max(rep.phi_law_abs, dev);
    if (law != 0.0) rep.phi_law_rel = std::max(rep.phi_law_rel, dev / std::abs(law));
    rep.sigma_drift = std::max(rep.sigma_drift, std::abs(b.mean_sigma - first.mean_sigma));
  }
  return rep;
}

SeparationReport separation(const EnergyLedger& series, double window_fraction, double tol) {
  if (series.empty()) throw InvalidArgument("separation: empty series");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw InvalidArgument("separation: window fraction must lie in (0, 1]");
  SeparationReport rep;
  const double t0 = series.front().t, t1 = series.back().t;
  rep.window_start = t1 - window_fraction * (t1 - t0);
  rep.overall_min = series.front().sep_delta;
  for (const LedgerRow& r : series.rows()) rep.overall_min = std::min(rep.overall_min, r.sep_delta);

  std::size_t start = 0;
  while (start + 1 < series.size() && series[start].t < rep.window_start) ++start;
  double running = series[start].sep_delta;
  rep.min_delta = running;
  for (std::size_t k = start + 1; k < series.size(); ++k) {
    const double d = series[k].sep_delta;
    if (d < running - tol && rep.running_min_nondecreasing) {
      rep.running_min_nondecreasing = false;
      rep.first_drop = k;
    }
    running = std::min(running, d);
    rep.min_delta = std::min(rep.min_delta, d);
  }
  return rep;
}

}  // namespace chns
