#include "chns/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "chns/error.hpp"
#include "row_reduce.hpp"

namespace chns {
namespace {

// Node viscosity: mean of the (up to four) cells touching node (i, j).
double node_nu(const ScalarField& nu, int i, int j) {
  const GridSpec& g = nu.grid();
  const int i0 = std::max(i - 1, 0), i1 = std::min(i, g.nx - 1);
  const int j0 = std::max(j - 1, 0), j1 = std::min(j, g.ny - 1);
  if (i0 != i1 && j0 != j1) return 0.25 * (nu(i0, j0) + nu(i1, j0) + nu(i0, j1) + nu(i1, j1));
  if (i0 != i1) return 0.5 * (nu(i0, j0) + nu(i1, j0));
  if (j0 != j1) return 0.5 * (nu(i0, j0) + nu(i0, j1));
  return nu(i0, j0);
}

// Shear rate D12 at node (i, j). Tangential velocity has an antisymmetric
// ghost across the wall, so the wall derivative is 2 u / h.
double node_d12(const MacVelocity& w, int i, int j) {
  const GridSpec& g = w.grid();
  double dudy = 0.0;
  if (i > 0 && i < g.nx) {
    const double below = j > 0 ? w.u(i, j - 1) : -w.u(i, 0);
    const double above = j < g.ny ? w.u(i, j) : -w.u(i, g.ny - 1);
    dudy = (above - below) / g.hy();
  }
  double dvdx = 0.0;
  if (j > 0 && j < g.ny) {
    const double left = i > 0 ? w.v(i - 1, j) : -w.v(0, j);
    const double right = i < g.nx ? w.v(i, j) : -w.v(g.nx - 1, j);
    dvdx = (right - left) / g.hx();
  }
  return 0.5 * (dudy + dvdx);
}

double node_weight(const GridSpec& g, int i, int j) {
  const double wx = (i == 0 || i == g.nx) ? 0.5 : 1.0;
  const double wy = (j == 0 || j == g.ny) ? 0.5 : 1.0;
  return wx * wy;
}

struct Stress {
  std::vector<double> t11, t22;  // cells, 2 nu D11 and 2 nu D22
  std::vector<double> t12;       // nodes (nx+1) x (ny+1), 2 nu D12
};

Stress stress(const MacVelocity& w, const ScalarField& nu) {
  const GridSpec& g = w.grid();
  const int nx = g.nx, ny = g.ny;
  Stress s{std::vector<double>(g.cells()), std::vector<double>(g.cells()),
           std::vector<double>(static_cast<std::size_t>(nx + 1) * (ny + 1))};
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      s.t11[k] = 2.0 * nu(i, j) * ((w.u(i + 1, j) - w.u(i, j)) / g.hx());
      s.t22[k] = 2.0 * nu(i, j) * ((w.v(i, j + 1) - w.v(i, j)) / g.hy());
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      s.t12[static_cast<std::size_t>(j) * (nx + 1) + i] = 2.0 * node_nu(nu, i, j) * node_d12(w, i, j);
  return s;
}

void check_cfl(const MacVelocity& vel, double dt) {
  const GridSpec& g = vel.grid();
  const double courant = dt * max_abs(vel) / std::min(g.hx(), g.hy());
  if (!(courant <= 1.0)) {
    std::ostringstream msg;
    msg << "ns_step: CFL violated, dt * max|v| / h = " << courant << " > 1";
    throw InvalidArgument(msg.str());
  }
}

std::size_t stacked_size(const GridSpec& g) { return g.u_faces() + g.v_faces(); }

void unstack(std::span<const double> in, MacVelocity& w) {
  const std::size_t nu = w.u_values().size();
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(nu), w.u_values().begin());
  std::copy(in.begin() + static_cast<std::ptrdiff_t>(nu), in.end(), w.v_values().begin());
}

void stack(const MacVelocity& w, std::span<double> out) {
  auto it = std::copy(w.u_values().begin(), w.u_values().end(), out.begin());
  std::copy(w.v_values().begin(), w.v_values().end(), it);
}

}  // namespace

double viscosity(const ModelParams& p, double r) {
  const double rc = std::clamp(r, -1.0, 1.0);
  return p.nu1 * (1.0 + rc) * 0.5 + p.nu2 * (1.0 - rc) * 0.5;
}

ScalarField viscosity_field(const ScalarField& phi, const ModelParams& p) {
  ScalarField nu(phi.grid());
  for (std::size_t k = 0; k < nu.size(); ++k) nu[k] = viscosity(p, phi[k]);
  return nu;
}

MacVelocity korteweg_force(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                           const ModelParams& p) {
  require_same_grid(mu.grid(), phi.grid(), "korteweg_force");
  require_same_grid(sigma.grid(), phi.grid(), "korteweg_force");
  const GridSpec& g = phi.grid();
  MacVelocity f = grad_to_faces(phi);
  auto w = [&](int i, int j) { return mu(i, j) + p.chi * sigma(i, j); };
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) f.u(i, j) *= 0.5 * (w(i - 1, j) + w(i, j));
#pragma omp parallel for schedule(static)
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.v(i, j) *= 0.5 * (w(i, j - 1) + w(i, j));
  return f;
}

MacVelocity viscous_force(const MacVelocity& vel, const ScalarField& nu) {
  require_same_grid(vel.grid(), nu.grid(), "viscous_force");
  const GridSpec& g = vel.grid();
  const int nx = g.nx, ny = g.ny;
  const Stress s = stress(vel, nu);
  auto t12 = [&](int i, int j) { return s.t12[static_cast<std::size_t>(j) * (nx + 1) + i]; };
  auto cell = [&](const std::vector<double>& t, int i, int j) { return t[static_cast<std::size_t>(j) * nx + i]; };
  MacVelocity f(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      f.u(i, j) = (cell(s.t11, i, j) - cell(s.t11, i - 1, j)) / g.hx() + (t12(i, j + 1) - t12(i, j)) / g.hy();
#pragma omp parallel for schedule(static)
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      f.v(i, j) = (cell(s.t22, i, j) - cell(s.t22, i, j - 1)) / g.hy() + (t12(i + 1, j) - t12(i, j)) / g.hx();
  return f;
}

double viscous_dissipation(const MacVelocity& vel, const ScalarField& nu) {
  require_same_grid(vel.grid(), nu.grid(), "viscous_dissipation");
  const GridSpec& g = vel.grid();
  const double cells = detail::row_reduce(g.ny, [&](int j) {
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double d11 = (vel.u(i + 1, j) - vel.u(i, j)) / g.hx();
      const double d22 = (vel.v(i, j + 1) - vel.v(i, j)) / g.hy();
      acc += 2.0 * nu(i, j) * (d11 * d11 + d22 * d22);
    }
    return acc;
  });
  const double nodes = detail::row_reduce(g.ny + 1, [&](int j) {
    double acc = 0.0;
    for (int i = 0; i <= g.nx; ++i) {
      const double d12 = node_d12(vel, i, j);
      acc += 4.0 * node_nu(nu, i, j) * d12 * d12 * node_weight(g, i, j);
    }
    return acc;
  });
  return (cells + nodes) * g.cell_area();
}

MacVelocity momentum_advection(const MacVelocity& vel) {
  const GridSpec& g = vel.grid();
  const int nx = g.nx, ny = g.ny;
  // (u at x-average)^2 at cells, (v at y-average)^2 at cells, and the corner
  // flux (u averaged in y)(v averaged in x); corners on walls carry no flux.
  auto uu = [&](int i, int j) {
    const double a = 0.5 * (vel.u(i, j) + vel.u(i + 1, j));
    return a * a;
  };
  auto vv = [&](int i, int j) {
    const double a = 0.5 * (vel.v(i, j) + vel.v(i, j + 1));
    return a * a;
  };
  auto uv = [&](int i, int j) {
    if (i == 0 || i == nx || j == 0 || j == ny) return 0.0;
    return 0.5 * (vel.u(i, j - 1) + vel.u(i, j)) * (0.5 * (vel.v(i - 1, j) + vel.v(i, j)));
  };
  MacVelocity a(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) a.u(i, j) = (uu(i, j) - uu(i - 1, j)) / g.hx() + (uv(i, j + 1) - uv(i, j)) / g.hy();
#pragma omp parallel for schedule(static)
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) a.v(i, j) = (uv(i + 1, j) - uv(i, j)) / g.hx() + (vv(i, j) - vv(i, j - 1)) / g.hy();
  return a;
}

MacVelocity project(const MacVelocity& w, double dt, const SolverConfig& cfg, ScalarField* pressure,
                    ProjectionReport* report) {
  if (!(dt > 0.0)) throw InvalidArgument("project: dt must be positive");
  ScalarField rhs = div_faces(w);
  rhs *= -1.0 / dt;
  // A loose pressure solve leaves a visible divergence; cap the tolerance.
  SolverConfig pcfg = cfg;
  pcfg.rel_tol = std::min(cfg.rel_tol, 1e-12);
  SolveStats st;
  const ScalarField q =
      solve_spd([](const ScalarField& f) { return -1.0 * laplacian_neumann(f); }, rhs, pcfg, Kernel::constants, &st);
  MacVelocity out = w;
  out -= dt * grad_to_faces(q);
  out.clamp_boundary();
  if (pressure) *pressure = q;
  if (report) {
    report->pressure_iters = st.iterations;
    report->div_inf_norm = max_abs(div_faces(out));
  }
  return out;
}

NsStepResult ns_step(const MacVelocity& vel_n, const ScalarField& phi, const ScalarField& mu,
                     const ScalarField& sigma, const ModelParams& p, double dt, const SolverConfig& cfg) {
  if (!(dt > 0.0)) throw InvalidArgument("ns_step: dt must be positive");
  require_same_grid(vel_n.grid(), phi.grid(), "ns_step");
  check_cfl(vel_n, dt);
  const GridSpec& g = phi.grid();

  // Explicit part: advection, the variable part nu - nu_min of the viscous
  // term, and the capillary force.
  ScalarField dnu = viscosity_field(phi, p);
  dnu += -p.nu_min();
  MacVelocity rhs = viscous_force(vel_n, dnu);
  rhs -= momentum_advection(vel_n);
  rhs += korteweg_force(mu, sigma, phi, p);
  rhs *= dt;
  rhs += vel_n;
  rhs.clamp_boundary();

  // (I - dt nu_min div 2D) v* = rhs.
  const ScalarField numin(g, p.nu_min());
  const std::size_t n = stacked_size(g);
  VectorOperator op = [&](std::span<const double> in, std::span<double> out) {
    // Boundary-normal unknowns decouple as identity rows so the operator
    // stays symmetric on the full stacked vector.
    MacVelocity x(g);
    unstack(in, x);
    MacVelocity walls = x;
    x.clamp_boundary();
    walls -= x;
    MacVelocity ax = viscous_force(x, numin);
    ax *= -dt;
    ax += x;
    ax += walls;
    stack(ax, out);
  };
  std::vector<double> b(n), x(n);
  stack(rhs, b);
  stack(vel_n, x);
  if (cfg.mode == SolverMode::dense) {
    dense_solve(op, b, x, Kernel::none);
  } else {
    conjugate_gradient(op, b, x, Kernel::none, cfg);
  }
  MacVelocity star(g);
  unstack(x, star);
  star.clamp_boundary();

  NsStepResult res{MacVelocity(g), ScalarField(g), {}};
  res.vel = project(star, dt, cfg, &res.pressure, &res.report);
  return res;
}

namespace serial {

MacVelocity viscous_force(const MacVelocity& vel, const ScalarField& nu) {
  const GridSpec& g = vel.grid();
  const int nx = g.nx, ny = g.ny;
  // Tangential velocity padded with antisymmetric ghosts.
  std::vector<double> up(static_cast<std::size_t>(nx + 1) * (ny + 2));
  std::vector<double> vp(static_cast<std::size_t>(nx + 2) * (ny + 1));
  auto U = [&](int i, int j) -> double& { return up[static_cast<std::size_t>(j + 1) * (nx + 1) + i]; };
  auto V = [&](int i, int j) -> double& { return vp[static_cast<std::size_t>(j) * (nx + 2) + i + 1]; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) U(i, j) = vel.u(i, j);
  for (int i = 0; i <= nx; ++i) {
    U(i, -1) = -vel.u(i, 0);
    U(i, ny) = -vel.u(i, ny - 1);
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) V(i, j) = vel.v(i, j);
    V(-1, j) = -vel.v(0, j);
    V(nx, j) = -vel.v(nx - 1, j);
  }

  std::vector<double> t11(g.cells()), t22(g.cells());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      t11[j * nx + i] = 2.0 * nu(i, j) * ((U(i + 1, j) - U(i, j)) / g.hx());
      t22[j * nx + i] = 2.0 * nu(i, j) * ((V(i, j + 1) - V(i, j)) / g.hy());
    }
  }
  std::vector<double> t12(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      double nun;
      const bool xin = i > 0 && i < nx, yin = j > 0 && j < ny;
      if (xin && yin) {
        nun = 0.25 * (nu(i - 1, j - 1) + nu(i, j - 1) + nu(i - 1, j) + nu(i, j));
      } else if (xin) {
        const int jj = j == 0 ? 0 : ny - 1;
        nun = 0.5 * (nu(i - 1, jj) + nu(i, jj));
      } else if (yin) {
        const int ii = i == 0 ? 0 : nx - 1;
        nun = 0.5 * (nu(ii, j - 1) + nu(ii, j));
      } else {
        nun = nu(i == 0 ? 0 : nx - 1, j == 0 ? 0 : ny - 1);
      }
      const double dudy = xin ? (U(i, j) - U(i, j - 1)) / g.hy() : 0.0;
      const double dvdx = yin ? (V(i, j) - V(i - 1, j)) / g.hx() : 0.0;
      t12[j * (nx + 1) + i] = 2.0 * nun * (0.5 * (dudy + dvdx));
    }
  }

  MacVelocity f(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      f.u(i, j) = (t11[j * nx + i] - t11[j * nx + i - 1]) / g.hx() +
                  (t12[(j + 1) * (nx + 1) + i] - t12[j * (nx + 1) + i]) / g.hy();
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      f.v(i, j) = (t22[j * nx + i] - t22[(j - 1) * nx + i]) / g.hy() +
                  (t12[j * (nx + 1) + i + 1] - t12[j * (nx + 1) + i]) / g.hx();
  return f;
}

MacVelocity momentum_advection(const MacVelocity& vel) {
  const GridSpec& g = vel.grid();
  const int nx = g.nx, ny = g.ny;
  std::vector<double> uu(g.cells()), vv(g.cells());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double a = 0.5 * (vel.u(i, j) + vel.u(i + 1, j));
      const double b = 0.5 * (vel.v(i, j) + vel.v(i, j + 1));
      uu[j * nx + i] = a * a;
      vv[j * nx + i] = b * b;
    }
  }
  std::vector<double> uv(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
  for (int j = 1; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      uv[j * (nx + 1) + i] = 0.5 * (vel.u(i, j - 1) + vel.u(i, j)) * (0.5 * (vel.v(i - 1, j) + vel.v(i, j)));

  MacVelocity a(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      a.u(i, j) = (uu[j * nx + i] - uu[j * nx + i - 1]) / g.hx() +
                  (uv[(j + 1) * (nx + 1) + i] - uv[j * (nx + 1) + i]) / g.hy();
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      a.v(i, j) = (uv[j * (nx + 1) + i + 1] - uv[j * (nx + 1) + i]) / g.hx() +
                  (vv[j * nx + i] - vv[(j - 1) * nx + i]) / g.hy();
  return a;
}

}  // namespace serial

}  // namespace chns
