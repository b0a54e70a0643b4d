// Reference kernels: plain loops over a ghost-padded copy of the field. The
// arithmetic matches the parallel kernels operation for operation, so the two
// agree bit for bit.

#include <vector>

#include "chns/grid.hpp"

namespace chns::serial {
namespace {

// (nx+2) x (ny+2) copy with mirrored ghosts.
struct Padded {
  int nx, ny;
  std::vector<double> data;

  explicit Padded(const ScalarField& f) : nx(f.grid().nx), ny(f.grid().ny), data((nx + 2) * (ny + 2)) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) at(i, j) = f(i, j);
    for (int j = 0; j < ny; ++j) {
      at(-1, j) = at(0, j);
      at(nx, j) = at(nx - 1, j);
    }
    for (int i = -1; i <= nx; ++i) {
      at(i, -1) = at(i, 0);
      at(i, ny) = at(i, ny - 1);
    }
  }
  double& at(int i, int j) { return data[(j + 1) * (nx + 2) + (i + 1)]; }
  double at(int i, int j) const { return data[(j + 1) * (nx + 2) + (i + 1)]; }
};

}  // namespace

ScalarField laplacian_neumann(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const double hx = g.hx(), hy = g.hy();
  const Padded p(f);
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = p.at(i, j);
      const double gw = (c - p.at(i - 1, j)) / hx;
      const double ge = (p.at(i + 1, j) - c) / hx;
      const double gs = (c - p.at(i, j - 1)) / hy;
      const double gn = (p.at(i, j + 1) - c) / hy;
      out(i, j) = (ge - gw) / hx + (gn - gs) / hy;
    }
  }
  return out;
}

MacVelocity grad_to_faces(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const Padded p(f);
  MacVelocity w(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) w.u(i, j) = (p.at(i, j) - p.at(i - 1, j)) / g.hx();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w.v(i, j) = (p.at(i, j) - p.at(i, j - 1)) / g.hy();
  // Mirrored ghosts already give zero on the walls; make the signs canonical.
  w.clamp_boundary();
  return w;
}

ScalarField div_faces(const MacVelocity& w) {
  const GridSpec& g = w.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (w.u(i + 1, j) - w.u(i, j)) / g.hx() + (w.v(i, j + 1) - w.v(i, j)) / g.hy();
  return out;
}

ScalarField advect_scalar(const MacVelocity& w, const ScalarField& f) {
  const GridSpec& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  std::vector<double> fxu(g.u_faces()), fyv(g.v_faces());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double face = i == 0 ? f(0, j) : i == nx ? f(nx - 1, j) : 0.5 * (f(i - 1, j) + f(i, j));
      fxu[j * (nx + 1) + i] = w.u(i, j) * face;
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double face = j == 0 ? f(i, 0) : j == ny ? f(i, ny - 1) : 0.5 * (f(i, j - 1) + f(i, j));
      fyv[j * nx + i] = w.v(i, j) * face;
    }
  }
  ScalarField out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      out(i, j) = (fxu[j * (nx + 1) + i + 1] - fxu[j * (nx + 1) + i]) / g.hx() +
                  (fyv[(j + 1) * nx + i] - fyv[j * nx + i]) / g.hy();
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  const GridSpec& g = f.grid();
  double total = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += f(i, j);
    total += row;
  }
  return total * g.cell_area();
}

double l2_inner(const ScalarField& f, const ScalarField& h) {
  const GridSpec& g = f.grid();
  double total = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += f(i, j) * h(i, j);
    total += row;
  }
  return total * g.cell_area();
}

}  // namespace chns::serial
