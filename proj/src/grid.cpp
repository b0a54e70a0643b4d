#include "chns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "chns/error.hpp"
#include "row_reduce.hpp"

namespace chns {

void GridSpec::validate() const {
  if (nx < 4 || ny < 4) {
    throw InvalidArgument("grid needs at least 4 cells per axis, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw InvalidArgument("grid side lengths must be positive and finite");
  }
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(std::string(what) + ": fields live on different grids");
}

// --- ScalarField -----------------------------------------------------------

ScalarField::ScalarField(const GridSpec& g, double fill) : grid_(g), values_(g.cells(), fill) {}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "ScalarField +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "ScalarField -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(double c) {
  for (double& x : values_) x += c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

// --- MacVelocity -----------------------------------------------------------

MacVelocity::MacVelocity(const GridSpec& g) : grid_(g), u_(g.u_faces(), 0.0), v_(g.v_faces(), 0.0) {}

void MacVelocity::clamp_boundary() {
  const int nx = grid_.nx, ny = grid_.ny;
  for (int j = 0; j < ny; ++j) {
    u(0, j) = 0.0;
    u(nx, j) = 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    v(i, 0) = 0.0;
    v(i, ny) = 0.0;
  }
}

double MacVelocity::boundary_normal_max() const {
  const int nx = grid_.nx, ny = grid_.ny;
  double m = 0.0;
  for (int j = 0; j < ny; ++j) m = std::max({m, std::abs(u(0, j)), std::abs(u(nx, j))});
  for (int i = 0; i < nx; ++i) m = std::max({m, std::abs(v(i, 0)), std::abs(v(i, ny))});
  return m;
}

MacVelocity& MacVelocity::operator+=(const MacVelocity& o) {
  require_same_grid(grid_, o.grid_, "MacVelocity +=");
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] += o.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

MacVelocity& MacVelocity::operator-=(const MacVelocity& o) {
  require_same_grid(grid_, o.grid_, "MacVelocity -=");
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] -= o.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

MacVelocity& MacVelocity::operator*=(double s) {
  for (double& x : u_) x *= s;
  for (double& x : v_) x *= s;
  return *this;
}

MacVelocity operator+(MacVelocity a, const MacVelocity& b) { return a += b; }
MacVelocity operator-(MacVelocity a, const MacVelocity& b) { return a -= b; }
MacVelocity operator*(double s, MacVelocity a) { return a *= s; }

// --- operators -------------------------------------------------------------

ScalarField laplacian_neumann(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  ScalarField out(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = f(i, j);
      // Face gradients; the boundary-normal ones vanish (mirrored ghost).
      const double gw = i > 0 ? (c - f(i - 1, j)) / hx : 0.0;
      const double ge = i < nx - 1 ? (f(i + 1, j) - c) / hx : 0.0;
      const double gs = j > 0 ? (c - f(i, j - 1)) / hy : 0.0;
      const double gn = j < ny - 1 ? (f(i, j + 1) - c) / hy : 0.0;
      out(i, j) = (ge - gw) / hx + (gn - gs) / hy;
    }
  }
  return out;
}

MacVelocity grad_to_faces(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  MacVelocity w(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= ny; ++j) {
    if (j < ny) {
      for (int i = 1; i < nx; ++i) w.u(i, j) = (f(i, j) - f(i - 1, j)) / hx;
    }
    if (j > 0 && j < ny) {
      for (int i = 0; i < nx; ++i) w.v(i, j) = (f(i, j) - f(i, j - 1)) / hy;
    }
  }
  return w;
}

ScalarField div_faces(const MacVelocity& w) {
  const GridSpec& g = w.grid();
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  ScalarField out(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      out(i, j) = (w.u(i + 1, j) - w.u(i, j)) / hx + (w.v(i, j + 1) - w.v(i, j)) / hy;
    }
  }
  return out;
}

ScalarField advect_scalar(const MacVelocity& w, const ScalarField& f, double tau_div) {
  require_same_grid(w.grid(), f.grid(), "advect_scalar");
  const GridSpec& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  ScalarField out(g);
  std::vector<double> row_div(ny, 0.0);

  // Face value of f: centered average inside, adjacent cell on the boundary.
  auto fx = [&](int i, int j) {
    if (i == 0) return f(0, j);
    if (i == nx) return f(nx - 1, j);
    return 0.5 * (f(i - 1, j) + f(i, j));
  };
  auto fy = [&](int i, int j) {
    if (j == 0) return f(i, 0);
    if (j == ny) return f(i, ny - 1);
    return 0.5 * (f(i, j - 1) + f(i, j));
  };

#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    double dmax = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double fe = w.u(i + 1, j) * fx(i + 1, j);
      const double fw = w.u(i, j) * fx(i, j);
      const double fn = w.v(i, j + 1) * fy(i, j + 1);
      const double fs = w.v(i, j) * fy(i, j);
      out(i, j) = (fe - fw) / hx + (fn - fs) / hy;
      const double d = (w.u(i + 1, j) - w.u(i, j)) / hx + (w.v(i, j + 1) - w.v(i, j)) / hy;
      dmax = std::max(dmax, std::abs(d));
    }
    row_div[j] = dmax;
  }
  const double div_inf = *std::max_element(row_div.begin(), row_div.end());
  if (div_inf > 10.0 * tau_div) {
    std::ostringstream msg;
    msg << "advect_scalar: transport field divergence " << div_inf << " exceeds 10*tau_div ("
        << 10.0 * tau_div << ")";
    warn(msg.str());
  }
  return out;
}

double integrate(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const int nx = g.nx;
  const double s = detail::row_reduce(g.ny, [&](int j) {
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) acc += f(i, j);
    return acc;
  });
  return s * g.cell_area();
}

double mean(const ScalarField& f) { return integrate(f) / f.grid().area(); }

double l2_inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "l2_inner");
  const GridSpec& gr = f.grid();
  const int nx = gr.nx;
  const double s = detail::row_reduce(gr.ny, [&](int j) {
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) acc += f(i, j) * g(i, j);
    return acc;
  });
  return s * gr.cell_area();
}

double l2_norm(const ScalarField& f) { return std::sqrt(l2_inner(f, f)); }

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const MacVelocity& w) {
  double m = 0.0;
  for (double x : w.u_values()) m = std::max(m, std::abs(x));
  for (double x : w.v_values()) m = std::max(m, std::abs(x));
  return m;
}

double face_inner(const MacVelocity& a, const MacVelocity& b) {
  require_same_grid(a.grid(), b.grid(), "face_inner");
  const GridSpec& g = a.grid();
  const int nx = g.nx, ny = g.ny;
  // Row j holds u-faces of row j (if j < ny) and v-faces of row j.
  const double s = detail::row_reduce(ny + 1, [&](int j) {
    double acc = 0.0;
    if (j < ny) {
      for (int i = 0; i <= nx; ++i) acc += a.u(i, j) * b.u(i, j);
    }
    for (int i = 0; i < nx; ++i) acc += a.v(i, j) * b.v(i, j);
    return acc;
  });
  return s * g.cell_area();
}

MacVelocity from_stream_function(const GridSpec& g, const std::function<double(double, double)>& psi) {
  const int nx = g.nx, ny = g.ny;
  std::vector<double> node(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) node[j * (nx + 1) + i] = psi(i * g.hx(), j * g.hy());
  auto at = [&](int i, int j) { return node[j * (nx + 1) + i]; };
  MacVelocity w(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) w.u(i, j) = (at(i, j + 1) - at(i, j)) / g.hy();
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) w.v(i, j) = -(at(i + 1, j) - at(i, j)) / g.hx();
  return w;
}

ScalarField zero_mean(const ScalarField& f) {
  ScalarField out = f;
  out += -mean(f);
  return out;
}

}  // namespace chns
