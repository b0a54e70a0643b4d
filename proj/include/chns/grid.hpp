#pragma once

// Uniform 2D MAC grid: cell-centered scalars, face-centered velocity, and the
// discrete operators built on them.
//
// Layout (i runs along x, j along y; storage is row-major with j outer):
//   scalar  s(i,j)   i in [0,nx),  j in [0,ny)     cell centers
//   u-face  u(i,j)   i in [0,nx],  j in [0,ny)     x = i*hx, vertical faces
//   v-face  v(i,j)   i in [0,nx),  j in [0,ny]     y = j*hy, horizontal faces
//
// Scalars satisfy homogeneous Neumann conditions through mirrored ghost cells,
// which is the same as setting the boundary-normal face gradient to zero.
// Velocities are no-slip: boundary-normal faces are held at exactly zero.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace chns {

struct GridSpec {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  double area() const { return lx * ly; }
  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t u_faces() const { return static_cast<std::size_t>(nx + 1) * ny; }
  std::size_t v_faces() const { return static_cast<std::size_t>(nx) * (ny + 1); }

  // Cell center coordinates.
  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }

  // Throws InvalidArgument unless nx, ny >= 4 and lx, ly > 0.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * grid_.nx + i;
  }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double c);

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

// Face-centered velocity (or any face vector field such as a gradient or a
// body force).
class MacVelocity {
 public:
  MacVelocity() = default;
  explicit MacVelocity(const GridSpec& g);

  const GridSpec& grid() const { return grid_; }

  double& u(int i, int j) { return u_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
  double u(int i, int j) const { return u_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
  double& v(int i, int j) { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double v(int i, int j) const { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }

  std::span<double> u_values() { return u_; }
  std::span<const double> u_values() const { return u_; }
  std::span<double> v_values() { return v_; }
  std::span<const double> v_values() const { return v_; }

  // Zero every boundary-normal face.
  void clamp_boundary();
  // Largest |value| over boundary-normal faces.
  double boundary_normal_max() const;

  MacVelocity& operator+=(const MacVelocity& o);
  MacVelocity& operator-=(const MacVelocity& o);
  MacVelocity& operator*=(double s);

  friend bool operator==(const MacVelocity&, const MacVelocity&) = default;

 private:
  GridSpec grid_{};
  std::vector<double> u_;
  std::vector<double> v_;
};

MacVelocity operator+(MacVelocity a, const MacVelocity& b);
MacVelocity operator-(MacVelocity a, const MacVelocity& b);
MacVelocity operator*(double s, MacVelocity a);

// ---------------------------------------------------------------------------
// Operators (OpenMP-parallel over rows). Reductions are accumulated per row and
// then summed in row order, so results do not depend on the thread count.

// Five-point Neumann Laplacian. Returns +Laplacian (not minus).
ScalarField laplacian_neumann(const ScalarField& f);

// Centered face differences; boundary-normal faces are zero.
MacVelocity grad_to_faces(const ScalarField& f);

// Per-cell flux balance divided by the cell area.
ScalarField div_faces(const MacVelocity& w);

// Conservative transport term div(w f) with centered face interpolation of f.
// Emits a warning diagnostic when max|div w| exceeds 10 * tau_div.
ScalarField advect_scalar(const MacVelocity& w, const ScalarField& f, double tau_div = 1e-8);

// Midpoint quadrature.
double integrate(const ScalarField& f);
double mean(const ScalarField& f);
double l2_inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double max_abs(const ScalarField& f);
double max_abs(const MacVelocity& w);

// Face inner product: every face carries the weight hx*hy. Boundary-normal
// faces are expected to be zero for at least one argument.
double face_inner(const MacVelocity& a, const MacVelocity& b);

// Discretely divergence-free face field from a stream function sampled at the
// cell corners: u = d(psi)/dy, v = -d(psi)/dx. When psi vanishes on the
// boundary the normal faces are exactly zero.
MacVelocity from_stream_function(const GridSpec& g, const std::function<double(double, double)>& psi);

// Field with the mean removed.
ScalarField zero_mean(const ScalarField& f);

// Throws InvalidArgument when the grids differ.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

// ---------------------------------------------------------------------------
// Straight serial loops over the same stencils, kept as the reference the
// parallel kernels are tested and benchmarked against.
namespace serial {

ScalarField laplacian_neumann(const ScalarField& f);
MacVelocity grad_to_faces(const ScalarField& f);
ScalarField div_faces(const MacVelocity& w);
ScalarField advect_scalar(const MacVelocity& w, const ScalarField& f);
double integrate(const ScalarField& f);
double l2_inner(const ScalarField& f, const ScalarField& g);

}  // namespace serial

}  // namespace chns
