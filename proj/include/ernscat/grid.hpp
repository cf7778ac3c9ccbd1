// Characteristic strips and grid fields.  A strip is a (v, r) rectangle with
// a uniform advanced-time lattice and a radial lattice that may be graded
// toward the horizon so the self-similar scale (r - M) ~ 1/v stays resolved.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ernscat/geometry.hpp"

namespace ern {

struct ModeIndex {
  int ell = 0;
  ModeIndex() = default;
  explicit ModeIndex(int l) : ell(l) {
    if (l < 0) throw std::domain_error("ModeIndex: ell must be >= 0");
  }
  double eigenvalue() const { return static_cast<double>(ell) * (ell + 1); }
};

// Radial lattice: strictly increasing sample points.
struct RadialGrid {
  Eigen::ArrayXd r;

  int size() const { return static_cast<int>(r.size()); }
  double operator[](int j) const { return r[j]; }

  // Uniform grid on [r_min, r_max] with n points.
  static RadialGrid uniform(double r_min, double r_max, int n);

  // Horizon-graded grid: log-spaced offsets |r - M| from zeta_min out to
  // zeta_match on both sides of r = M (r = M is a grid point), continued
  // uniformly with spacing dr_far up to r_max.  zeta_in <= 0 disables the
  // interior part.
  static RadialGrid horizon_graded(double M, double zeta_in, double zeta_min,
                                   double zeta_match, double dr_far, double r_max,
                                   int per_decade);

  int index_of(double rq, double tol = 1e-9) const;  // exact grid point lookup
};

struct CharStrip {
  double v0 = 0.0;
  double vF = 0.0;
  double dv = 0.0;
  RadialGrid radial;
  std::optional<double> frak_t;  // spacelike read-off rule r >= M - frak_t / v

  int nv() const { return static_cast<int>(std::floor((vF - v0) / dv + 0.5)) + 1; }
  int nr() const { return radial.size(); }
  double v(int i) const { return v0 + i * dv; }
  double r(int j) const { return radial[j]; }

  void validate() const {
    if (!(v0 < vF) || !(dv > 0.0)) throw std::domain_error("CharStrip: need v0 < vF, dv > 0");
    if (radial.size() < 8) throw std::domain_error("CharStrip: radial grid too small");
    for (int j = 1; j < radial.size(); ++j)
      if (!(radial.r[j] > radial.r[j - 1]))
        throw std::domain_error("CharStrip: radial grid must increase strictly");
  }
};

// One spherical-harmonic mode of psi = r*phi on a strip, values[i][j] at
// (v_i, r_j), with an optional co-located source f (the equation
// inhomogeneity Box phi = f).
struct ModeField {
  CharStrip strip;
  ModeIndex mode;
  Eigen::ArrayXXd values;            // nv x nr
  std::optional<Eigen::ArrayXXd> source;

  void allocate() { values = Eigen::ArrayXXd::Zero(strip.nv(), strip.nr()); }
  double psi(int i, int j) const { return values(i, j); }
  double phi(int i, int j) const { return values(i, j) / strip.r(j); }
};

// Finite-difference weights for the m-th derivative at x0 from arbitrary
// nodes (Fornberg's recursion).
Eigen::ArrayXd fd_weights(double x0, const Eigen::ArrayXd& nodes, int order);

// m-th derivative of samples y on nodes x at node j, using a centered
// (or one-sided near the edges) stencil of the given width.
double fd_derivative(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, int j,
                     int order, int width);

// Local polynomial interpolation (barycentric Lagrange on `width` nearest
// nodes).  Nodes must increase strictly.
double lagrange_interp(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double xq,
                       int width = 6);

// Cumulative trapezoid of y over x, fixed to zero at index 0.
Eigen::ArrayXd cumtrapz(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

// Cumulative integral with per-interval cubic interpolation (4 nearest
// nodes); O(h^4) on smooth integrands, exact on cubics.
Eigen::ArrayXd cumint4(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

// Trapezoid integral of y over x.
double trapz(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

}  // namespace ern
