// Exact extremal Reissner-Nordstrom geometry: metric coefficients in the
// (v,r), (t,r), (u,r) and (t*,r) charts, tortoise and hyperboloidal time
// functions, the Couch-Torrence inversion, boundary defining functions and
// transport along the conformal scaling field.
//
// Everything is in geometric units with lengths measured in the mass M;
// M is kept as a parameter so that duality checks can exercise it.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace ern {

struct BlackHoleParams {
  double mass = 1.0;
  BlackHoleParams() = default;
  explicit BlackHoleParams(double m) : mass(m) {
    if (m < 0.0) throw std::domain_error("BlackHoleParams: mass must be >= 0 (0 = flat limit)");
  }
};

enum class Chart { VR, TR, UR, TSTAR_R };

// A spherically symmetric locus in one of the four charts.
struct ChartPoint {
  Chart chart = Chart::VR;
  double coord1 = 0.0;  // v, t, u or t* depending on chart
  double r = 1.0;
};

struct BoundaryWeights {
  double rho_I = 0.0;     // t*/r, vanishes at null infinity
  double rho_plus = 0.0;  // (r+t*)/(r t*), vanishes at timelike infinity
  double rho_K = 0.0;     // r^2/(1+(r-M)t*), vanishes at spatially compact infinity
  double rho_F = 0.0;     // (1+(r-M)t*)/(r t*), vanishes at the near-horizon face
  double rho_H = 0.0;     // t*(r-M), vanishes at the horizon
};

// D(r) = (1 - M/r)^2; double root at r = M.
double metric_D(double r, const BlackHoleParams& params);
// D'(r) = 2M(r-M)/r^3.
double metric_D_prime(double r, const BlackHoleParams& params);

// r_*(r) = r - M + M^2/(M-r) + 2M log(|r-M|/M), on either side of r = M.
// Satisfies dr_*/dr = 1/D.
double tortoise(double r, const BlackHoleParams& params);

enum class Branch { Exterior, Interior };

// Inverse of the tortoise function on the requested branch.
// Bracketing bisection seeded from the asymptotic branches, polished by
// Newton; |tortoise(r) - rstar| < 1e-12 * (1 + |rstar|).
double invert_tortoise(double rstar, Branch branch, const BlackHoleParams& params);

// Height function h(r) of the hyperboloidal time t* = v + h(r).
//   h = -(r - M)                  for r < 10M
//   h = -2 r_* - 1/log(r/M) + C   for r > 20M
// with the slopes blended by a fixed quintic weight on (10M, 20M).  The
// 1/log sign and the additive constant C are both forced by timelikeness
// of dt*; see data/h_blend.json for the recorded constants.
double tstar_height(double r, const BlackHoleParams& params);
double tstar_height_prime(double r, const BlackHoleParams& params);
// The far-branch additive constant C (scales with M).
double tstar_far_offset(const BlackHoleParams& params);

// t* evaluated at a point given in any chart.
double tstar(const ChartPoint& point, const BlackHoleParams& params);

// Convert a point between charts (exterior branch; r is shared).
ChartPoint convert(const ChartPoint& point, Chart target, const BlackHoleParams& params);

// g^{-1}(dt*, dt*) = h'(D h' + 2); negative everywhere (dt* timelike).
double tstar_conorm_sq(double r, const BlackHoleParams& params);

struct CouchTorrence {
  double r_image = 0.0;
  double omega = 0.0;  // conformal factor M/(r-M)
};

// The conformal inversion r -> M + M^2/(r-M) with weight Omega = M/(r-M).
// Involutive; maps r_* to -r_*; fixed sphere at r = 2M.
CouchTorrence couch_torrence(double r, const BlackHoleParams& params);

// In the (v,r) chart the inversion acts as (v,r) -> (v - 2 r_*(r), Phi(r)).
// Returns the image point in the VR chart.
ChartPoint couch_torrence_point(const ChartPoint& point, const BlackHoleParams& params);

// The five boundary defining functions at a point.  Throws for t* <= 0.
BoundaryWeights boundary_weights(const ChartPoint& point, const BlackHoleParams& params);

struct TransportResult {
  double value = 0.0;
  double tail_bound = 0.0;  // estimate of the truncated tail
  bool truncated = false;   // curve left the sampled region with a non-negligible integrand
};

// Primitive of f along the future integral curve of the conformal scaling
// field  T = u^2 du + v^2 dv.  The curve through (u,v) is
// { 1/u' - 1/v' = 1/u - 1/v, v' >= v }, swept with the curve parameter
// d(lambda) = dv'/v'^2, so that applying T to the returned primitive
// recovers f:   F(u,v) = -\int_v^{v_max} f(u'(v'), v') v'^{-2} dv'.
TransportResult conformal_transport(const std::function<double(double, double)>& f,
                                    double u, double v, double v_max,
                                    double step = 1e-2);

// Apply T = u^2 du + v^2 dv to a scalar function by central differences.
double apply_conformal_scaling(const std::function<double(double, double)>& F,
                               double u, double v, double h = 1e-4);

}  // namespace ern
