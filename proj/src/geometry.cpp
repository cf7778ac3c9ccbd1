#include "ernscat/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ern {

double metric_D(double r, const BlackHoleParams& params) {
  if (params.mass == 0.0) {
    if (r < 0.0) throw std::domain_error("metric_D: r must be nonnegative");
    return 1.0;  // flat limit, valid down to the centre
  }
  if (r <= 0.0) throw std::domain_error("metric_D: r must be positive");
  const double x = 1.0 - params.mass / r;
  return x * x;
}

double metric_D_prime(double r, const BlackHoleParams& params) {
  if (params.mass == 0.0) {
    if (r < 0.0) throw std::domain_error("metric_D_prime: r must be nonnegative");
    return 0.0;
  }
  if (r <= 0.0) throw std::domain_error("metric_D_prime: r must be positive");
  const double M = params.mass;
  return 2.0 * M * (r - M) / (r * r * r);
}

double tortoise(double r, const BlackHoleParams& params) {
  if (r <= 0.0) throw std::domain_error("tortoise: r must be positive");
  const double M = params.mass;
  if (M == 0.0) return r;  // flat limit
  if (r == M) throw std::domain_error("tortoise: pole at r = M");
  return r - M + M * M / (M - r) + 2.0 * M * std::log(std::abs(r - M) / M);
}

double invert_tortoise(double rstar, Branch branch, const BlackHoleParams& params) {
  const double M = params.mass;
  if (M == 0.0) return rstar;
  if (!std::isfinite(rstar)) throw std::domain_error("invert_tortoise: rstar must be finite");

  // tortoise is increasing in r on both branches (dr_*/dr = 1/D > 0):
  // exterior covers all of R, interior covers (0, +inf) with the pole at
  // r -> M- and r_* -> 0 as r -> 0+.
  double lo, hi;
  if (branch == Branch::Exterior) {
    // Seeds: r ~ M + M^2/|r_*| deep down, r ~ r_* far out.
    lo = M + 0.5 * M * M / (1.0 + std::abs(rstar));
    while (tortoise(lo, params) > rstar) lo = M + 0.5 * (lo - M);
    hi = std::max(2.0 * M, rstar + 2.0 * M * std::log(std::max(rstar / M, 2.0)) + 4.0 * M);
    while (tortoise(hi, params) < rstar) hi *= 2.0;
  } else {
    lo = 1e-9 * M;
    if (tortoise(lo, params) > rstar)
      throw std::domain_error("invert_tortoise: rstar not attained on interior branch");
    hi = M - 1e-3 * M;
    while (tortoise(hi, params) < rstar) hi = M - 0.5 * (M - hi);
  }

  double a = lo, b = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (tortoise(mid, params) > rstar)
      b = mid;
    else
      a = mid;
    if (b - a < 1e-15 * (M + std::abs(mid))) break;
  }
  double r = 0.5 * (a + b);

  // Newton polish: dr_*/dr = 1/D.
  const double tol = 1e-12 * (1.0 + std::abs(rstar));
  for (int it = 0; it < 60; ++it) {
    const double f = tortoise(r, params) - rstar;
    if (std::abs(f) < tol) return r;
    const double step = -f * metric_D(r, params);
    double rn = r + step;
    if (rn <= a || rn >= b) rn = 0.5 * (a + b);  // fall back into the bracket
    if (tortoise(rn, params) > rstar)
      b = rn;
    else
      a = rn;
    r = rn;
  }
  if (std::abs(tortoise(r, params) - rstar) > 100 * tol)
    throw std::runtime_error("invert_tortoise: no convergence");
  return r;
}

namespace {

// Quintic smoothstep: w(0)=0, w(1)=1, first and second derivatives vanish
// at both ends.  Coefficients recorded in data/h_blend.json.
inline double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

inline double smoothstep5_prime(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

}  // namespace

// Far branch shape in units of M: -2 r_* - 1/log(rho), rho = r/M.
// An additive constant joins it to the near branch, see below.
static double h_far_shape(double rho) {
  const BlackHoleParams unit(1.0);
  return -2.0 * tortoise(rho, unit) - 1.0 / std::log(rho);
}

static double h_far_shape_prime(double rho) {
  const BlackHoleParams unit(1.0);
  const double lg = std::log(rho);
  return -2.0 / metric_D(rho, unit) + 1.0 / (rho * lg * lg);
}

// Blend of the SLOPES on (10M, 20M): dt* is timelike iff h' lies in the
// open interval (-2/D, 0), which contains both branch slopes pointwise, so
// a convex combination stays admissible.  A value blend does not work: the
// branches differ by ~41 M across the interval while a timelike h can fall
// by at most int 2/D dr ~ 23 M, so the far branch acquires a fixed additive
// constant instead.  The quintic weight and the constant are recorded in
// data/h_blend.json.
static double h_blend_prime(double rho) {
  const double w = smoothstep5((rho - 10.0) / 10.0);
  return (1.0 - w) * (-1.0) + w * h_far_shape_prime(rho);
}

namespace {

struct HBlendTable {
  static constexpr int N = 1201;
  double value[N];  // cumulative integral of h_blend_prime from rho = 10
  double offset;    // far-branch additive constant

  HBlendTable() {
    // Composite Simpson between table nodes.
    value[0] = 0.0;
    const double drho = 10.0 / (N - 1);
    for (int i = 1; i < N; ++i) {
      const double a = 10.0 + (i - 1) * drho;
      const double m = a + 0.5 * drho;
      const double b = a + drho;
      value[i] = value[i - 1] +
                 drho / 6.0 * (h_blend_prime(a) + 4.0 * h_blend_prime(m) + h_blend_prime(b));
    }
    offset = (-9.0 + value[N - 1]) - h_far_shape(20.0);
  }

  // Cubic Hermite using the analytic slope, so the interpolant is C^1 and
  // consistent with h_blend_prime to O(drho^4).
  double at(double rho) const {
    const double drho = 10.0 / (N - 1);
    const double x = (rho - 10.0) / drho;
    const int i = std::max(0, std::min(N - 2, static_cast<int>(x)));
    const double t = x - i;
    const double r0 = 10.0 + i * drho;
    const double y0 = value[i], y1 = value[i + 1];
    const double m0 = h_blend_prime(r0) * drho, m1 = h_blend_prime(r0 + drho) * drho;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  }
};

const HBlendTable& h_blend_table() {
  static const HBlendTable table;
  return table;
}

}  // namespace

double tstar_height(double r, const BlackHoleParams& params) {
  const double M = params.mass;
  if (M == 0.0) return 0.0;  // flat limit: t* = v
  if (r <= 0.0) throw std::domain_error("tstar_height: r must be positive");
  const double rho = r / M;
  if (rho <= 10.0) return -(r - M);
  if (rho >= 20.0) return M * (h_far_shape(rho) + h_blend_table().offset);
  return M * (-9.0 + h_blend_table().at(rho));
}

double tstar_height_prime(double r, const BlackHoleParams& params) {
  const double M = params.mass;
  if (M == 0.0) return 0.0;
  if (r <= 0.0) throw std::domain_error("tstar_height_prime: r must be positive");
  const double rho = r / M;
  if (rho <= 10.0) return -1.0;
  if (rho >= 20.0) return h_far_shape_prime(rho);
  return h_blend_prime(rho);
}

double tstar_far_offset(const BlackHoleParams& params) {
  return params.mass * h_blend_table().offset;
}

double tstar_conorm_sq(double r, const BlackHoleParams& params) {
  const double hp = tstar_height_prime(r, params);
  const double D = metric_D(r, params);
  return hp * (D * hp + 2.0);
}

ChartPoint convert(const ChartPoint& point, Chart target, const BlackHoleParams& params) {
  // Route through v.
  double v;
  switch (point.chart) {
    case Chart::VR: v = point.coord1; break;
    case Chart::TR: v = point.coord1 + tortoise(point.r, params); break;
    case Chart::UR: v = point.coord1 + 2.0 * tortoise(point.r, params); break;
    case Chart::TSTAR_R: v = point.coord1 - tstar_height(point.r, params); break;
  }
  ChartPoint out;
  out.chart = target;
  out.r = point.r;
  switch (target) {
    case Chart::VR: out.coord1 = v; break;
    case Chart::TR: out.coord1 = v - tortoise(point.r, params); break;
    case Chart::UR: out.coord1 = v - 2.0 * tortoise(point.r, params); break;
    case Chart::TSTAR_R: out.coord1 = v + tstar_height(point.r, params); break;
  }
  return out;
}

double tstar(const ChartPoint& point, const BlackHoleParams& params) {
  return convert(point, Chart::TSTAR_R, params).coord1;
}

CouchTorrence couch_torrence(double r, const BlackHoleParams& params) {
  const double M = params.mass;
  if (r <= M) throw std::domain_error("couch_torrence: requires r > M");
  CouchTorrence ct;
  ct.r_image = M + M * M / (r - M);
  ct.omega = M / (r - M);
  return ct;
}

ChartPoint couch_torrence_point(const ChartPoint& point, const BlackHoleParams& params) {
  const ChartPoint vr = convert(point, Chart::VR, params);
  const CouchTorrence ct = couch_torrence(vr.r, params);
  ChartPoint image;
  image.chart = Chart::VR;
  image.coord1 = vr.coord1 - 2.0 * tortoise(vr.r, params);  // t is preserved, r_* flips sign
  image.r = ct.r_image;
  return image;
}

BoundaryWeights boundary_weights(const ChartPoint& point, const BlackHoleParams& params) {
  const double M = params.mass;
  const double ts = tstar(point, params);
  const double r = point.r;
  if (ts <= 0.0) throw std::domain_error("boundary_weights: requires t* > 0");
  BoundaryWeights w;
  w.rho_I = ts / r;
  w.rho_plus = (r + ts) / (r * ts);
  w.rho_F = (1.0 + (r - M) * ts) / (r * ts);
  w.rho_K = r / (ts * w.rho_F);
  w.rho_H = ts * (r - M);
  return w;
}

TransportResult conformal_transport(const std::function<double(double, double)>& f,
                                    double u, double v, double v_max,
                                    double step) {
  if (v <= 0.0 || u == 0.0) throw std::domain_error("conformal_transport: needs v > 0, u != 0");
  const double c = 1.0 / u - 1.0 / v;

  // u'(v') along the curve; may leave the chart if c < 0 and 1/v' crosses -c.
  const auto u_of = [&](double vp) { return 1.0 / (c + 1.0 / vp); };

  // Composite Simpson on [v, v_max] of f(u'(v'), v') / v'^2.
  const int n0 = std::max(16, static_cast<int>(std::ceil((v_max - v) / step)));
  const int n = n0 + (n0 % 2);  // even panel count
  const double h = (v_max - v) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double vp = v + i * h;
    if (c < 0.0 && 1.0 / vp <= -c + 1e-14)
      throw std::domain_error("conformal_transport: curve leaves the u > 0 chart");
    const double g = f(u_of(vp), vp) / (vp * vp);
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += wgt * g;
  }
  TransportResult out;
  out.value = -acc * h / 3.0;

  // Tail estimate: |f| at the cut times the remaining curve-parameter length.
  const double f_end = std::abs(f(u_of(v_max), v_max));
  out.tail_bound = f_end / v_max;  // \int_{v_max}^\infty v'^{-2} dv' = 1/v_max
  out.truncated = f_end > 1e-300;
  return out;
}

double apply_conformal_scaling(const std::function<double(double, double)>& F,
                               double u, double v, double h) {
  const double du = h * std::max(1.0, std::abs(u));
  const double dv = h * std::max(1.0, std::abs(v));
  const double Fu = (F(u + du, v) - F(u - du, v)) / (2.0 * du);
  const double Fv = (F(u, v + dv) - F(u, v - dv)) / (2.0 * dv);
  return u * u * Fu + v * v * Fv;
}

}  // namespace ern
