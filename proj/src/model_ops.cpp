#include "ernscat/model_ops.hpp"

#include <cmath>

namespace ern {

void RadialProfile::validate() const {
  if (grid.size() != values.size() || grid.size() < 8)
    throw std::domain_error("RadialProfile: grid/value size mismatch or too small");
  for (int i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::domain_error("RadialProfile: grid must increase strictly");
  if (!values.isFinite().all()) throw std::domain_error("RadialProfile: non-finite values");
}

double RadialProfile::operator()(double x) const {
  const int n = static_cast<int>(grid.size());
  if (x >= grid[0] && x <= grid[n - 1]) return lagrange_interp(grid, values, x, 6);
  if (x > grid[n - 1]) {
    // Power-law continuation pinned to the endpoint value.
    const DecayFit f = tail_fit();
    return values[n - 1] * std::pow(x / grid[n - 1], -f.exponent);
  }
  // Smooth polynomial extension below the table: least-squares quartic over
  // the first points, so a profile analytic at the left edge (for instance a
  // similarity profile across the horizon) continues without a kink.
  const int m = std::min(14, n);
  Eigen::MatrixXd A(m, 5);
  Eigen::VectorXd b(m);
  const double x0 = grid[0], scale = grid[m - 1] - grid[0];
  for (int i = 0; i < m; ++i) {
    const double t = (grid[i] - x0) / scale;
    double pw = 1.0;
    for (int c = 0; c < 5; ++c) {
      A(i, c) = pw;
      pw *= t;
    }
    b[i] = values[i];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  const double t = (x - x0) / scale;
  double acc = 0.0, pw = 1.0;
  for (int c = 0; c < 5; ++c) {
    acc += coef[c] * pw;
    pw *= t;
  }
  return acc;
}

double RadialProfile::derivative(double x) const {
  const int n = static_cast<int>(grid.size());
  int j = static_cast<int>(std::lower_bound(grid.data(), grid.data() + n, x) - grid.data());
  j = std::max(0, std::min(j, n - 1));
  return fd_derivative(grid, values, j, 1, 5);
}

DecayFit RadialProfile::tail_fit(double frac) const {
  const int n = static_cast<int>(grid.size());
  const int lo = static_cast<int>(n * (1.0 - frac));
  Eigen::ArrayXd x = grid.segment(lo, n - lo);
  Eigen::ArrayXd y = values.segment(lo, n - lo);
  try {
    return fit_decay(x, y, FitKind::PurePower);
  } catch (const std::domain_error&) {
    DecayFit f;  // short tail: fall back to two-point slope
    const double x0 = grid[lo], x1 = grid[n - 1];
    const double y0 = std::abs(values[lo]) + 1e-300, y1 = std::abs(values[n - 1]) + 1e-300;
    f.exponent = -std::log(y1 / y0) / std::log(x1 / x0);
    f.amplitude = y1 * std::pow(x1, f.exponent);
    return f;
  }
}

DecayFit RadialProfile::head_fit(double x0, double frac) const {
  const int n = static_cast<int>(grid.size());
  const int hi = std::max(8, static_cast<int>(n * frac));
  Eigen::ArrayXd x(hi), y(hi);
  for (int i = 0; i < hi; ++i) {
    x[i] = 1.0 / (grid[i] - x0);  // fit against 1/(x - x0) so "decay" = growth bound
    y[i] = values[i];
  }
  std::reverse(x.data(), x.data() + hi);
  std::reverse(y.data(), y.data() + hi);
  try {
    return fit_decay(x, y, FitKind::PurePower);
  } catch (const std::domain_error&) {
    DecayFit f;
    const double l0 = grid[0] - x0, l1 = grid[hi - 1] - x0;
    const double y0 = std::abs(values[0]) + 1e-300, y1 = std::abs(values[hi - 1]) + 1e-300;
    f.exponent = std::log(y1 / y0) / std::log(l1 / l0);  // exponent of (x-x0)^p
    return f;
  }
}

namespace {

// Head/tail corrections for integrals against fitted power laws.
double power_tail_integral(double A, double p, double x_from) {
  // int_{x_from}^inf A x^{-p} dx, p > 1
  if (p <= 1.0001) return A * std::pow(x_from, 1.0 - p) * 10.0;  // crude bound
  return A * std::pow(x_from, 1.0 - p) / (p - 1.0);
}

}  // namespace

RadialProfile invert_K(const RadialProfile& f, ModeIndex mode, const DecayWindow& window,
                       const BlackHoleParams& params, bool check_tails) {
  f.validate();
  if (f.variable != RadialVariable::R)
    throw std::domain_error("invert_K: source profile must be sampled in r");
  const double M = params.mass;
  const int n = static_cast<int>(f.grid.size());
  if (!(f.grid[0] > M)) throw std::domain_error("invert_K: grid must lie in r > M");

  if (check_tails) {
    const DecayFit tail = f.tail_fit();
    if (std::abs(f.values[n - 1]) > 1e-14 * f.values.abs().maxCoeff() &&
        tail.exponent < 2.0 + window.a_plus - 0.2)
      throw std::domain_error("invert_K: source tail exponent " +
                              std::to_string(tail.exponent) + " below 2 + a_plus");
    const DecayFit head = f.head_fit(M);
    if (std::abs(f.values[0]) > 1e-14 * f.values.abs().maxCoeff() &&
        head.exponent < window.a_F - 0.2)
      throw std::domain_error("invert_K: source grows faster than (r-M)^{a_F} at the horizon");
  }

  const int L = mode.ell;
  const Eigen::ArrayXd x = f.grid - M;
  Eigen::ArrayXd u1(n), u2(n);

  if (L == 0) {
    u1.setOnes();
    u2 = x.inverse();
  } else {
    // Two-sided shooting with Frobenius-seeded asymptotics: u1 ~ x^l from
    // the horizon, u2 ~ x^{-l-1} from the far end; RK4 between grid nodes.
    const double lam = static_cast<double>(L) * (L + 1);
    const auto rhs = [lam](double xx, double u, double up, double& du, double& dup) {
      du = up;
      dup = (lam * u - 2.0 * xx * up) / (xx * xx);
    };
    const auto rk4_to = [&](double& u, double& up, double x0, double x1) {
      const int sub = 8;
      const double h = (x1 - x0) / sub;
      for (int s = 0; s < sub; ++s) {
        const double xa = x0 + s * h;
        double k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p;
        rhs(xa, u, up, k1u, k1p);
        rhs(xa + 0.5 * h, u + 0.5 * h * k1u, up + 0.5 * h * k1p, k2u, k2p);
        rhs(xa + 0.5 * h, u + 0.5 * h * k2u, up + 0.5 * h * k2p, k3u, k3p);
        rhs(xa + h, u + h * k3u, up + h * k3p, k4u, k4p);
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        up += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      }
    };
    {
      double u = std::pow(x[0], L), up = L * std::pow(x[0], L - 1);
      u1[0] = u;
      for (int i = 1; i < n; ++i) {
        rk4_to(u, up, x[i - 1], x[i]);
        u1[i] = u;
        if (std::abs(u) > 1e200) throw std::runtime_error("invert_K: shooting overflow");
      }
    }
    {
      double u = std::pow(x[n - 1], -L - 1), up = -(L + 1) * std::pow(x[n - 1], -L - 2);
      u2[n - 1] = u;
      for (int i = n - 2; i >= 0; --i) {
        rk4_to(u, up, x[i + 1], x[i]);
        u2[i] = u;
        if (std::abs(u) > 1e200) throw std::runtime_error("invert_K: shooting overflow");
      }
    }
  }

  // Wronskian x^2 (u1 u2' - u1' u2), constant for the homogeneous equation;
  // evaluate near r = 2M by stencils and use the median for robustness.
  Eigen::ArrayXd W(n);
  for (int i = 0; i < n; ++i) {
    const double u1p = fd_derivative(x, u1, i, 1, 5);
    const double u2p = fd_derivative(x, u2, i, 1, 5);
    W[i] = x[i] * x[i] * (u1[i] * u2p - u1p * u2[i]);
  }
  std::vector<double> ws(W.data(), W.data() + n);
  std::nth_element(ws.begin(), ws.begin() + n / 2, ws.end());
  const double wr = ws[n / 2];
  if (std::abs(wr) < 1e-300) throw std::runtime_error("invert_K: degenerate Wronskian");

  // Green's function solution by cumulative quadrature.
  const Eigen::ArrayXd g = f.grid * f.grid * f.values;  // s^2 f
  const Eigen::ArrayXd I1 = cumint4(f.grid, (u1 * g).eval());
  Eigen::ArrayXd I2rev = cumint4(f.grid, (u2 * g).eval());
  const double I2tot = I2rev[n - 1];

  // Head correction of int_M^{r} u1 s^2 f: f ~ (r-M)^{aF} with u1 ~ x^l.
  double head = 0.0;
  if (std::abs(f.values[0]) > 1e-14 * f.values.abs().maxCoeff()) {
    const double aF = f.head_fit(M).exponent;
    const double p = L + aF;
    if (p > -1.0) head = u1[0] * g[0] * x[0] / (p + 1.0);
  }
  // Tail correction of int_r^inf u2 s^2 f.
  double tail = 0.0;
  if (std::abs(f.values[n - 1]) > 1e-14 * f.values.abs().maxCoeff()) {
    const DecayFit tf = f.tail_fit();
    const double integrand_p = tf.exponent - 2.0 + (L + 1);  // u2 s^2 f ~ s^{-p}
    tail = power_tail_integral(std::abs(u2[n - 1] * g[n - 1]) * std::pow(f.grid[n - 1], integrand_p),
                               integrand_p, f.grid[n - 1]) *
           ((u2[n - 1] * g[n - 1]) >= 0 ? 1.0 : -1.0);
  }

  RadialProfile phi;
  phi.grid = f.grid;
  phi.variable = RadialVariable::R;
  phi.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double inner = head + I1[i];
    const double outer = (I2tot - I2rev[i]) + tail;
    phi.values[i] = (u2[i] * inner + u1[i] * outer) / wr;
  }
  return phi;
}

RadialProfile apply_K(const RadialProfile& phi, ModeIndex mode, const BlackHoleParams& params) {
  phi.validate();
  const double M = params.mass;
  const double L = mode.eigenvalue();
  const int n = static_cast<int>(phi.grid.size());
  RadialProfile out;
  out.grid = phi.grid;
  out.variable = RadialVariable::R;
  out.values = Eigen::ArrayXd::Zero(n);
  // (D r^2 phi')' / r^2 - L phi / r^2 with D r^2 = (r-M)^2.
  Eigen::ArrayXd flux(n);
  for (int i = 0; i < n; ++i) {
    const double x = phi.grid[i] - M;
    flux[i] = x * x * fd_derivative(phi.grid, phi.values, i, 1, 5);
  }
  for (int i = 0; i < n; ++i) {
    const double r = phi.grid[i];
    out.values[i] = (fd_derivative(phi.grid, flux, i, 1, 5) - L * phi.values[i]) / (r * r);
  }
  return out;
}

double similarity_homogeneous_value(double p, double rfrak) {
  if (p <= 0.0) throw std::domain_error("similarity_homogeneous: p must be positive");
  if (rfrak < 0.0) throw std::domain_error("similarity_homogeneous: rfrak >= 0");
  if (rfrak == 0.0) return -1.0 / (2.0 * p);
  return (std::pow(rfrak / (rfrak + 2.0), p) - 1.0) / (2.0 * p);
}

double similarity_homogeneous_slope(double p, double rfrak) {
  return std::pow(rfrak, p - 1.0) * std::pow(rfrak + 2.0, -(1.0 + p));
}

SimilaritySolution similarity_homogeneous(double p, const Eigen::ArrayXd& rfrak_grid) {
  SimilaritySolution sol;
  sol.leading_power = p;
  sol.smooth_at_horizon = std::abs(p - std::round(p)) < 1e-12;
  sol.first_integral_const = 1.0;
  sol.profile.variable = RadialVariable::SIMILARITY;
  sol.profile.grid = rfrak_grid;
  sol.profile.values.resize(rfrak_grid.size());
  for (int i = 0; i < rfrak_grid.size(); ++i)
    sol.profile.values[i] = similarity_homogeneous_value(p, rfrak_grid[i]);
  return sol;
}

SimilaritySolution invert_F_similarity(double p, const RadialProfile& g, ModeIndex mode) {
  if (p <= 0.0) throw std::domain_error("invert_F_similarity: p must be positive");
  if (mode.ell != 0)
    throw std::domain_error("invert_F_similarity: explicit path is l = 0 only");
  g.validate();
  if (g.variable != RadialVariable::SIMILARITY)
    throw std::domain_error("invert_F_similarity: source must be sampled in rfrak");

  const int n = static_cast<int>(g.grid.size());
  const Eigen::ArrayXd& s = g.grid;

  // G(rfrak) = int_0^rfrak g, head below the table by linear extrapolation.
  Eigen::ArrayXd G = cumint4(s, g.values);
  const double head = 0.5 * s[0] * (g.values[0] + (*(&g))(0.5 * s[0]));
  G += head;

  // Decaying normalisation: const = -G(inf).
  double Ginf = G[n - 1];
  if (std::abs(g.values[n - 1]) > 1e-14 * g.values.abs().maxCoeff()) {
    const DecayFit tf = g.tail_fit();
    if (tf.exponent > 1.0)
      Ginf += power_tail_integral(std::abs(g.values[n - 1]) * std::pow(s[n - 1], tf.exponent),
                                  tf.exponent, s[n - 1]) *
              (g.values[n - 1] >= 0 ? 1.0 : -1.0);
  }
  const Eigen::ArrayXd Gc = G - Ginf;  // G + const, decaying

  // phi(rfrak) = -rfrak^p (rfrak+2)^{-p} int_rfrak^inf Gc(s) s^{-p-1}(s+2)^{p-1} ds.
  Eigen::ArrayXd integrand(n);
  for (int i = 0; i < n; ++i)
    integrand[i] = Gc[i] * std::pow(s[i], -p - 1.0) * std::pow(s[i] + 2.0, p - 1.0);
  Eigen::ArrayXd J = cumint4(s, integrand);
  const double Jtot = J[n - 1];

  double tail = 0.0;
  if (std::abs(Gc[n - 1]) > 1e-13 * Gc.abs().maxCoeff()) {
    // Gc ~ B s^{-q}; integrand ~ B s^{-q-2}.
    Eigen::ArrayXd xs = s.tail(n / 4), ys = Gc.tail(n / 4);
    double q = 1.5;
    try {
      q = fit_decay(xs, ys, FitKind::PurePower).exponent;
    } catch (const std::domain_error&) {
    }
    const double B = std::abs(Gc[n - 1]) * std::pow(s[n - 1], q);
    tail = power_tail_integral(B, q + 2.0, s[n - 1]) * (Gc[n - 1] >= 0 ? 1.0 : -1.0);
  }

  SimilaritySolution sol;
  sol.leading_power = p;
  sol.smooth_at_horizon = std::abs(p - std::round(p)) < 1e-12;
  sol.first_integral_const = -Ginf;
  sol.profile.variable = RadialVariable::SIMILARITY;
  sol.profile.grid = s;
  sol.profile.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double pref = std::pow(s[i] / (s[i] + 2.0), p);
    sol.profile.values[i] = -pref * ((Jtot - J[i]) + tail);
  }
  return sol;
}

Eigen::ArrayXd similarity_operator_residual(double p, const RadialProfile& phi_bar) {
  phi_bar.validate();
  const int n = static_cast<int>(phi_bar.grid.size());
  const Eigen::ArrayXd& s = phi_bar.grid;
  Eigen::ArrayXd flux(n), resid(n);
  for (int i = 0; i < n; ++i) {
    const double d = fd_derivative(s, phi_bar.values, i, 1, 3);
    flux[i] = (s[i] * s[i] + 2.0 * s[i]) * d;
  }
  for (int i = 0; i < n; ++i) {
    const double dflux = fd_derivative(s, flux, i, 1, 3);
    const double d = fd_derivative(s, phi_bar.values, i, 1, 3);
    resid[i] = dflux - 2.0 * p * d;
  }
  return resid;
}

ModeField solve_minkowski_mode(const std::function<double(double)>& psi_I,
                               const std::function<double(double, double)>& f,
                               ModeIndex mode, const CharStrip& strip) {
  // Backward characteristic solve on a double-null (u, v) lattice: data
  // psi = psi_I(u) on the row v = vF, regularity psi = 0 on the centre
  // diagonal u = v, rows marched toward the past.  The diamond update is
  // exact along characteristics, so the centre reflection is stable; the
  // d'Alembert combination psi_I(u) - psi_I(v) is reproduced exactly for
  // l = 0 up to the O(h^2) potential/source quadrature.
  if (strip.r(0) != 0.0)
    throw std::domain_error("solve_minkowski_mode: grid must start at r = 0");
  const double rmax = strip.r(strip.nr() - 1);
  const double L = mode.eigenvalue();

  const double h = strip.dv;  // du = dv = strip.dv, rows land on strip slices
  const double u0 = strip.v0 - 2.0 * rmax - 2.0 * h;
  const int nu = static_cast<int>(std::ceil((strip.vF - u0) / h)) + 1;
  const auto u_of = [&](int k) { return strip.vF - k * h; };  // descending

  ModeField out;
  out.strip = strip;
  out.mode = mode;
  out.allocate();

  // Row storage indexed by k (u = vF - k h), valid for u <= v.
  // For l = 0 the row psi_I(u) is the exact scattering trace up to the
  // O(psi_I(vF)) final-data truncation.  For l = 1 the regular solution is
  //   psi = psi_I(u) + psi_I(v) - 2 (F(v) - F(u)) / (v - u),  F' = psi_I,
  // so the row carries a computable integral correction; higher modes keep
  // the plain row with its O(1/vF) tag.
  Eigen::ArrayXd prev(nu), cur(nu);
  for (int k = 0; k < nu; ++k) prev[k] = psi_I(u_of(k));
  if (mode.ell == 1) {
    Eigen::ArrayXd F(nu);  // F(u_k) = -int_{u_k}^{inf} psi_I, tail fitted
    const double U = u_of(0);
    double tail = 0.0;
    const double yU = psi_I(U), yU2 = psi_I(2.0 * U);
    if (std::abs(yU) > 0.0 && std::abs(yU2) > 0.0) {
      const double q = std::log(std::abs(yU / yU2)) / std::log(2.0);
      if (q > 1.1) tail = yU * U / (q - 1.0);
    }
    F[0] = -tail;
    for (int k = 1; k < nu; ++k)
      F[k] = F[k - 1] - 0.5 * h * (prev[k] + prev[k - 1]);
    for (int k = 1; k < nu; ++k) {
      const double u = u_of(k);
      prev[k] += psi_I(strip.vF) - 2.0 * (F[0] - F[k]) / (strip.vF - u);
    }
  }
  prev[0] = 0.0;  // centre point u = v = vF

  const int total_rows = static_cast<int>(std::round((strip.vF - strip.v0) / h));
  int srow = strip.nv() - 1;

  const auto fill_strip_row = [&](const Eigen::ArrayXd& row, double v, int i) {
    for (int j = 0; j < strip.nr(); ++j) {
      const double u = v - 2.0 * strip.r(j);
      const double fk = (strip.vF - u) / h - (strip.vF - v) / h * 0.0;
      const double pos = (strip.vF - u) / h;
      int k = static_cast<int>(std::floor(pos));
      k = std::max(0, std::min(nu - 2, k));
      const double a = pos - k;
      (void)fk;
      out.values(i, j) = (1.0 - a) * row[k] + a * row[k + 1];
    }
  };
  fill_strip_row(prev, strip.vF, srow--);

  for (int m = 1; m <= total_rows; ++m) {
    const double v = strip.vF - m * h;
    // Row v: u = v corresponds to k = m.
    cur[m] = 0.0;  // centre regularity
    for (int k = m + 1; k < nu; ++k) {
      // Diamond corners: A = (u_k, v) unknown, B = (u_k, v + h),
      // C = (u_{k-1}, v), D = (u_{k-1}, v + h).
      const double uc = u_of(k) + 0.5 * h;
      const double vc = v + 0.5 * h;
      const double rc = 0.5 * (vc - uc);
      double rhs = 0.0;  // psi_uv = -[(L/r^2) psi + r f]/4
      const double psi_bar = 0.5 * (prev[k] + cur[k - 1]);
      if (L > 0.0 && rc > 1e-12) rhs -= L / (rc * rc) * psi_bar / 4.0;
      if (f && rc > 1e-12) rhs -= rc * f(vc, rc) / 4.0;
      cur[k] = prev[k] + cur[k - 1] - prev[k - 1] + h * h * rhs;
    }
    if (srow >= 0 && std::abs(v - strip.v(srow)) < 0.5 * h) fill_strip_row(cur, v, srow--);
    std::swap(prev, cur);
    if (v < strip.v0 - h) break;
  }
  return out;
}

double box_ern_pointwise(const std::function<double(double, double)>& phi, double v, double r,
                         ModeIndex mode, const BlackHoleParams& params, double hv, double hr) {
  const double L = mode.eigenvalue();
  const auto psi = [&](double vv, double rr) { return rr * phi(vv, rr); };
  const double dvdr = (psi(v + hv, r + hr) - psi(v + hv, r - hr) - psi(v - hv, r + hr) +
                       psi(v - hv, r - hr)) /
                      (4.0 * hv * hr);
  const double Dp = metric_D(r + 0.5 * hr, params);
  const double Dm = metric_D(r - 0.5 * hr, params);
  const double ddr =
      (Dp * (psi(v, r + hr) - psi(v, r)) - Dm * (psi(v, r) - psi(v, r - hr))) / (hr * hr);
  const double low = -(metric_D_prime(r, params) / r + L / (r * r)) * psi(v, r);
  return (2.0 * dvdr + ddr + low) / r;
}

double model_op_pointwise(const std::function<double(double, double)>& phi, Face face,
                          double v, double r, ModeIndex mode, const BlackHoleParams& params,
                          double hv, double hr) {
  const double M = params.mass;
  const double L = mode.eigenvalue();
  switch (face) {
    case Face::K: {
      // r^{-2} [ ((r-M)^2 phi')' - L phi ], time frozen.
      const auto zp = [&](double rr) { return (rr - M) * (rr - M); };
      const double d1 = (zp(r + 0.5 * hr) * (phi(v, r + hr) - phi(v, r)) -
                         zp(r - 0.5 * hr) * (phi(v, r) - phi(v, r - hr))) /
                        (hr * hr);
      return (d1 - L * phi(v, r)) / (r * r);
    }
    case Face::F: {
      // 2 d_v d_r phi + ((r-M)^2 phi')' + M^{-2} lap phi.
      const double dvdr = (phi(v + hv, r + hr) - phi(v + hv, r - hr) - phi(v - hv, r + hr) +
                           phi(v - hv, r - hr)) /
                          (4.0 * hv * hr);
      const auto zp = [&](double rr) { return (rr - M) * (rr - M); };
      const double d1 = (zp(r + 0.5 * hr) * (phi(v, r + hr) - phi(v, r)) -
                         zp(r - 0.5 * hr) * (phi(v, r) - phi(v, r - hr))) /
                        (hr * hr);
      return 2.0 * dvdr + d1 - L / (M * M) * phi(v, r);
    }
    case Face::IPLUS: {
      // Flat operator in the (u, r) identification: psi_ur(u, r) = psi(u + 2 r_*(r), r).
      const auto psi_ur = [&](double uu, double rr) {
        const double vv = uu + 2.0 * tortoise(rr, params);
        return rr * phi(vv, rr);
      };
      const double u = v - 2.0 * tortoise(r, params);
      const double dudr = (psi_ur(u + hv, r + hr) - psi_ur(u + hv, r - hr) -
                           psi_ur(u - hv, r + hr) + psi_ur(u - hv, r - hr)) /
                          (4.0 * hv * hr);
      const double drr =
          (psi_ur(u, r + hr) - 2.0 * psi_ur(u, r) + psi_ur(u, r - hr)) / (hr * hr);
      return (-2.0 * dudr + drr - L / (r * r) * psi_ur(u, r)) / r;
    }
    default:
      throw std::domain_error("model_op_pointwise: face must be K, F or IPLUS");
  }
}

NormalOpErrorReport normal_operator_error(const std::function<double(double, double)>& phi,
                                          Face face, ModeIndex mode,
                                          const BlackHoleParams& params,
                                          double t_lo, double t_hi, double r_max) {
  const auto local_h = [&](double r) {
    const double zeta = std::abs(r - params.mass);
    return std::max(1e-6, std::min(0.02 * std::max(zeta, 1e-3), 0.05));
  };
  const auto diff = [&](double v, double r) {
    const double hr = local_h(r);
    const double hv = 0.05;
    return box_ern_pointwise(phi, v, r, mode, params, hv, hr) -
           model_op_pointwise(phi, face, v, r, mode, params, hv, hr);
  };
  const auto box = [&](double v, double r) {
    const double hr = local_h(r);
    return box_ern_pointwise(phi, v, r, mode, params, 0.05, hr);
  };
  NormalOpErrorReport rep;
  rep.difference = fit_face_decay(diff, face, params, t_lo, t_hi, r_max);
  rep.reference = fit_face_decay(box, face, params, t_lo, t_hi, r_max);
  rep.gain = rep.difference.fit.exponent - rep.reference.fit.exponent;
  // Sup of the difference over the face window, for the frozen-time check.
  double sup = 0.0;
  for (int i = 0; i < 24; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, i / 23.0);
    const double r = 2.0 * params.mass + 0.1 * i;
    sup = std::max(sup, std::abs(diff(t, r)));
  }
  rep.sup_difference = sup;
  return rep;
}

}  // namespace ern
