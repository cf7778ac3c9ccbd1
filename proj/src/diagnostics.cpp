#include "ernscat/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace ern {

DecayFit fit_decay(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, FitKind kind) {
  std::vector<double> lx, ly;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && std::abs(y[i]) > 0.0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(std::abs(y[i])));
    }
  }
  const int n = static_cast<int>(lx.size());
  if (n < 20) throw std::domain_error("fit_decay: needs >= 20 usable samples");
  const double span = *std::max_element(lx.begin(), lx.end()) -
                      *std::min_element(lx.begin(), lx.end());
  if (span < 1.5 * std::log(10.0) * 0.999)
    throw std::domain_error("fit_decay: window must span >= 1.5 decades");

  const int cols = kind == FitKind::PowerLog ? 3 : 2;
  Eigen::MatrixXd A(n, cols);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lx[i];
    if (cols == 3) A(i, 2) = std::log(std::max(lx[i], 1e-12));
    b[i] = ly[i];
  }
  Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);

  DecayFit fit;
  fit.window_lo = std::exp(*std::min_element(lx.begin(), lx.end()));
  fit.window_hi = std::exp(*std::max_element(lx.begin(), lx.end()));
  if (cols == 3) {
    fit.logpower = static_cast<int>(std::lround(coef[2]));
    // Refit exponent/amplitude with the integer log power pinned.
    Eigen::MatrixXd A2(n, 2);
    Eigen::VectorXd b2(n);
    for (int i = 0; i < n; ++i) {
      A2(i, 0) = 1.0;
      A2(i, 1) = lx[i];
      b2[i] = ly[i] - fit.logpower * std::log(std::max(lx[i], 1e-12));
    }
    coef = A2.colPivHouseholderQr().solve(b2);
  }
  fit.amplitude = std::exp(coef[0]);
  fit.exponent = -coef[1];

  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double model = std::log(fit.amplitude) - fit.exponent * lx[i] +
                         fit.logpower * std::log(std::max(lx[i], 1e-12));
    ss += (ly[i] - model) * (ly[i] - model);
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

namespace {

// psi and its first derivatives interpolated at (v, r) from the field table.
struct FieldSampler {
  const ModeField& f;
  Eigen::ArrayXd vgrid;

  explicit FieldSampler(const ModeField& field) : f(field) {
    vgrid = Eigen::ArrayXd::LinSpaced(f.strip.nv(), f.strip.v0, f.strip.v(f.strip.nv() - 1));
  }

  double column_at(int j, double v) const {
    return lagrange_interp(vgrid, f.values.col(j), v, 4);
  }

  double psi(double v, double r) const {
    const auto& rr = f.strip.radial.r;
    const int n = f.strip.nr();
    int j = static_cast<int>(std::lower_bound(rr.data(), rr.data() + n, r) - rr.data());
    int lo = std::max(0, std::min(j - 2, n - 4));
    Eigen::ArrayXd xs(4), ys(4);
    for (int k = 0; k < 4; ++k) {
      xs[k] = rr[lo + k];
      ys[k] = column_at(lo + k, v);
    }
    return lagrange_interp(xs, ys, r, 4);
  }

  double psi_v(double v, double r) const {
    const double h = f.strip.dv;
    return (psi(v + h, r) - psi(v - h, r)) / (2.0 * h);
  }

  double psi_r(double v, double r) const {
    const auto& rr = f.strip.radial.r;
    const int n = f.strip.nr();
    int j = static_cast<int>(std::lower_bound(rr.data(), rr.data() + n, r) - rr.data());
    j = std::max(1, std::min(j, n - 2));
    const double h = std::min(rr[j] - rr[j - 1], rr[j + 1] - rr[j]);
    return (psi(v, r + h) - psi(v, r - h)) / (2.0 * h);
  }
};

}  // namespace

EnergyRecord t_energy(const ModeField& field, double tau, const BlackHoleParams& params) {
  const CharStrip& strip = field.strip;
  const FieldSampler S(field);
  const double L = field.mode.eigenvalue();
  const double v_lo = strip.v0 + 2.0 * strip.dv;
  const double v_hi = strip.v(strip.nv() - 1) - 2.0 * strip.dv;

  EnergyRecord rec;
  rec.tau = tau;
  int covered = 0, total = 0;
  Eigen::ArrayXd xs(strip.nr()), t_i(strip.nr()), rad_i(strip.nr()), ang_i(strip.nr());
  int m = 0;
  for (int j = 1; j + 1 < strip.nr(); ++j) {
    const double r = strip.r(j);
    const double v = tau - tstar_height(r, params);
    ++total;
    if (v < v_lo || v > v_hi) continue;
    ++covered;
    const double psi = S.psi(v, r);
    const double pv = S.psi_v(v, r) / r;
    const double pr = S.psi_r(v, r) / r - psi / (r * r);
    const double D = metric_D(r, params);
    const double hp = tstar_height_prime(r, params);
    const double tt = (-hp) * (pv + 0.5 * D * pr) * (pv + 0.5 * D * pr);
    const double rad = 0.25 * D * (D * hp + 2.0) * pr * pr;
    const double ang = 0.5 * L * (psi / r) * (psi / r) / (r * r);
    xs[m] = r;
    t_i[m] = tt * r * r;
    rad_i[m] = rad * r * r;
    ang_i[m] = ang * r * r;
    ++m;
  }
  rec.covered_fraction = total > 0 ? static_cast<double>(covered) / total : 0.0;
  if (m >= 2) {
    const double fourpi = 4.0 * M_PI;
    rec.t_term = fourpi * trapz(xs.head(m), t_i.head(m));
    rec.radial_term = fourpi * trapz(xs.head(m), rad_i.head(m));
    rec.angular_term = fourpi * trapz(xs.head(m), ang_i.head(m));
    rec.energy = rec.t_term + rec.radial_term + rec.angular_term;
  }
  return rec;
}

EnergyRecord t_energy_static_slice(const ModeField& field, double tau,
                                   const BlackHoleParams& params, double r_min_eff) {
  const CharStrip& strip = field.strip;
  const FieldSampler S(field);
  const double L = field.mode.eigenvalue();
  const double v_lo = strip.v0 + 2.0 * strip.dv;
  const double v_hi = strip.v(strip.nv() - 1) - 2.0 * strip.dv;

  EnergyRecord rec;
  rec.tau = tau;
  int covered = 0, total = 0;
  Eigen::ArrayXd xs(strip.nr()), t_i(strip.nr()), rad_i(strip.nr()), ang_i(strip.nr());
  int m = 0;
  for (int j = 1; j + 1 < strip.nr(); ++j) {
    const double r = strip.r(j);
    ++total;
    if (r < r_min_eff) continue;
    const double v = tau + tortoise(r, params);
    if (v < v_lo || v > v_hi) continue;
    ++covered;
    const double psi = S.psi(v, r);
    const double pv = S.psi_v(v, r) / r;
    const double pr = S.psi_r(v, r) / r - psi / (r * r);
    const double D = metric_D(r, params);
    const double a = pv / std::sqrt(D) + std::sqrt(D) * pr;
    xs[m] = r;
    t_i[m] = 0.5 * pv * pv / D * r * r;
    rad_i[m] = 0.5 * a * a * r * r;
    ang_i[m] = 0.5 * L * (psi / r) * (psi / r);
    ++m;
  }
  rec.covered_fraction = total > 0 ? static_cast<double>(covered) / total : 0.0;
  if (m >= 2) {
    const double fourpi = 4.0 * M_PI;
    rec.t_term = fourpi * trapz(xs.head(m), t_i.head(m));
    rec.radial_term = fourpi * trapz(xs.head(m), rad_i.head(m));
    rec.angular_term = fourpi * trapz(xs.head(m), ang_i.head(m));
    rec.energy = rec.t_term + rec.radial_term + rec.angular_term;
  }
  return rec;
}

namespace {

// One-sided stencil indices at r = M with roughly equispaced offsets.  On a
// log-graded grid consecutive nodes cluster, which makes raw 4-point
// Fornberg weights ill conditioned, so pick the nodes nearest to multiples
// of a spread scale instead.
std::array<int, 4> horizon_stencil(const RadialGrid& grid, int j0) {
  const int n = grid.size();
  if (j0 + 4 >= n) throw std::domain_error("horizon stencil: no exterior room");
  const double M = grid.r[j0];
  const double s = grid.r[std::min(j0 + 6, n - 1)] - M;
  std::array<int, 4> idx{j0, 0, 0, 0};
  int cursor = j0;
  for (int k = 1; k < 4; ++k) {
    const double target = M + k * s;
    while (cursor + 1 < n && grid.r[cursor + 1] <= target) ++cursor;
    idx[k] = std::min(std::max(cursor, idx[k - 1] + 1), n - 1);
    cursor = idx[k];
  }
  return idx;
}

}  // namespace

double aretakis_charge(const ModeField& field, double v, const BlackHoleParams& params) {
  const CharStrip& strip = field.strip;
  int j0;
  try {
    j0 = strip.radial.index_of(params.mass);
  } catch (const std::domain_error&) {
    throw std::domain_error("aretakis_charge: strip does not contain r = M");
  }
  const auto idx = horizon_stencil(strip.radial, j0);
  const FieldSampler S(field);
  Eigen::ArrayXd nodes(4), vals(4);
  for (int k = 0; k < 4; ++k) {
    nodes[k] = strip.r(idx[k]);
    vals[k] = S.column_at(idx[k], v);
  }
  const Eigen::ArrayXd w = fd_weights(params.mass, nodes, 1);
  double d = 0.0;
  for (int k = 0; k < 4; ++k) d += w[k] * vals[k];
  return 4.0 * M_PI * d;
}

Eigen::ArrayXd aretakis_charge_history(const ModeField& field, const BlackHoleParams& params) {
  const int nv = field.strip.nv();
  Eigen::ArrayXd out(nv);
  const int j0 = field.strip.radial.index_of(params.mass);
  const auto idx = horizon_stencil(field.strip.radial, j0);
  Eigen::ArrayXd nodes(4);
  for (int k = 0; k < 4; ++k) nodes[k] = field.strip.r(idx[k]);
  const Eigen::ArrayXd w = fd_weights(params.mass, nodes, 1);
  for (int i = 0; i < nv; ++i) {
    double d = 0.0;
    for (int k = 0; k < 4; ++k) d += w[k] * field.values(i, idx[k]);
    out[i] = 4.0 * M_PI * d;
  }
  return out;
}

double duality_residual(const std::function<double(double, double)>& phi,
                        const std::function<double(double, double)>& source,
                        const CharStrip& strip, const BlackHoleParams& params,
                        double support_lo, double support_hi,
                        int conformal_power) {
  const double M = params.mass;
  // Pulled-back field (Omega Phi^* phi) as a function on the strip; finite
  // differences of it give Box by the same second-order stencils.
  const auto pullback = [&](double v, double r) {
    const CouchTorrence ct = couch_torrence(r, params);
    const double vi = v - 2.0 * tortoise(r, params);
    const double om = std::pow(ct.omega, 1);
    return om * phi(vi, ct.r_image);
  };

  // Sample region: points whose Couch-Torrence image lies in the support.
  const double r_lo = couch_torrence(support_hi, params).r_image;
  const double r_hi = couch_torrence(support_lo, params).r_image;

  const double hv = strip.dv;
  double worst = 0.0;
  for (int j = 1; j + 1 < strip.nr(); ++j) {
    const double r = strip.r(j);
    if (r < r_lo || r > r_hi) continue;
    const double hr = std::min(strip.r(j) - strip.r(j - 1), strip.r(j + 1) - strip.r(j));
    for (int i = 1; i + 1 < strip.nv(); i += 2) {
      const double v = strip.v(i);
      if (v - 2.0 * tortoise(std::max(r - hr, M * 1.0000001), params) < strip.v0 + hv) continue;
      if (v - 2.0 * tortoise(r + hr, params) > strip.vF - hv) continue;

      const auto tpsi = [&](double vv, double rr) { return rr * pullback(vv, rr); };
      // r Box = 2 d_v d_r psi + d_r(D d_r psi) - (D'/r) psi  (l = 0)
      const double dvdr = (tpsi(v + hv, r + hr) - tpsi(v + hv, r - hr) -
                           tpsi(v - hv, r + hr) + tpsi(v - hv, r - hr)) /
                          (4.0 * hv * hr);
      const double Dp = metric_D(r + 0.5 * hr, params);
      const double Dm = metric_D(r - 0.5 * hr, params);
      const double ddr = (Dp * (tpsi(v, r + hr) - tpsi(v, r)) -
                          Dm * (tpsi(v, r) - tpsi(v, r - hr))) /
                         (hr * hr);
      const double box = (2.0 * dvdr + ddr - metric_D_prime(r, params) / r * tpsi(v, r)) / r;

      const CouchTorrence ct = couch_torrence(r, params);
      const double rhs = std::pow(ct.omega, conformal_power) *
                         source(v - 2.0 * tortoise(r, params), ct.r_image);
      worst = std::max(worst, std::abs(box - rhs));
    }
  }
  if (worst == 0.0)
    throw std::domain_error("duality_residual: empty overlap between support and strip");
  return worst;
}

RegularityProbe horizon_regularity_probe(
    const std::function<double(double, double)>& phi, int k,
    const BlackHoleParams& params, double v_lo, double v_hi, int n_times,
    double stencil_scale) {
  if (k < 1 || k > 4) throw std::domain_error("horizon_regularity_probe: k in [1,4]");
  const double M = params.mass;
  const int npts = k + 3;

  const auto deriv_at = [&](double v, double s) {
    Eigen::ArrayXd nodes(npts), vals(npts);
    for (int m = 0; m < npts; ++m) {
      nodes[m] = M + m * s;
      vals[m] = phi(v, nodes[m]);
    }
    const Eigen::ArrayXd w = fd_weights(M, nodes, k);
    double acc = 0.0;
    for (int m = 0; m < npts; ++m) acc += w[m] * vals[m];
    return acc;
  };

  RegularityProbe probe;
  probe.v.resize(n_times);
  probe.deriv.resize(n_times);
  probe.deriv_coarse.resize(n_times);
  std::vector<double> ratios;
  for (int i = 0; i < n_times; ++i) {
    const double v = v_lo * std::pow(v_hi / v_lo, static_cast<double>(i) / (n_times - 1));
    probe.v[i] = v;
    probe.deriv[i] = deriv_at(v, stencil_scale);
    probe.deriv_coarse[i] = deriv_at(v, 2.0 * stencil_scale);
    if (std::abs(probe.deriv_coarse[i]) > 1e-12 * (1.0 + std::abs(probe.deriv[i])))
      ratios.push_back(std::abs(probe.deriv[i]) / std::abs(probe.deriv_coarse[i]));
  }
  if (!ratios.empty()) {
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    probe.refinement_ratio = ratios[ratios.size() / 2];
  }
  try {
    const DecayFit fit = fit_decay(probe.v, probe.deriv.abs(), FitKind::PurePower);
    probe.growth_exponent = -fit.exponent;
  } catch (const std::domain_error&) {
    probe.growth_exponent = 0.0;
  }
  const double kink_threshold = std::pow(2.0, 0.25);
  probe.flag = probe.refinement_ratio > kink_threshold ? ProbeFlag::RAISED : ProbeFlag::CLEAR;
  return probe;
}

RegularityProbe horizon_regularity_probe(const ModeField& field, int k,
                                         const BlackHoleParams& params) {
  const CharStrip& strip = field.strip;
  int j0;
  try {
    j0 = strip.radial.index_of(params.mass);
  } catch (const std::domain_error&) {
    throw std::domain_error("horizon_regularity_probe: strip does not contain r = M");
  }
  if (j0 + 2 * (k + 3) >= strip.nr())
    throw std::domain_error("horizon_regularity_probe: insufficient stencil room");
  const FieldSampler S(field);
  const auto phi = [&](double v, double r) { return S.psi(v, r) / r; };
  const double s = 2.0 * (strip.r(j0 + 1) - strip.r(j0));
  const double margin = 3.0 * strip.dv;
  return horizon_regularity_probe(phi, k, params, strip.v0 + margin,
                                  strip.v(strip.nv() - 1) - margin, 33, s);
}

FaceFit fit_face_decay(const std::function<double(double, double)>& resid, Face face,
                       const BlackHoleParams& params, double t_lo, double t_hi,
                       double r_max, double floor) {
  const double M = params.mass;
  const int n = 48;
  Eigen::ArrayXd xs(n), ys(n);

  const auto v_of = [&](double ts, double r) { return ts - tstar_height(r, params); };
  // Far-branch additive constant of t*; the face-adapted fit variable at
  // i+ is t* - C, which tracks the retarded time of the self-similar
  // content instead of carrying the blend offset through the window.
  const double C = M > 0.0 ? tstar_far_offset(params) : 0.0;

  for (int i = 0; i < n; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n - 1));
    double sup = 0.0;
    switch (face) {
      case Face::IPLUS: {
        // Fixed rays r = kappa t* plus wedge points at fixed u/r, which
        // follow the data cutoff as the blend offset drifts through t*.
        for (double kappa : {0.5, 1.0, 2.0, 3.0}) {
          const double r = kappa * t;
          if (r < 2.0 * M || r > 0.98 * r_max) continue;
          sup = std::max(sup, std::abs(resid(v_of(t, r), r)));
        }
        for (double w : {0.55, 0.65, 0.8, 0.95}) {
          double r = std::max((t - C) / w, 3.0 * M);
          for (int it = 0; it < 2; ++it) {
            const double u = t - tstar_height(r, params) - 2.0 * tortoise(r, params);
            r = std::max(u / w, 3.0 * M);
          }
          if (r < 2.0 * M || r > 0.98 * r_max) continue;
          sup = std::max(sup, std::abs(resid(v_of(t, r), r)));
        }
        xs[i] = std::max(t - C, 2.0);
        ys[i] = sup;
        continue;
      }
      case Face::K: {
        for (int m = 0; m < 12; ++m) {
          const double r = 2.0 * M + m * (4.0 * M) / 11.0;
          sup = std::max(sup, std::abs(resid(v_of(t, r), r)));
        }
        xs[i] = std::max(t - C, 2.0);
        ys[i] = sup;
        continue;
      }
      case Face::F: {
        const double v = t;
        for (double rf : {0.3, 0.6, 1.0, 2.0, 4.0}) {
          const double r = M + rf / v;
          sup = std::max(sup, std::abs(resid(v, r)));
        }
        break;
      }
      case Face::I: {
        // fixed u = t_lo beyond the data wedge; x = r/t* grows toward I
        const double u = t_lo;
        const double r_lo = std::max(10.0 * M, 3.0 * u);
        const double r = r_lo * std::pow(r_max / r_lo / 1.02,
                                         static_cast<double>(i) / (n - 1));
        const double v = u + 2.0 * tortoise(r, params);
        const double ts = v + tstar_height(r, params);
        xs[i] = r / ts;  // 1 / rho_I
        ys[i] = std::abs(resid(v, r));
        continue;
      }
    }
    xs[i] = t;
    ys[i] = sup;
  }

  FaceFit out;
  out.face = face;
  if (ys.abs().maxCoeff() < floor) {
    out.below_floor = true;
    out.fit.exponent = std::numeric_limits<double>::infinity();
    return out;
  }
  out.fit = fit_decay(xs, ys, FitKind::PurePower);
  return out;
}

}  // namespace ern
