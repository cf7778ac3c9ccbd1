#include "ernscat/evolution.hpp"

#include <cmath>

#include "ernscat/diagnostics.hpp"

namespace ern {

WaveCoefficients ern_coefficients(const BlackHoleParams& params, ModeIndex mode) {
  const double L = mode.eigenvalue();
  WaveCoefficients w;
  w.D = [params](double r) { return metric_D(r, params); };
  w.c = [params, L](double r) {
    if (r == 0.0) return 0.0;  // flat-limit centre (l = 0 grids only)
    const double dp = metric_D_prime(r, params);
    return dp / r + L / (r * r);
  };
  w.src_wgt = [](double r) { return r; };
  return w;
}

WaveCoefficients near_horizon_coefficients(const BlackHoleParams& params, ModeIndex mode) {
  const double M = params.mass;
  const double L = mode.eigenvalue();
  WaveCoefficients w;
  w.D = [M](double r) {
    const double z = r - M;
    return z * z;
  };
  w.c = [M, L](double) { return L / (M * M); };
  w.src_wgt = [](double) { return 1.0; };
  return w;
}

namespace {

struct StencilTables {
  // 3-point first-derivative weights at each node (one-sided at the edges).
  Eigen::ArrayXXd w1;  // nr x 3
  Eigen::ArrayXi lo;   // leftmost node of each stencil
  Eigen::ArrayXd D, c, wgt, r;

  StencilTables(const RadialGrid& g, const WaveCoefficients& co) {
    const int n = g.size();
    w1.resize(n, 3);
    lo.resize(n);
    D.resize(n);
    c.resize(n);
    wgt.resize(n);
    r = g.r;
    for (int j = 0; j < n; ++j) {
      int l = std::max(0, std::min(j - 1, n - 3));
      lo[j] = l;
      const Eigen::ArrayXd w = fd_weights(g.r[j], g.r.segment(l, 3), 1);
      w1.row(j) = w.transpose();
      D[j] = co.D(g.r[j]);
      c[j] = co.c(g.r[j]);
      wgt[j] = co.src_wgt(g.r[j]);
    }
  }

  Eigen::ArrayXd ddr(const Eigen::ArrayXd& y) const {
    const int n = static_cast<int>(y.size());
    Eigen::ArrayXd out(n);
    for (int j = 0; j < n; ++j) {
      const int l = lo[j];
      out[j] = w1(j, 0) * y[l] + w1(j, 1) * y[l + 1] + w1(j, 2) * y[l + 2];
    }
    return out;
  }
};

// Slice right-hand side: dpsi/dv = (G - D dpsi/dr)/2 with
// G(r) = G(r_max) - int_r^{r_max} (c psi + w f) dr'.
Eigen::ArrayXd slice_rhs(const Eigen::ArrayXd& psi, double v, const StencilTables& st,
                         const EvolutionProblem& prob) {
  const int n = static_cast<int>(psi.size());
  Eigen::ArrayXd dpsi = st.ddr(psi);
  if (prob.center_regular && st.r[0] == 0.0) {
    // Parity ghost at the centre: psi(-r) = parity * psi(r).
    const double parity = prob.mode.ell % 2 == 0 ? -1.0 : 1.0;
    dpsi[0] = (psi[1] - parity * psi[1]) / (2.0 * st.r[1]);
  }
  Eigen::ArrayXd q(n);
  for (int j = 0; j < n; ++j)
    q[j] = st.c[j] * psi[j] + st.wgt[j] * (prob.source ? prob.source(v, st.r[j]) : 0.0);

  Eigen::ArrayXd G(n);
  G[n - 1] = 2.0 * prob.boundary_dv(v) + st.D[n - 1] * dpsi[n - 1];
  for (int j = n - 2; j >= 0; --j)
    G[j] = G[j + 1] - 0.5 * (st.r[j + 1] - st.r[j]) * (q[j] + q[j + 1]);

  Eigen::ArrayXd rhs = 0.5 * (G - st.D * dpsi);
  rhs[n - 1] = prob.boundary_dv(v);
  if (prob.inner_value) {
    const double e = 1e-4;
    rhs[0] = ((*prob.inner_value)(v + e) - (*prob.inner_value)(v - e)) / (2.0 * e);
  }
  return rhs;
}

void kreiss_oliger(Eigen::ArrayXd& psi, const Eigen::ArrayXd& r, double eps) {
  if (eps <= 0.0) return;
  const int n = static_cast<int>(psi.size());
  Eigen::ArrayXd old = psi;
  for (int j = 2; j + 2 < n; ++j) {
    const double hm = r[j] - r[j - 1], hp = r[j + 1] - r[j];
    if (std::abs(hm - hp) > 1e-9 * hp) continue;  // graded region: skip
    const double h2m = r[j - 1] - r[j - 2], h2p = r[j + 2] - r[j + 1];
    if (std::abs(h2m - hp) > 1e-9 * hp || std::abs(h2p - hp) > 1e-9 * hp) continue;
    psi[j] += -eps / 16.0 *
              (old[j + 2] - 4.0 * old[j + 1] + 6.0 * old[j] - 4.0 * old[j - 1] + old[j - 2]);
  }
}

ModeField march(const Eigen::ArrayXd& first_slice, const EvolutionProblem& prob,
                const BlackHoleParams& params, const WaveCoefficients* coeffs,
                bool forward) {
  prob.strip.validate();
  const WaveCoefficients co = coeffs ? *coeffs : ern_coefficients(params, prob.mode);
  const StencilTables st(prob.strip.radial, co);
  const int nv = prob.strip.nv();
  const int nr = prob.strip.nr();

  ModeField out;
  out.strip = prob.strip;
  out.mode = prob.mode;
  out.allocate();

  const double dv = forward ? prob.strip.dv : -prob.strip.dv;
  int i = forward ? 0 : nv - 1;
  Eigen::ArrayXd psi = first_slice;
  out.values.row(i) = psi.transpose();

  while (forward ? (i < nv - 1) : (i > 0)) {
    const double v = prob.strip.v(i);
    const Eigen::ArrayXd k1 = slice_rhs(psi, v, st, prob);
    const Eigen::ArrayXd k2 = slice_rhs(psi + 0.5 * dv * k1, v + 0.5 * dv, st, prob);
    const Eigen::ArrayXd k3 = slice_rhs(psi + 0.5 * dv * k2, v + 0.5 * dv, st, prob);
    const Eigen::ArrayXd k4 = slice_rhs(psi + dv * k3, v + dv, st, prob);
    psi += dv / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    i += forward ? 1 : -1;
    const double vn = prob.strip.v(i);
    psi[nr - 1] = prob.boundary(vn);
    if (prob.inner_value) psi[0] = (*prob.inner_value)(vn);
    kreiss_oliger(psi, prob.strip.radial.r, prob.dissipation);
    out.values.row(i) = psi.transpose();
  }
  return out;
}

}  // namespace

ModeField evolve_forward(const Eigen::ArrayXd& initial_slice, const EvolutionProblem& prob,
                         const BlackHoleParams& params, const WaveCoefficients* coeffs) {
  if (initial_slice.size() != prob.strip.nr())
    throw std::domain_error("evolve_forward: initial slice size mismatch");
  if (prob.strip.dv > max_stable_dv(prob.strip, params, 1.0) * 1.0000001 && !coeffs)
    throw std::domain_error("evolve_forward: dv violates dv <= dr min(2/D)");
  return march(initial_slice, prob, params, coeffs, true);
}

ModeField evolve_backward(const EvolutionProblem& prob, const BlackHoleParams& params,
                          const WaveCoefficients* coeffs) {
  Eigen::ArrayXd final_slice = Eigen::ArrayXd::Zero(prob.strip.nr());
  final_slice[prob.strip.nr() - 1] = prob.boundary(prob.strip.vF);
  return march(final_slice, prob, params, coeffs, false);
}

ModeField solve_backward_correction(const ModeField& residual_source,
                                    const BlackHoleParams& params) {
  if (!residual_source.source)
    throw std::domain_error("solve_backward_correction: field carries no source");
  const CharStrip& strip = residual_source.strip;
  const int nv = strip.nv();

  // Precondition: late-time decay of the source, fitted exponent > 5/2.
  {
    std::vector<double> xs, ys;
    for (int i = 0; i < nv; ++i) {
      const double a = residual_source.source->row(i).abs().maxCoeff();
      xs.push_back(strip.v(i));
      ys.push_back(a);
    }
    const double vmax = xs.back();
    const double vlo = vmax / std::pow(10.0, 1.5);
    std::vector<double> fx, fy;
    for (size_t k = 0; k < xs.size(); ++k)
      if (xs[k] >= vlo && ys[k] > 0.0) {
        fx.push_back(xs[k]);
        fy.push_back(ys[k]);
      }
    if (fx.size() >= 20 && fx.back() / fx.front() >= std::pow(10.0, 1.2)) {
      const DecayFit fit = fit_decay(
          Eigen::Map<Eigen::ArrayXd>(fx.data(), fx.size()),
          Eigen::Map<Eigen::ArrayXd>(fy.data(), fy.size()), FitKind::PurePower);
      if (fit.exponent <= 2.5)
        throw std::domain_error("solve_backward_correction: source decay exponent " +
                                std::to_string(fit.exponent) + " <= 5/2");
    }
  }

  EvolutionProblem prob;
  prob.strip = strip;
  prob.mode = residual_source.mode;
  prob.boundary = [](double) { return 0.0; };
  prob.boundary_dv = [](double) { return 0.0; };
  const Eigen::ArrayXXd* src = &*residual_source.source;
  const CharStrip* sp = &strip;
  prob.source = [src, sp](double v, double r) {
    // Bilinear lookup on the co-located source table.
    const double fi = (v - sp->v0) / sp->dv;
    int i = std::max(0, std::min(sp->nv() - 2, static_cast<int>(std::floor(fi))));
    const double av = fi - i;
    const auto& rr = sp->radial.r;
    const int n = sp->nr();
    int j = static_cast<int>(std::lower_bound(rr.data(), rr.data() + n, r) - rr.data());
    j = std::max(1, std::min(n - 1, j));
    const double aj = (r - rr[j - 1]) / (rr[j] - rr[j - 1]);
    const double f0 = (1 - aj) * (*src)(i, j - 1) + aj * (*src)(i, j);
    const double f1 = (1 - aj) * (*src)(i + 1, j - 1) + aj * (*src)(i + 1, j);
    return (1 - av) * f0 + av * f1;
  };
  return evolve_backward(prob, params);
}

RadiationField read_radiation_field(const ModeField& field, const BlackHoleParams& params) {
  const CharStrip& strip = field.strip;
  const int nv = strip.nv();
  const double rmax = strip.r(strip.nr() - 1);
  RadiationField out;
  out.u.resize(nv);
  out.psi.resize(nv);
  const double shift = 2.0 * tortoise(rmax, params);
  for (int i = 0; i < nv; ++i) {
    out.u[i] = strip.v(i) - shift;
    out.psi[i] = field.values(i, strip.nr() - 1);
  }
  out.error_scale = 1.0 / rmax;
  return out;
}

HorizonData read_horizon_data(const ModeField& field, const BlackHoleParams& params) {
  const CharStrip& strip = field.strip;
  int j;
  try {
    j = strip.radial.index_of(params.mass);
  } catch (const std::domain_error&) {
    throw std::domain_error("read_horizon_data: strip does not contain r = M");
  }
  HorizonData out;
  const int nv = strip.nv();
  out.v.resize(nv);
  out.phi.resize(nv);
  for (int i = 0; i < nv; ++i) {
    out.v[i] = strip.v(i);
    out.phi[i] = field.values(i, j) / params.mass;
  }
  return out;
}

double max_stable_dv(const CharStrip& strip, const BlackHoleParams& params, double cfl) {
  double dv = std::numeric_limits<double>::infinity();
  for (int j = 1; j < strip.nr(); ++j) {
    const double h = strip.r(j) - strip.r(j - 1);
    const double D = std::max(metric_D(strip.r(j), params), metric_D(strip.r(j - 1), params));
    if (D > 0.0) dv = std::min(dv, 2.0 * h / D);
  }
  return cfl * dv;
}

ModeField apply_box(const ModeField& field, const BlackHoleParams& params) {
  const CharStrip& strip = field.strip;
  const WaveCoefficients co = ern_coefficients(params, field.mode);
  const StencilTables st(strip.radial, co);
  const int nv = strip.nv();
  const int nr = strip.nr();

  ModeField out;
  out.strip = strip;
  out.mode = field.mode;
  out.allocate();

  // Radial first derivatives of psi and of D*psi_r per slice.
  Eigen::ArrayXXd psi_r(nv, nr);
  for (int i = 0; i < nv; ++i) psi_r.row(i) = st.ddr(field.values.row(i).transpose()).transpose();

  // Two radial guard layers: the outermost interior column would otherwise
  // mix one-sided and centered stencil errors at first order.
  for (int i = 1; i + 1 < nv; ++i) {
    const Eigen::ArrayXd dvdr =
        (psi_r.row(i + 1) - psi_r.row(i - 1)).transpose() / (2.0 * strip.dv);
    const Eigen::ArrayXd W = st.D * psi_r.row(i).transpose().array();
    const Eigen::ArrayXd dW = st.ddr(W);
    for (int j = 2; j + 2 < nr; ++j) {
      double resid = 2.0 * dvdr[j] + dW[j] - st.c[j] * field.values(i, j);
      if (field.source) resid -= st.wgt[j] * (*field.source)(i, j);
      out.values(i, j) = resid;
    }
  }
  return out;
}

}  // namespace ern
