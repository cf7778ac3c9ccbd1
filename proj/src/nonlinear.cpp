#include "ernscat/nonlinear.hpp"

#include <cmath>

namespace ern {

Eigen::ArrayXXd eval_nonlinearity(const ModeField& field, const NonlinearitySpec& spec,
                                  const BlackHoleParams& params) {
  if (field.mode.ell != 0)
    throw std::domain_error("eval_nonlinearity: only the l = 0 mode is supported");
  const CharStrip& strip = field.strip;
  const int nv = strip.nv();
  const int nr = strip.nr();
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(nv, nr);
  if (!spec.any()) return out;

  // phi = psi / r and its first derivatives, second-order stencils.
  Eigen::ArrayXXd phi(nv, nr);
  for (int j = 0; j < nr; ++j) phi.col(j) = field.values.col(j) / strip.r(j);

  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nr; ++j) {
      const double r = strip.r(j);
      const double p = phi(i, j);
      double val = 0.0;
      if (spec.cubic_on) val += p * p * p;
      if (spec.gradient_on) {
        const int i0 = std::max(1, std::min(i, nv - 2));
        const double pv = (phi(i0 + 1, j) - phi(i0 - 1, j)) / (2.0 * strip.dv);
        const int j0 = std::max(1, std::min(j, nr - 2));
        const Eigen::ArrayXd rn = strip.radial.r.segment(j0 - 1, 3);
        const Eigen::ArrayXd w = fd_weights(r, rn, 1);
        const double pr = w[0] * phi(i, j0 - 1) + w[1] * phi(i, j0) + w[2] * phi(i, j0 + 1);
        val += metric_D(r, params) * pr * pr + 2.0 * pv * pr;
      }
      out(i, j) = val;
    }
  }
  return out;
}

double eval_nonlinearity_pointwise(const std::function<double(double, double)>& phi,
                                   double v, double r, const NonlinearitySpec& spec,
                                   const BlackHoleParams& params, double hv, double hr) {
  const double p = phi(v, r);
  double val = 0.0;
  if (spec.cubic_on) val += p * p * p;
  if (spec.gradient_on) {
    const double pv = (phi(v + hv, r) - phi(v - hv, r)) / (2.0 * hv);
    const double pr = (phi(v, r + hr) - phi(v, r - hr)) / (2.0 * hr);
    val += metric_D(r, params) * pr * pr + 2.0 * pv * pr;
  }
  return val;
}

namespace {

// Discrete Box phi on the strip (phi-equation units), via apply_box.
Eigen::ArrayXXd discrete_box_phi(const ModeField& field, const BlackHoleParams& params) {
  ModeField bare = field;
  bare.source.reset();
  const ModeField R = apply_box(bare, params);
  Eigen::ArrayXXd out = R.values;
  for (int j = 0; j < field.strip.nr(); ++j) out.col(j) /= field.strip.r(j);
  return out;
}

double weighted_sup(const Eigen::ArrayXXd& a, const CharStrip& strip,
                    const BlackHoleParams& params, double q, double T_f) {
  double sup = 0.0;
  for (int i = 2; i + 2 < strip.nv(); ++i) {
    for (int j = 2; j + 2 < strip.nr(); ++j) {
      const double ts = strip.v(i) + tstar_height(strip.r(j), params);
      if (ts < T_f) continue;
      sup = std::max(sup, std::abs(a(i, j)) * std::pow(std::max(ts, 1.0), q));
    }
  }
  return sup;
}

}  // namespace

std::pair<ModeField, PicardReport> picard_correct(
    const std::function<double(double, double)>& phi_app, const CharStrip& strip,
    const NonlinearitySpec& spec, const PicardOptions& opt, const BlackHoleParams& params,
    const std::function<double(double, double)>& f_ext) {
  const int nv = strip.nv();
  const int nr = strip.nr();

  ModeField app;
  app.strip = strip;
  app.mode = ModeIndex(0);
  app.allocate();
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nr; ++j) app.values(i, j) = strip.r(j) * phi_app(strip.v(i), strip.r(j));

  const Eigen::ArrayXXd box_app = discrete_box_phi(app, params);
  const Eigen::ArrayXXd N_app = eval_nonlinearity(app, spec, params);
  Eigen::ArrayXXd ext = Eigen::ArrayXXd::Zero(nv, nr);
  if (f_ext)
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nr; ++j) ext(i, j) = f_ext(strip.v(i), strip.r(j));
  const Eigen::ArrayXXd f_app = box_app - N_app - ext;  // approximate-solution residual

  PicardReport report;
  ModeField cur;
  cur.strip = strip;
  cur.mode = ModeIndex(0);
  cur.allocate();

  double prev_increment = -1.0;
  int bad_streak = 0;
  const double app_scale = app.values.abs().maxCoeff();

  for (int it = 0; it < opt.max_iter; ++it) {
    ModeField total = app;
    total.values += cur.values;
    const Eigen::ArrayXXd N_tot = eval_nonlinearity(total, spec, params);

    ModeField src_field;
    src_field.strip = strip;
    src_field.mode = ModeIndex(0);
    src_field.allocate();
    src_field.source = (N_tot - N_app - f_app).eval();

    EvolutionProblem prob;
    prob.strip = strip;
    prob.mode = ModeIndex(0);
    prob.boundary = [](double) { return 0.0; };
    prob.boundary_dv = [](double) { return 0.0; };
    const Eigen::ArrayXXd* sp = &*src_field.source;
    prob.source = [sp, &strip](double v, double r) {
      const double fi = (v - strip.v0) / strip.dv;
      int i = std::max(0, std::min(strip.nv() - 2, static_cast<int>(std::floor(fi))));
      const double av = fi - i;
      const auto& rr = strip.radial.r;
      const int n = strip.nr();
      int j = static_cast<int>(std::lower_bound(rr.data(), rr.data() + n, r) - rr.data());
      j = std::max(1, std::min(n - 1, j));
      const double aj = (r - rr[j - 1]) / (rr[j] - rr[j - 1]);
      const double f0 = (1 - aj) * (*sp)(i, j - 1) + aj * (*sp)(i, j);
      const double f1 = (1 - aj) * (*sp)(i + 1, j - 1) + aj * (*sp)(i + 1, j);
      return (1 - av) * f0 + av * f1;
    };
    ModeField next = evolve_backward(prob, params);

    const Eigen::ArrayXXd diff = (next.values - cur.values).eval();
    const double inc = weighted_sup(diff, strip, params, opt.weight_q, opt.T_f);
    report.increments.push_back(inc);
    if (prev_increment > 0.0) {
      const double ratio = inc / prev_increment;
      report.contraction.push_back(ratio);
      if (ratio >= 1.0) {
        if (++bad_streak >= 2)
          throw std::runtime_error(
              "picard_correct: contraction factor >= 1 on two consecutive iterates "
              "(try a later T_f or a smaller amplitude)");
      } else {
        bad_streak = 0;
      }
    }
    cur = next;
    ++report.iterations;
    const double scale = std::max({app_scale, cur.values.abs().maxCoeff(), 1e-30});
    if (inc < opt.tol * scale && (prev_increment < 0.0 || inc < prev_increment)) {
      report.converged = true;
      prev_increment = inc;
      break;
    }
    prev_increment = inc;
  }

  // Final discrete residual of the corrected solution.
  ModeField total = app;
  total.values += cur.values;
  const Eigen::ArrayXXd resid =
      discrete_box_phi(total, params) - eval_nonlinearity(total, spec, params) - ext;
  double sup = 0.0;
  for (int i = 3; i + 3 < nv; ++i)
    for (int j = 3; j + 3 < nr; ++j) sup = std::max(sup, std::abs(resid(i, j)));
  report.final_residual = sup;

  return {total, report};
}

}  // namespace ern
