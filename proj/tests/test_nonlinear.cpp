#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ernscat/nonlinear.hpp"

using namespace ern;

namespace {
const BlackHoleParams bh(1.0);
const BlackHoleParams flat(0.0);

CharStrip ern_strip(int nr) {
  CharStrip strip;
  strip.radial = RadialGrid::horizon_graded(1.0, 0.2, 1e-3, 1.0, 0.15, 20.0, 24);
  (void)nr;
  strip.v0 = 40.0;
  strip.vF = 140.0;
  strip.dv = 0.05;
  return strip;
}
}  // namespace

TEST_CASE("nonlinearity closed forms") {
  CharStrip strip = ern_strip(0);
  ModeField f;
  f.strip = strip;
  f.mode = ModeIndex(0);
  f.allocate();
  NonlinearitySpec spec;
  spec.cubic_on = true;
  spec.gradient_on = true;

  // phi = const c: N = c^3 (gradient part vanishes).
  for (int i = 0; i < strip.nv(); ++i)
    for (int j = 0; j < strip.nr(); ++j) f.values(i, j) = 0.5 * strip.r(j);
  Eigen::ArrayXXd n = eval_nonlinearity(f, spec, bh);
  CHECK(n(strip.nv() / 2, strip.nr() / 2) == doctest::Approx(0.125).epsilon(1e-8));

  // phi = u in the flat limit: the gradient part vanishes (du is null).
  CharStrip fstrip;
  fstrip.radial = RadialGrid::uniform(1.0, 20.0, 191);
  fstrip.v0 = 0.0;
  fstrip.vF = 10.0;
  fstrip.dv = 0.05;
  ModeField g;
  g.strip = fstrip;
  g.mode = ModeIndex(0);
  g.allocate();
  for (int i = 0; i < fstrip.nv(); ++i)
    for (int j = 0; j < fstrip.nr(); ++j)
      g.values(i, j) = fstrip.r(j) * (fstrip.v(i) - 2.0 * fstrip.r(j));
  NonlinearitySpec grad_only;
  grad_only.gradient_on = true;
  const Eigen::ArrayXXd ng = eval_nonlinearity(g, grad_only, flat);
  double interior = 0.0;
  for (int i = 2; i + 2 < fstrip.nv(); ++i)
    for (int j = 2; j + 2 < fstrip.nr(); ++j)
      interior = std::max(interior, std::abs(ng(i, j)));
  CHECK(interior < 1e-9);

  // phi = r on ERN: gradient part = D(r).
  ModeField h;
  h.strip = strip;
  h.mode = ModeIndex(0);
  h.allocate();
  for (int i = 0; i < strip.nv(); ++i)
    for (int j = 0; j < strip.nr(); ++j) h.values(i, j) = strip.r(j) * strip.r(j);
  const Eigen::ArrayXXd nh = eval_nonlinearity(h, grad_only, bh);
  const int jm = strip.nr() / 2;
  CHECK(nh(strip.nv() / 2, jm) == doctest::Approx(metric_D(strip.r(jm), bh)).epsilon(1e-5));

  // l != 0 rejected.
  ModeField l1 = f;
  l1.mode = ModeIndex(1);
  CHECK_THROWS_AS(eval_nonlinearity(l1, spec, bh), std::domain_error);
}

TEST_CASE("order bookkeeping of the nonlinear mapping") {
  // Power-law test field phi ~ t*^{-a} with a smooth radial profile: the
  // cubic maps a -> 3a and the gradient to >= 2a + (face gain) at K,
  // within +-0.1 measured.
  const double a = 1.2;
  const auto phi = [a](double v, double r) {
    const double ts = v + tstar_height(r, BlackHoleParams(1.0));
    return std::pow(ts, -a) * std::exp(-0.1 * (r - 3.0) * (r - 3.0));
  };
  NonlinearitySpec cubic;
  cubic.cubic_on = true;
  NonlinearitySpec grad;
  grad.gradient_on = true;

  Eigen::ArrayXd xs(40), yc(40), yg(40);
  for (int i = 0; i < 40; ++i) {
    const double ts = 50.0 * std::pow(60.0, i / 39.0);
    const double r = 3.0;
    const double v = ts - tstar_height(r, bh);
    xs[i] = ts;
    yc[i] = eval_nonlinearity_pointwise(phi, v, r, cubic, bh, 0.01 * ts, 1e-3);
    yg[i] = eval_nonlinearity_pointwise(phi, v, r, grad, bh, 0.01 * ts, 1e-3);
  }
  const DecayFit fc = fit_decay(xs, yc, FitKind::PurePower);
  CHECK(fc.exponent == doctest::Approx(3.0 * a).epsilon(0.035));
  const DecayFit fg = fit_decay(xs, yg, FitKind::PurePower);
  // gradient part: both factors keep t*^{-a} at fixed r; d_v gains one.
  CHECK(fg.exponent >= 2.0 * a - 0.1);
}

TEST_CASE("perturbative gain of the linearised nonlinearity") {
  // For phi_tilde one order below phi_bar, N[bar+tilde] - N[bar] - (linear
  // part) is one order below phi_tilde again (quadratic remainder).
  const auto bar = [](double v, double r) {
    const double ts = v + tstar_height(r, BlackHoleParams(1.0));
    return std::pow(ts, -2.0) * std::exp(-0.1 * (r - 3.0) * (r - 3.0));
  };
  const auto tilde = [](double v, double r) {
    const double ts = v + tstar_height(r, BlackHoleParams(1.0));
    return std::pow(ts, -3.0) * std::exp(-0.05 * (r - 4.0) * (r - 4.0));
  };
  NonlinearitySpec spec;
  spec.cubic_on = true;
  spec.gradient_on = true;

  Eigen::ArrayXd xs(40), yr(40);
  for (int i = 0; i < 40; ++i) {
    const double ts = 50.0 * std::pow(60.0, i / 39.0);
    const double r = 3.5;
    const double v = ts - tstar_height(r, bh);
    const double hv = 0.01 * ts, hr = 1e-3;
    const auto sum = [&](double vv, double rr) { return bar(vv, rr) + tilde(vv, rr); };
    const double n_sum = eval_nonlinearity_pointwise(sum, v, r, spec, bh, hv, hr);
    const double n_bar = eval_nonlinearity_pointwise(bar, v, r, spec, bh, hv, hr);
    // Linearisation by symmetric difference with a small parameter.
    const double eps = 1e-4;
    const auto pert = [&](double vv, double rr) { return bar(vv, rr) + eps * tilde(vv, rr); };
    const auto mert = [&](double vv, double rr) { return bar(vv, rr) - eps * tilde(vv, rr); };
    const double lin = (eval_nonlinearity_pointwise(pert, v, r, spec, bh, hv, hr) -
                        eval_nonlinearity_pointwise(mert, v, r, spec, bh, hv, hr)) /
                       (2.0 * eps);
    xs[i] = ts;
    yr[i] = n_sum - n_bar - lin;
  }
  const DecayFit tilde_fit = [&] {
    Eigen::ArrayXd yt(40);
    for (int i = 0; i < 40; ++i) yt[i] = std::pow(xs[i], -3.0);
    return fit_decay(xs, yt, FitKind::PurePower);
  }();
  const DecayFit rem = fit_decay(xs, yr, FitKind::PurePower);
  CHECK(rem.exponent > tilde_fit.exponent + 1.0 - 0.1);
}

TEST_CASE("picard: linear limit is a single backward solve") {
  CharStrip strip = ern_strip(0);
  NonlinearitySpec off;  // all nonlinearities off
  PicardOptions opt;
  opt.max_iter = 4;
  const auto app = [](double v, double r) {
    return std::exp(-(v - 70.0) * (v - 70.0) / 50.0) * std::exp(-(r - 3.0) * (r - 3.0)) / r;
  };
  const auto [sol, rep] = picard_correct(app, strip, off, opt, bh);
  CHECK(rep.iterations <= 2);
  CHECK(rep.converged);
  // Zero further increments after the first solve.
  if (rep.increments.size() >= 2) CHECK(rep.increments[1] < 1e-12 * rep.increments[0] + 1e-14);
}

TEST_CASE("picard recovers a manufactured semilinear solution at O(h^2)") {
  // Manufactured horizon-regular solution psi = C(v) rho(r), with the
  // analytic source f = Box Phi - N[Phi] fed as external forcing;
  // phi_app = 0, so the loop must build Phi from scratch.
  NonlinearitySpec spec;
  spec.cubic_on = true;
  spec.gradient_on = true;

  const auto C = [](double v) { return 0.05 * std::exp(-(v - 70.0) * (v - 70.0) / 50.0); };
  const auto Cp = [&](double v) { return -2.0 * (v - 70.0) / 50.0 * C(v); };
  const auto rho = [](double r) { return std::exp(-(r - 2.5) * (r - 2.5)); };
  const auto rhop = [&](double r) { return -2.0 * (r - 2.5) * rho(r); };
  const auto rhopp = [&](double r) {
    return (4.0 * (r - 2.5) * (r - 2.5) - 2.0) * rho(r);
  };
  const auto phi_exact = [&](double v, double r) { return C(v) * rho(r) / r; };
  const auto source = [&](double v, double r) {
    // r Box phi = 2 C' rho' + C (D' rho' + D rho'') - (D'/r) C rho.
    const double box = (2.0 * Cp(v) * rhop(r) +
                        C(v) * (metric_D_prime(r, bh) * rhop(r) + metric_D(r, bh) * rhopp(r)) -
                        metric_D_prime(r, bh) / r * C(v) * rho(r)) /
                       r;
    const double hv = 1e-4, hr = 1e-4;
    const double nl = eval_nonlinearity_pointwise(phi_exact, v, r, spec, bh, hv, hr);
    return box - nl;
  };

  const auto err_at = [&](double scale) {
    CharStrip strip;
    strip.radial = RadialGrid::horizon_graded(1.0, 0.2, 1e-3, 1.0, 0.15 * scale, 20.0,
                                              static_cast<int>(24 / scale));
    strip.v0 = 40.0;
    strip.vF = 140.0;
    strip.dv = 0.05 * scale;
    PicardOptions opt;
    opt.max_iter = 8;
    opt.tol = 1e-9;
    const auto zero_app = [](double, double) { return 0.0; };
    const auto [sol, rep] = picard_correct(zero_app, strip, spec, opt, bh, source);
    CHECK(rep.converged);
    double err = 0.0;
    for (int i = 0; i < strip.nv(); ++i)
      for (int j = 0; j < strip.nr(); ++j)
        err = std::max(err, std::abs(sol.values(i, j) -
                                     strip.r(j) * phi_exact(strip.v(i), strip.r(j))));
    return err;
  };
  const double e1 = err_at(1.0);
  const double e2 = err_at(0.5);
  CHECK(e2 < 0.6 * e1);  // second-order-dominated refinement
  CHECK(e2 < 5e-4);
}
