#include "ernscat/ansatz.hpp"

#include <cmath>
#include <iostream>

namespace ern {

// ------------------------------------------------------------ index sets

IndexSet IndexSet::closure_of(std::initializer_list<std::pair<double, int>> pts) {
  IndexSet e;
  for (const auto& p : pts) e.generators.insert(p);
  return e;
}

bool IndexSet::contains(double z, int k) const {
  if (k < 0) return false;
  for (const auto& [z0, k0] : generators) {
    const double shift = z - z0;
    const double rounded = std::round(shift);
    if (rounded >= -1e-9 && std::abs(shift - rounded) < 1e-9 && k <= k0) return true;
  }
  return false;
}

std::vector<std::pair<double, int>> IndexSet::enumerate(double z_max) const {
  std::vector<std::pair<double, int>> out;
  for (const auto& [z0, k0] : generators) {
    for (int m = 0;; ++m) {
      const double z = z0 + m;
      if (z > z_max + 1e-9) break;
      for (int k = 0; k <= k0; ++k) out.emplace_back(z, k);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) {
                          return std::abs(a.first - b.first) < 1e-9 && a.second == b.second;
                        }),
            out.end());
  return out;
}

double IndexSet::min_power() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [z, k] : generators) m = std::min(m, z);
  return m;
}

IndexSet index_union(const IndexSet& e1, const IndexSet& e2) {
  // {(z, k) : (z, k_i) in E^i, k <= k_1 + k_2 + 1}; generators are formed
  // from pairs with matching power ladders.
  IndexSet out;
  for (const auto& [z1, k1] : e1.generators) {
    for (const auto& [z2, k2] : e2.generators) {
      // common powers are z = max ladder base + integer shifts
      const double base = std::max(z1, z2);
      const double s1 = base - z1, s2 = base - z2;
      if (std::abs(s1 - std::round(s1)) > 1e-9 || std::abs(s2 - std::round(s2)) > 1e-9)
        continue;
      out.generators.insert({base, k1 + k2 + 1});
    }
  }
  return out;
}

// --------------------------------------------------------------- cutoffs

namespace {

inline double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

}  // namespace

double cutoff_seed(double x) { return 1.0 - smoothstep5((x - 0.5) / 0.5); }
double cutoff_far(double r, double M) { return smoothstep5((r - 5.0 * M) / (5.0 * M)); }
double cutoff_near(double r, double M) { return 1.0 - smoothstep5((r - 2.0 * M) / (0.5 * M)); }
double cutoff_K(double r, double ts, double M) {
  const double a = smoothstep5((r - M) * ts - 1.0);                 // away from F
  const double b = 1.0 - smoothstep5((r / ts - 0.1) / 0.1);         // away from i+
  return a * b;
}

// -------------------------------------------------------------- seed data

double SeedData::operator()(double u) const {
  if (u <= u_on) return 0.0;
  const double taper = smoothstep5((u - u_on) / (u_full - u_on));
  double bare;
  if (!series.empty()) {
    bare = 0.0;
    for (const auto& [p, c] : series) bare += c * std::pow(u, -p);
  } else {
    bare = fn ? fn(u) : 0.0;
  }
  return taper * bare;
}

double SeedData::derivative(double u) const {
  const double e = 1e-5 * std::max(1.0, std::abs(u));
  return ((*this)(u + e) - (*this)(u - e)) / (2.0 * e);
}

// -------------------------------------------------------------- poly terms

double PolyTerm::phi(double v, double r, const BlackHoleParams& params) const {
  const double M = params.mass;
  switch (kind) {
    case TermKind::SEED:
      return 0.0;  // handled by the ansatz (needs the data handle)
    case TermKind::IPLUS: {
      // Self-similar in the shifted time ts - C (C the far-branch constant
      // of the height function), which tracks retarded time at the data
      // wedge without the blend offset.
      const double chi = cutoff_far(r, M);
      if (chi == 0.0) return 0.0;
      const double ts = v + tstar_height(r, params) - tstar_far_offset(params);
      if (ts <= 1.0) return 0.0;
      const double lp = logpower == 0 ? 1.0 : std::pow(std::log(ts), logpower);
      return std::pow(ts, -power) * lp * profile(r / ts) * chi;
    }
    case TermKind::K: {
      const double ts = v + tstar_height(r, params);
      if (ts <= 1.0) return 0.0;
      const double chi = cutoff_K(r, ts, M);
      if (chi == 0.0) return 0.0;
      const double lp = logpower == 0 ? 1.0 : std::pow(std::log(ts), logpower);
      return std::pow(ts, -power) * lp * profile(r) * chi;
    }
    case TermKind::F: {
      const double chi = cutoff_near(r, M);
      if (chi == 0.0 || v <= 1.0) return 0.0;
      // The profile extends smoothly across the horizon by its polynomial
      // head; clamp deep inside where the strip never reaches.
      const double rf = std::max((r - M) * v, -1.5);
      const double lp = logpower == 0 ? 1.0 : std::pow(std::log(v), logpower);
      return std::pow(v, -power) * lp * profile(rf) * chi;
    }
    case TermKind::ARETAKIS: {
      const double chi = cutoff_near(r, M);
      if (chi == 0.0) return 0.0;
      const double ts = v - (r - M);
      if (ts <= 0.5) return 0.0;
      return coefficient * chi * (1.0 / ts - (r - M) / ((r - M) * ts + 2.0));
    }
  }
  return 0.0;
}

// ----------------------------------------------------------------- ansatz

double Ansatz::phi(double v, double r) const {
  const double M = params.mass;
  double acc = 0.0;
  // Seed term r phi0 = psi_I(u) chi(u/r).
  const double u = v - 2.0 * tortoise(r, params);
  const double chi = cutoff_seed(u / r);
  if (chi > 0.0) acc += data(u) * chi / r;
  for (const auto& t : terms) acc += t.phi(v, r, params);
  (void)M;
  return acc;
}

namespace {

// Fourth-order pointwise residual operator on a smooth phi(v, r):
//   Box phi - N[phi] ; local scales adapt to the (r - M) ~ 1/v structure.
struct ResidualOperator {
  const Ansatz& a;

  double operator()(double v, double r) const {
    // Stencil scales adapted to all three structures present: the
    // self-similar (r-M) ~ 1/v zone near the horizon, the power laws in
    // t*, and the retarded-time profile of the data near null infinity.
    const double zeta = std::abs(r - a.params.mass);
    const double u = v - 2.0 * tortoise(std::max(r, 1e-6), a.params);
    const double su = std::max(2.0, std::min(std::abs(u), v));
    const double r_scale =
        std::min(std::min(std::max(zeta, 1.0 / std::max(v, 10.0)), 1.0), 0.35 * su);
    const double hr = 0.02 * r_scale;
    const double hv = 0.01 * std::min(std::max(v, 10.0), 3.0 * su);
    const auto psi = [&](double vv, double rr) { return rr * a.phi(vv, rr); };

    static const double w1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    // d_r psi at v +/- offsets (4th order in both directions).
    double dvdr = 0.0;
    for (int ai = 0; ai < 5; ++ai) {
      if (ai == 2) continue;
      double drp = 0.0;
      for (int bi = 0; bi < 5; ++bi) {
        if (bi == 2) continue;
        drp += w1[bi] * psi(v + (ai - 2) * hv, r + (bi - 2) * hr) / hr;
      }
      dvdr += w1[ai] * drp / hv;
    }

    // d_r(D d_r psi): W(b) = D * d_r psi at r + b*hr, then 4th-order d_r W.
    double dW = 0.0;
    for (int bi = 0; bi < 5; ++bi) {
      if (bi == 2) continue;
      const double rb = r + (bi - 2) * hr;
      double drp = 0.0;
      for (int ci = 0; ci < 5; ++ci) {
        if (ci == 2) continue;
        drp += w1[ci] * psi(v, rb + (ci - 2) * hr) / hr;
      }
      dW += w1[bi] * metric_D(rb, a.params) * drp / hr;
    }

    const double ps = psi(v, r);
    const double box = (2.0 * dvdr + dW - metric_D_prime(r, a.params) / r * ps) / r;

    double nonlin = 0.0;
    if (a.semilinear && a.nonlinearity.any()) {
      const auto phi_fn = [&](double vv, double rr) { return a.phi(vv, rr); };
      nonlin = eval_nonlinearity_pointwise(phi_fn, v, r, a.nonlinearity, a.params, hv, hr);
    }
    return box - nonlin;
  }
};

}  // namespace

double Ansatz::residual(double v, double r) const {
  return ResidualOperator{*this}(v, r);
}

ModeField Ansatz::evaluate(const CharStrip& strip, bool with_residual_source) const {
  ModeField out;
  out.strip = strip;
  out.mode = ModeIndex(0);
  out.allocate();
  for (int i = 0; i < strip.nv(); ++i)
    for (int j = 0; j < strip.nr(); ++j)
      out.values(i, j) = strip.r(j) * phi(strip.v(i), strip.r(j));
  if (with_residual_source) {
    Eigen::ArrayXXd src(strip.nv(), strip.nr());
    const ResidualOperator R{*this};
    for (int i = 0; i < strip.nv(); ++i)
      for (int j = 0; j < strip.nr(); ++j) src(i, j) = R(strip.v(i), strip.r(j));
    out.source = src;
  }
  return out;
}

HorizonData Ansatz::horizon_data(double v_lo, double v_hi, int n) const {
  HorizonData out;
  out.v = Eigen::ArrayXd::Zero(n);
  out.phi = Eigen::ArrayXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double v = v_lo * std::pow(v_hi / v_lo, static_cast<double>(i) / (n - 1));
    out.v[i] = v;
    out.phi[i] = phi(v, params.mass);
  }
  return out;
}

Ansatz seed_from_data(const SeedData& data, double q, const BlackHoleParams& params,
                      bool semilinear) {
  if (semilinear && !(q > 1.5))
    throw std::domain_error("seed_from_data: semilinear mode needs q > 3/2");
  if (!(q > 0.5)) throw std::domain_error("seed_from_data: needs q > 1/2");
  Ansatz a;
  a.params = params;
  a.data = data;
  a.data_exponent = q;
  a.semilinear = semilinear;
  a.horizon_index_set = IndexSet{};
  return a;
}

FaceOrders measure_orders(const Ansatz& ansatz, const AnsatzOptions& opt) {
  const ResidualOperator R{ansatz};
  const auto resid = [&R](double v, double r) { return R(v, r); };
  const double floor = 1e-12;
  FaceOrders out{};
  const auto get = [&](Face f, double t_lo) {
    const FaceFit ff =
        fit_face_decay(resid, f, ansatz.params, t_lo, opt.t_hi, opt.r_fit, floor);
    return ff.below_floor ? std::numeric_limits<double>::infinity() : ff.fit.exponent;
  };
  out.p_I = get(Face::I, std::max(opt.t_lo, 20.0));
  out.p_plus = get(Face::IPLUS, std::max(opt.t_lo, 60.0));
  out.p_K = get(Face::K, std::max(opt.t_lo, 60.0));
  out.p_F = get(Face::F, std::max(opt.t_lo, 60.0));
  return out;
}

double FaceOrders::min_order() const {
  return std::min(std::min(p_plus, p_K), p_F);
}

namespace {

// ---- far-region (flat model operator) solve by double null integration ----
//
// In the identification ubar = u_ERN, vbar = ubar + 2r one has
// -4 d_ubar d_vbar psi = r * N_+ phi, so the zero-data-at-infinity inverse is
// a cumulative double integral from the future corner.
PolyTerm solve_iplus(const Ansatz& a, double p_phi, const AnsatzOptions& opt) {
  const BlackHoleParams& params = a.params;
  const double M = params.mass;
  const ResidualOperator R{a};

  const double u_lo = std::max(2.0, opt.t_lo * 0.2);
  const double u_hi = 8.0 * opt.t_ref;
  const double vb_lo = u_lo + 2.0 * 2.0 * M;
  const double vb_hi = u_hi + 2.0 * opt.r_far;
  const int nu = 560, nvb = 1100;
  const double du = (u_hi - u_lo) / (nu - 1);
  const double dvb = (vb_hi - vb_lo) / (nvb - 1);

  // Source r * chi_far * resid at the lattice.
  Eigen::ArrayXXd S = Eigen::ArrayXXd::Zero(nu, nvb);
  for (int i = 0; i < nu; ++i) {
    const double ub = u_lo + i * du;
    for (int j = 0; j < nvb; ++j) {
      const double vb = vb_lo + j * dvb;
      const double r = 0.5 * (vb - ub);
      if (r < 4.0 * M || r > opt.r_far) continue;
      const double chi = cutoff_far(r, M);
      if (chi == 0.0) continue;
      const double v = ub + 2.0 * tortoise(r, params);
      // negative: the appended term must remove the cutoff residual
      S(i, j) = -r * chi * R(v, r);
    }
  }

  // psi(ub, vb) = -(1/4) int_ub^inf int_vb^inf S; cumulative from the future
  // corner with a fitted power-law tail in ub appended per column.
  Eigen::ArrayXXd psi = Eigen::ArrayXXd::Zero(nu, nvb);
  Eigen::ArrayXd colsum = Eigen::ArrayXd::Zero(nvb);  // int over vb' >= vb at fixed ub
  for (int i = nu - 1; i >= 0; --i) {
    Eigen::ArrayXd cs = Eigen::ArrayXd::Zero(nvb);
    for (int j = nvb - 2; j >= 0; --j)
      cs[j] = cs[j + 1] + 0.5 * dvb * (S(i, j) + S(i, j + 1));
    if (i == nu - 1) {
      colsum = cs;
      // ub-tail beyond the lattice: the column integral decays like
      // ub^{-(q+1)}, so int_{u_hi}^inf ~ cs * u_hi / q.
      psi.row(i) = (-0.25 * cs * u_hi / std::max(a.data_exponent, 1.0)).transpose();
    } else {
      psi.row(i) = psi.row(i + 1) - 0.25 * 0.5 * du * (cs + colsum).transpose();
      colsum = cs;
    }
  }

  // Extract the self-similar profile W(s) at the reference slice, in the
  // shifted time variable.
  const double C = tstar_far_offset(params);
  const double t_ref = opt.t_ref;
  const int ns = 320;
  Eigen::ArrayXd s_grid(ns), W(ns);
  const double s_min = 0.08, s_max = 6.0;
  for (int k = 0; k < ns; ++k) {
    const double s = s_min * std::pow(s_max / s_min, static_cast<double>(k) / (ns - 1));
    s_grid[k] = s;
    const double r = s * t_ref;
    const double v = (t_ref + C) - tstar_height(r, params);
    const double ub = v - 2.0 * tortoise(r, params);
    const double vb = ub + 2.0 * r;
    double val = 0.0;
    if (ub >= u_lo && ub <= u_hi && vb >= vb_lo && vb <= vb_hi && r > 0.1 * M) {
      const double fi = (ub - u_lo) / du;
      const double fj = (vb - vb_lo) / dvb;
      const int i0 = std::max(0, std::min(nu - 2, static_cast<int>(fi)));
      const int j0 = std::max(0, std::min(nvb - 2, static_cast<int>(fj)));
      const double ai = fi - i0, aj = fj - j0;
      const double p00 = psi(i0, j0), p01 = psi(i0, j0 + 1), p10 = psi(i0 + 1, j0),
                   p11 = psi(i0 + 1, j0 + 1);
      const double ps = (1 - ai) * ((1 - aj) * p00 + aj * p01) + ai * ((1 - aj) * p10 + aj * p11);
      val = ps / r;
    }
    W[k] = val * std::pow(t_ref, p_phi);
  }

  PolyTerm term;
  term.kind = TermKind::IPLUS;
  term.power = p_phi;
  term.logpower = 0;
  term.cutoff_id = "chi_far";
  term.profile.variable = RadialVariable::R;  // tabulated in s = r/t*
  term.profile.grid = s_grid;
  term.profile.values = W;
  return term;
}

// ---- spatially compact solve: parametric slice inversion at t_ref ----
PolyTerm solve_K(const Ansatz& a, double p_f, const AnsatzOptions& opt) {
  const BlackHoleParams& params = a.params;
  const double M = params.mass;
  const ResidualOperator R{a};
  const double t_ref = opt.t_ref * 4.0;

  RadialProfile src;
  src.variable = RadialVariable::R;
  const double zeta_min = 0.2 / t_ref;
  const double r_hi = 0.35 * opt.t_hi;
  src.grid = RadialGrid::horizon_graded(M, 0.0, zeta_min, 0.5 * M, 0.5 * M, r_hi, 24).r;
  const int n = static_cast<int>(src.grid.size());
  src.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = src.grid[i];
    const double chi = cutoff_K(r, t_ref, M);
    const double v = t_ref - tstar_height(r, params);
    src.values[i] = chi == 0.0 ? 0.0 : -chi * R(v, r) * std::pow(t_ref, p_f);
  }

  const RadialProfile G = invert_K(src, ModeIndex(0), DecayWindow(0.5, -0.5), params, false);

  PolyTerm term;
  term.kind = TermKind::K;
  term.power = p_f;
  term.logpower = 0;
  term.cutoff_id = "chi_K";
  term.profile = G;
  return term;
}

// ---- near-horizon solve: similarity extraction + first-integral inverse ----
PolyTerm solve_F(const Ansatz& a, double p_f, const AnsatzOptions& opt) {
  const BlackHoleParams& params = a.params;
  const double M = params.mass;
  const ResidualOperator R{a};
  const double v_ref = opt.v_ref;

  RadialProfile g;
  g.variable = RadialVariable::SIMILARITY;
  const int n = 400;
  const double rf_min = 5e-3, rf_max = std::min(1.4 * M * v_ref, 800.0);
  g.grid.resize(n);
  g.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double rf = rf_min * std::pow(rf_max / rf_min, static_cast<double>(i) / (n - 1));
    const double r = M + rf / v_ref;
    g.grid[i] = rf;
    const double chi = cutoff_near(r, M);
    g.values[i] = chi == 0.0 ? 0.0 : -chi * R(v_ref, r) * std::pow(v_ref, p_f);
  }

  const SimilaritySolution sol = invert_F_similarity(p_f, g, ModeIndex(0));

  PolyTerm term;
  term.kind = TermKind::F;
  term.power = p_f;
  term.logpower = 0;
  term.cutoff_id = "chi_near";
  term.profile = sol.profile;
  return term;
}

}  // namespace

void sweep_face(Ansatz& ansatz, SweepFace face, int ladder_power, const AnsatzOptions& opt) {
  const FaceOrders before = measure_orders(ansatz, opt);
  const double tol = opt.fit_tolerance;

  if (face == SweepFace::IPLUS_AND_F) {
    // Step-1 hypotheses in residual exponents: a_K >= a_+ - 2, a_K >= a_F + 1.
    if (!(before.p_K >= before.p_plus - 2.0 - tol) || !(before.p_K >= before.p_F + 1.0 - tol))
      throw std::runtime_error(
          "sweep_face: IPLUS_AND_F sequencing hypothesis violated (a_+ = " +
          std::to_string(before.p_plus) + ", a_K = " + std::to_string(before.p_K) +
          ", a_F = " + std::to_string(before.p_F) + ")");
    ansatz.terms.push_back(solve_iplus(ansatz, ladder_power, opt));
    if (std::isfinite(before.p_F)) {
      PolyTerm f = solve_F(ansatz, before.p_F < 1e6 ? std::round(before.p_F) : ladder_power, opt);
      ansatz.terms.push_back(f);
      ansatz.horizon_index_set.generators.insert({f.power, f.logpower});
    }
  } else {
    if (!(before.p_K <= before.p_plus - 2.0 + tol) || !(before.p_K <= before.p_F + 1.0 + tol))
      throw std::runtime_error(
          "sweep_face: K sequencing hypothesis violated (a_+ = " +
          std::to_string(before.p_plus) + ", a_K = " + std::to_string(before.p_K) +
          ", a_F = " + std::to_string(before.p_F) + ")");
    ansatz.terms.push_back(solve_K(ansatz, ladder_power, opt));
  }

  const FaceOrders after = measure_orders(ansatz, opt);
  SweepRecord rec;
  rec.index = static_cast<int>(ansatz.history.size());
  rec.face = face == SweepFace::IPLUS_AND_F ? "IPLUS_AND_F" : "K";
  rec.p_I = after.p_I;
  rec.p_plus = after.p_plus;
  rec.p_K = after.p_K;
  rec.p_F = after.p_F;
  ansatz.history.push_back(rec);
  if (opt.verbose)
    std::cerr << "sweep " << rec.index << " (" << rec.face << "): orders I=" << rec.p_I
              << " += " << rec.p_plus << " K=" << rec.p_K << " F=" << rec.p_F << "\n";
}

BuildReport build_ansatz(Ansatz& ansatz, const AnsatzOptions& opt) {
  BuildReport report;
  const double q = opt.q;
  const int N = opt.target_order;
  // Stage-normalised targets for the residual exponents:
  //   a_+ >= N + 2, a_K >= N, a_F >= N - 1.
  const double slack = 0.25;

  int iplus_done = 0, k_done = 0, f_done = 0;
  double last_min = -std::numeric_limits<double>::infinity();
  int stagnant = 0;

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const FaceOrders cur = measure_orders(ansatz, opt);
    const bool done = cur.p_plus >= N + 2 - slack && cur.p_K >= N - slack &&
                      cur.p_F >= N - 1 - slack && f_done >= 1;
    if (done) {
      report.final_orders = cur;
      report.reached_target = true;
      break;
    }

    // Alternate: IPLUS_AND_F first (Step 1), then K (Step 2); the solve
    // powers come from the measured residual exponents, rounded (so runs
    // with proportional data stay exactly linear).
    const bool do_k = (cur.p_K <= cur.p_plus - 2.0 + opt.fit_tolerance) &&
                      (cur.p_K <= cur.p_F + 0.5) && std::isfinite(cur.p_K);
    if (do_k) {
      sweep_face(ansatz, SweepFace::K, static_cast<int>(std::lround(cur.p_K)), opt);
      ++k_done;
    } else {
      const int p_phi = std::max(1, static_cast<int>(std::lround(cur.p_plus)) - 2);
      sweep_face(ansatz, SweepFace::IPLUS_AND_F, p_phi, opt);
      ++iplus_done;
      if (!ansatz.terms.empty() && ansatz.terms.back().kind == TermKind::F) ++f_done;
    }
    ++report.sweeps;

    const FaceOrders now = measure_orders(ansatz, opt);
    const double mn = std::min(std::min(now.p_plus - 2.0, now.p_K), now.p_F + 1.0);
    if (mn <= last_min + 0.1) {
      if (++stagnant >= 2)
        throw std::runtime_error("build_ansatz: no order gain for 2 sweeps (min order " +
                                 std::to_string(mn) + ")");
    } else {
      stagnant = 0;
    }
    last_min = mn;
    report.final_orders = now;
  }

  if (!report.reached_target) {
    const FaceOrders cur = measure_orders(ansatz, opt);
    report.final_orders = cur;
    report.reached_target = cur.p_plus >= N + 2 - slack && cur.p_K >= N - slack &&
                            cur.p_F >= N - 1 - slack;
  }

  // Horizon data fit, in the shifted time (the fit variable used at the
  // other faces); the report carries the window.
  const double C = tstar_far_offset(ansatz.params);
  const HorizonData hd = ansatz.horizon_data(std::max(opt.t_lo, 20.0) + C, 4.0 * opt.t_hi, 64);
  try {
    report.horizon_fit = fit_decay((hd.v - C).eval(), hd.phi, FitKind::PurePower);
  } catch (const std::domain_error&) {
  }
  report.history = ansatz.history;
  return report;
}

CharStrip make_pipeline_strip(const BlackHoleParams& params, double v0, double vF,
                              double r_max, double dr_far, double zeta_in) {
  CharStrip strip;
  strip.v0 = v0;
  strip.vF = vF;
  const double zeta_min = std::min(0.5 / vF, 0.01);
  strip.radial = RadialGrid::horizon_graded(params.mass, zeta_in, zeta_min, 1.0,
                                            dr_far, r_max, 40);
  const double dv_max = max_stable_dv(strip, params, 0.9);
  const int steps = std::max(64, static_cast<int>(std::ceil((vF - v0) / dv_max)));
  strip.dv = (vF - v0) / steps;
  strip.validate();
  return strip;
}

void add_aretakis_mode(Ansatz& ansatz, double c) {
  if (c == 0.0) return;
  PolyTerm term;
  term.kind = TermKind::ARETAKIS;
  term.coefficient = c;
  term.power = 1.0;
  term.cutoff_id = "chi_near";
  // Dummy profile table (the term is closed-form).
  term.profile.variable = RadialVariable::SIMILARITY;
  term.profile.grid = Eigen::ArrayXd::LinSpaced(8, 0.0, 7.0);
  term.profile.values = Eigen::ArrayXd::Zero(8);
  ansatz.terms.push_back(term);
  ansatz.horizon_index_set.generators.insert({1.0, 0});
}

}  // namespace ern
