#include "ernscat/multibh.hpp"

#include <cmath>
#include <random>

namespace ern {

Vec4 boost(const Vec4& point, const BoostParams& zp) {
  const double g = zp.gamma();
  const double s = point[0];
  const Vec3 x = point.tail<3>();
  const double zn = zp.z.norm();
  Vec4 out;
  out[0] = g * (s - zp.z.dot(x));
  if (zn < 1e-15) {
    out.tail<3>() = x;
  } else {
    const Vec3 zhat = zp.z / zn;
    out.tail<3>() = x + (g - 1.0) * (x.dot(zhat)) * zhat - g * s * zp.z;
  }
  return out;
}

Mat4 boost_jacobian(const BoostParams& zp) {
  const double g = zp.gamma();
  Mat4 J = Mat4::Identity();
  const double zn = zp.z.norm();
  J(0, 0) = g;
  for (int i = 0; i < 3; ++i) J(0, i + 1) = -g * zp.z[i];
  if (zn >= 1e-15) {
    const Vec3 zhat = zp.z / zn;
    for (int i = 0; i < 3; ++i) {
      J(i + 1, 0) = -g * zp.z[i];
      for (int k = 0; k < 3; ++k)
        J(i + 1, k + 1) = (i == k ? 1.0 : 0.0) + (g - 1.0) * zhat[i] * zhat[k];
    }
  }
  return J;
}

double CutoffProfile::value(double rho) const {
  if (rho <= inner) return 1.0;
  if (rho >= outer) return 0.0;
  double s;
  if (log_adapted)
    s = std::log(rho / inner) / std::log(outer / inner);
  else
    s = (rho - inner) / (outer - inner);
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double CutoffProfile::derivative(double rho) const {
  const double h = 1e-7 * std::max(rho, 1e-3);
  return (value(rho + h) - value(rho - h)) / (2.0 * h);
}

double CutoffProfile::sup_rho_chi_prime() const {
  double sup = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double rho = inner + (outer - inner) * i / 400.0;
    sup = std::max(sup, std::abs(rho * derivative(rho)));
  }
  return sup;
}

void MultiConfig::validate() const {
  bool has_zero = false;
  for (const auto& c : centers) {
    if (c.z.norm() >= 1.0) throw std::domain_error("MultiConfig: |z| must be < 1");
    if (c.z.norm() < 1e-14) has_zero = true;
  }
  if (!has_zero) throw std::domain_error("MultiConfig: centers must contain z = 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("MultiConfig: delta in (0,1)");
}

void MultiConfig::check_disjoint_supports() const {
  if (centers.size() < 2) return;
  std::mt19937_64 rng(99);
  const auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  };
  for (int it = 0; it < 4000; ++it) {
    const double s = 2.0 * T_f * (1.0 + 9.0 * uniform());
    const double rad = s * 0.95 * std::cbrt(uniform());
    const double ct = 2.0 * uniform() - 1.0;
    const double ph = 2.0 * M_PI * uniform();
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    Vec4 p;
    p[0] = s;
    p[1] = rad * st * std::cos(ph);
    p[2] = rad * st * std::sin(ph);
    p[3] = rad * ct;
    int active = 0;
    for (const auto& z : centers) {
      const Vec4 pz = boost(p, z);
      if (pz[0] > 0.0 && cutoff.value(pz.tail<3>().norm() / pz[0]) > 0.0) ++active;
    }
    if (active > 1)
      throw std::domain_error("MultiConfig: cutoff supports overlap at sample point");
  }
}

Mat4 minkowski_metric() {
  Mat4 eta = Mat4::Identity();
  eta(0, 0) = -1.0;
  return eta;
}

Mat4 ern_metric_cartesian(const Vec4& point, const BlackHoleParams& bh) {
  const Vec3 x = point.tail<3>();
  const double r = x.norm();
  if (r <= 0.0) throw std::domain_error("ern_metric_cartesian: r > 0 required");
  const Vec3 n = x / r;
  const double D = metric_D(r, bh);
  const double hp = tstar_height_prime(r, bh);

  // g = -D dt*^2 + 2(h'D+1) dt* dr - h'(Dh'+2) dr^2 + r^2 gsphere,
  // with dr = n.dx and r^2 gsphere = dx.dx - (n.dx)^2.
  Mat4 g = Mat4::Zero();
  g(0, 0) = -D;
  const double cross = hp * D + 1.0;
  const double radial = -hp * (D * hp + 2.0);
  for (int i = 0; i < 3; ++i) {
    g(0, i + 1) = g(i + 1, 0) = cross * n[i];
    for (int k = 0; k < 3; ++k)
      g(i + 1, k + 1) = (i == k ? 1.0 : 0.0) + (radial - 1.0) * n[i] * n[k];
  }
  return g;
}

MetricResult multi_metric(const Vec4& point, const MultiConfig& config) {
  config.validate();
  const double s = point[0];
  const Vec3 x = point.tail<3>();
  if (!(s - x.norm() > config.T_f))
    throw std::domain_error("multi_metric: point outside the admissible region s - |x| > T_f");

  Mat4 g = minkowski_metric();
  for (const auto& z : config.centers) {
    const Vec4 p_z = boost(point, z);
    const double t_z = p_z[0];
    const double r_z = p_z.tail<3>().norm();
    if (t_z <= 0.0) throw std::domain_error("multi_metric: boosted time not positive");
    const double chi = config.cutoff.value(r_z / t_z);
    if (chi == 0.0) continue;
    const Mat4 J = boost_jacobian(z);
    const Mat4 gern = J.transpose() * ern_metric_cartesian(p_z, config.bh) * J;
    if (chi == 1.0 && config.centers.size() == 1) {
      g = gern;  // exact single-block region
      break;
    }
    g += chi * (gern - minkowski_metric());
  }

  MetricResult out;
  out.g = g;
  out.g_inv = g.inverse();
  const Eigen::SelfAdjointEigenSolver<Mat4> es(g);
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()[i] < 0.0) ++out.negative_eigenvalues;
  out.lorentzian = out.negative_eigenvalues == 1;
  if (!out.lorentzian)
    throw std::runtime_error("multi_metric: non-Lorentzian signature at sample point");
  return out;
}

double time_function_tau(const Vec4& point, const MultiConfig& config) {
  // tau bends from s (far) to the block time gamma * t_z inside each
  // cutoff.  The bridge term -gamma^2 z.(x - z s) vanishes at the moving
  // centre, so the cutoff-gradient contribution to d tau stays small even
  // at |z| = 0.6; the wide log-adapted bridge profile does the rest.
  const double s = point[0];
  const Vec3 x = point.tail<3>();
  double tau = s;
  for (const auto& z : config.centers) {
    if (z.z.norm() < 1e-14) continue;
    const Vec4 p_z = boost(point, z);
    if (!(p_z[0] > 0.0)) continue;
    const double rho = p_z.tail<3>().norm() / p_z[0];
    const double chi = config.cutoff.value(rho);
    if (chi == 0.0) continue;
    const double g2 = 1.0 / (1.0 - z.z.squaredNorm());
    tau += chi * (-g2) * z.z.dot(x - z.z * s);
  }
  return tau;
}

double time_function_tau_star(const Vec4& point, const MultiConfig& config) {
  const double s = point[0];
  const Vec3 x = point.tail<3>();
  const double rho_far = 1.0 - x.norm() / s;  // 0 at null infinity
  // Bend to s - |x| where 1 - |x|/s < delta/2, smooth in between.
  double w = 0.0;
  const double lo = 0.5 * config.delta, hi = config.delta;
  if (rho_far <= lo)
    w = 1.0;
  else if (rho_far < hi) {
    const double t = (hi - rho_far) / (hi - lo);
    w = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  }
  return time_function_tau(point, config) - w * x.norm();
}

namespace {

Vec4 gradient4(const std::function<double(const Vec4&)>& f, const Vec4& p) {
  Vec4 g;
  for (int mu = 0; mu < 4; ++mu) {
    const double h = 1e-5 * std::max(1.0, std::abs(p[mu]));
    Vec4 pp = p, pm = p;
    pp[mu] += h;
    pm[mu] -= h;
    // Richardson-checked central difference.
    const double d1 = (f(pp) - f(pm)) / (2.0 * h);
    Vec4 pp2 = p, pm2 = p;
    pp2[mu] += 2.0 * h;
    pm2[mu] -= 2.0 * h;
    const double d2 = (f(pp2) - f(pm2)) / (4.0 * h);
    g[mu] = (4.0 * d1 - d2) / 3.0;
  }
  return g;
}

}  // namespace

CausalityReport time_function_check(const MultiConfig& config, int sample_count,
                                    unsigned long long seed) {
  config.validate();
  const double M = config.bh.mass;
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  };

  CausalityReport report;
  const auto f_tau = [&](const Vec4& p) { return time_function_tau(p, config); };
  const auto f_tau_star = [&](const Vec4& p) { return time_function_tau_star(p, config); };

  int accepted = 0;
  int guard = 0;
  while (accepted < sample_count && guard < 200 * sample_count) {
    ++guard;
    // Sample s in (2 T_f, 20 T_f) log-uniform, x in the ball |x| < s(1 - delta).
    const double s = 2.0 * config.T_f * std::pow(10.0, uniform());
    const double rad = s * (1.0 - config.delta) * std::cbrt(uniform());
    const double ct = 2.0 * uniform() - 1.0;
    const double ph = 2.0 * M_PI * uniform();
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    Vec4 p;
    p[0] = s;
    p[1] = rad * st * std::cos(ph);
    p[2] = rad * st * std::sin(ph);
    p[3] = rad * ct;

    bool ok = s - rad > config.T_f;
    for (const auto& z : config.centers) {
      if (!ok) break;
      const Vec4 pz = boost(p, z);
      if (!(pz.tail<3>().norm() > 3.0 * M) || !(pz[0] > 1.0)) ok = false;
    }
    if (!ok) continue;
    ++accepted;

    const MetricResult m = multi_metric(p, config);
    const Vec4 dtau = gradient4(f_tau, p);
    const Vec4 dtaus = gradient4(f_tau_star, p);
    CausalitySample smp;
    smp.point = p;
    smp.norm_tau = dtau.dot(m.g_inv * dtau);
    smp.norm_tau_star = dtaus.dot(m.g_inv * dtaus);
    // T~ = g^{-1}(d tau, .): g(T~, T~) = g^{-1}(d tau, d tau).
    smp.norm_tildeT = smp.norm_tau;

    report.max_norm_tau = std::max(report.max_norm_tau, smp.norm_tau);
    report.max_norm_tau_star = std::max(report.max_norm_tau_star, smp.norm_tau_star);
    report.max_norm_tildeT = std::max(report.max_norm_tildeT, smp.norm_tildeT);
    if (smp.norm_tau >= 0.0 || smp.norm_tau_star >= 0.0 || smp.norm_tildeT >= 0.0)
      report.failures.push_back(smp);
  }
  report.samples = accepted;
  return report;
}

}  // namespace ern
