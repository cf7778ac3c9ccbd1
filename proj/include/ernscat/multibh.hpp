// Boosted-ERN superposed geometry: g_m = eta + sum_z chi(x_z/t_z)
// (Phi_z^* g_ERN - eta), global time functions tau, tau_*, and Monte-Carlo
// verification of their causality.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ernscat/geometry.hpp"

namespace ern {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;   // (t, x, y, z)
using Mat4 = Eigen::Matrix4d;

struct BoostParams {
  Vec3 z = Vec3::Zero();
  double gamma() const {
    const double z2 = z.squaredNorm();
    if (z2 >= 1.0) throw std::domain_error("BoostParams: |z| must be < 1");
    return 1.0 / std::sqrt(1.0 - z2);
  }
};

// Lorentz boost (s, x) -> (t_z, x_z); eta-isometry.
Vec4 boost(const Vec4& point, const BoostParams& z);
Mat4 boost_jacobian(const BoostParams& z);  // d(t_z, x_z)/d(s, x)

// Default band chosen so that for |z| <= 0.6 the supports of the two
// centres stay pairwise disjoint (outer < |z|/2 with boost slop) while
// sup rho chi'(rho) ~ 1.9/log(outer/inner) stays below the smallness level
// the causality argument needs.
struct CutoffProfile {
  double inner = 0.04;  // chi = 1 for rho < inner
  double outer = 0.27;  // chi = 0 for rho > outer
  bool log_adapted = true;  // smoothstep in log(rho), keeps sup rho chi' small

  double value(double rho) const;
  double derivative(double rho) const;
  double sup_rho_chi_prime() const;  // numeric sup over the transition
};

struct MultiConfig {
  std::vector<BoostParams> centers;   // must contain z = 0
  CutoffProfile cutoff;
  double T_f = 60.0;                  // admissibility s - |x| > T_f
  double delta = 0.1;                 // far-region margin 1 - |x|/s > delta
  BlackHoleParams bh;

  void validate() const;
  // Sampled verification that the cutoff supports are pairwise disjoint in
  // the admissible region; throws std::domain_error on overlap.
  void check_disjoint_supports() const;
};

Mat4 minkowski_metric();

struct MetricResult {
  Mat4 g;
  Mat4 g_inv;
  int negative_eigenvalues = 0;  // 1 for Lorentzian signature
  bool lorentzian = false;
};

// g_ERN in the (t*, r) chart written in Cartesian (t*, x) components.
Mat4 ern_metric_cartesian(const Vec4& point, const BlackHoleParams& bh);

// Assembled multi metric at a point; exactly eta when all cutoffs vanish and
// exactly the boosted ERN block where one cutoff equals 1.
MetricResult multi_metric(const Vec4& point, const MultiConfig& config);

// tau = s - sum_z chi(|x_z|/t_z) z.x ; tau_* additionally bends to s - |x|
// near null infinity.
double time_function_tau(const Vec4& point, const MultiConfig& config);
double time_function_tau_star(const Vec4& point, const MultiConfig& config);

struct CausalitySample {
  Vec4 point;
  double norm_tau;
  double norm_tau_star;
  double norm_tildeT;  // g(T~, T~) with T~ = g^{-1}(d tau, .)
};

struct CausalityReport {
  int samples = 0;
  double max_norm_tau = -1e300;
  double max_norm_tau_star = -1e300;
  double max_norm_tildeT = -1e300;
  std::vector<CausalitySample> failures;  // entries with any norm >= 0
  bool causal() const { return failures.empty(); }
};

// Monte-Carlo check of g^{-1}(d tau, d tau) < 0 etc. over the uniform region
// {|x_z| > 3M for all z} intersect {1 - |x|/s > delta}; deterministic seed.
CausalityReport time_function_check(const MultiConfig& config, int sample_count,
                                    unsigned long long seed = 20260810ull);

}  // namespace ern
