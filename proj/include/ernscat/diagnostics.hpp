// Measured quantities: decay-exponent fits, Aretakis charge, T-energy
// fluxes, conformal-duality residuals and horizon regularity probes.
#pragma once

#include <functional>
#include <vector>

#include "ernscat/evolution.hpp"
#include "ernscat/grid.hpp"

namespace ern {

enum class FitKind { PurePower, PowerLog };

struct DecayFit {
  double exponent = 0.0;   // p in |y| ~ A x^{-p} log^k x
  int logpower = 0;
  double amplitude = 0.0;  // A
  double rms = 0.0;        // rms of log-residuals over the window
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Least-squares fit of log|y| against log x (and log log x for PowerLog).
// Requires >= 20 usable samples spanning >= 1.5 decades.
DecayFit fit_decay(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, FitKind kind);

struct EnergyRecord {
  double tau = 0.0;
  double energy = 0.0;
  double t_term = 0.0;       // transversal (time) part
  double radial_term = 0.0;  // D-weighted radial part
  double angular_term = 0.0;
  double covered_fraction = 1.0;  // < 1 when the slice is clipped by the strip
};

// T-energy flux through the hyperboloidal slice t* = tau:
//   E = 4*pi INT [ |h'| (psi_v + D psi_r / 2 - ...)^2 + coercive radial + angular ] dr
// written in terms of phi = psi/r; every component is nonnegative because
// dt* is timelike.  The slice is traced through the strip in (v, r).
EnergyRecord t_energy(const ModeField& field, double tau, const BlackHoleParams& params);

// Companion flux on a {t = tau} slice (exterior only; the 1/D weight
// degenerates at the horizon, so the slice is clipped at r_min_eff).
EnergyRecord t_energy_static_slice(const ModeField& field, double tau,
                                   const BlackHoleParams& params, double r_min_eff);

// Aretakis charge 4*pi d_r(r phi)|_{r=M} at fixed v (one-sided stencil).
double aretakis_charge(const ModeField& field, double v, const BlackHoleParams& params);
Eigen::ArrayXd aretakis_charge_history(const ModeField& field, const BlackHoleParams& params);

// Sup-norm of Box(Omega Phi^* phi) - Omega^3 Phi^*(source) over the overlap
// region; `conformal_power` is 3 for the true identity (2 gives the
// negative control).  phi and source are smooth functions of (v, r).
double duality_residual(const std::function<double(double, double)>& phi,
                        const std::function<double(double, double)>& source,
                        const CharStrip& strip, const BlackHoleParams& params,
                        double support_lo, double support_hi,
                        int conformal_power = 3);

enum class ProbeFlag { CLEAR, RAISED };

struct RegularityProbe {
  Eigen::ArrayXd v;
  Eigen::ArrayXd deriv;        // |d_r^k phi| at r = M, stencil scale s
  Eigen::ArrayXd deriv_coarse; // same at stencil scale 2s
  double growth_exponent = 0.0;  //
  double refinement_ratio = 1.0; // median |deriv| / |deriv_coarse|
  ProbeFlag flag = ProbeFlag::CLEAR;
};

// k-th transversal derivative history of phi at the horizon.  The flag keys
// on stencil-scale convergence: a field smooth in r has ratio -> 1 between
// the s and 2s stencils, while a (r-M)^p kink with p < k diverges like
// s^{p-k} and trips the probe.  The fitted t*-growth rate of the history is
// reported alongside (transversal derivatives of smooth fields may grow
// polynomially on an extremal horizon, so growth alone is not flagged).
RegularityProbe horizon_regularity_probe(
    const std::function<double(double, double)>& phi, int k,
    const BlackHoleParams& params, double v_lo, double v_hi, int n_times,
    double stencil_scale);

RegularityProbe horizon_regularity_probe(const ModeField& field, int k,
                                         const BlackHoleParams& params);

// Decay-order sampling of a pointwise residual toward each boundary face.
enum class Face { I, IPLUS, K, F };

struct FaceFit {
  Face face;
  DecayFit fit;
  bool below_floor = false;  // residual at noise level; order treated as +inf
};

// |resid| sampled along face-adapted curves and fitted:
//   IPLUS: sup over rays r = kappa * t*, fitted against t*
//   K:     sup over a fixed r-window per t* slice, fitted against t*
//   F:     sup over a fixed rfrak-window (r = M + rfrak/v), fitted against v
//   I:     fixed u, fitted against rho_I = t*/r as r grows
FaceFit fit_face_decay(const std::function<double(double, double)>& resid, Face face,
                       const BlackHoleParams& params, double t_lo, double t_hi,
                       double r_max, double floor = 1e-13);

}  // namespace ern
