// The three boundary-face model operators and their inverses on
// spherical-harmonic modes:
//   N_K  = r^{-2} d_r(D r^2 d_r .) + r^{-2} lap      (zero-frequency)
//   N_+  = -2 d_u d_r - 2 r^{-1} d_u + Delta_r        (flat wave operator)
//   N_F  = 2 d_v d_r + d_r (r-M)^2 d_r + M^{-2} lap   (near-horizon)
// together with a numerical check of their error against the full operator.
//
// Note D r^2 = (r-M)^2 exactly, so the radial part of N_K is an Euler
// operator with homogeneous solutions (r-M)^l and (r-M)^{-l-1}.
#pragma once

#include <functional>

#include "ernscat/diagnostics.hpp"
#include "ernscat/evolution.hpp"
#include "ernscat/grid.hpp"

namespace ern {

enum class RadialVariable { R, INV_R, SIMILARITY };

// A sampled radial profile with power-law continuations fitted at both ends,
// so that evaluation slightly outside the table stays meaningful.
struct RadialProfile {
  Eigen::ArrayXd grid;    // strictly increasing
  Eigen::ArrayXd values;
  RadialVariable variable = RadialVariable::R;

  void validate() const;
  double operator()(double x) const;  // local Lagrange inside, fitted tails outside
  double derivative(double x) const;

  // Fit |values| ~ A x^{-p} over the outer `frac` of the table.
  DecayFit tail_fit(double frac = 0.25) const;
  // Fit |values| ~ A (x - x0)^{p} over the inner `frac` of the table.
  DecayFit head_fit(double x0, double frac = 0.15) const;
};

struct DecayWindow {
  double a_plus = 0.5;  // in (0, 1)
  double a_F = -0.5;    // in (-1, 0)
  DecayWindow() = default;
  DecayWindow(double ap, double af) : a_plus(ap), a_F(af) {
    if (!(ap > 0.0 && ap < 1.0)) throw std::domain_error("DecayWindow: a_plus in (0,1)");
    if (!(af > -1.0 && af < 0.0)) throw std::domain_error("DecayWindow: a_F in (-1,0)");
  }
};

// Unique solution of N_K phi = f with tails in the window: l = 0 via the
// explicit Green construction from {1, 1/(r-M)}, l >= 1 via two-sided
// shooting of the homogeneous solutions glued by their Wronskian at 2M.
// f is sampled on a grid in r (variable R); preconditions on the tails are
// checked by fits and raise std::domain_error.
RadialProfile invert_K(const RadialProfile& f, ModeIndex mode, const DecayWindow& window,
                       const BlackHoleParams& params, bool check_tails = true);

// Apply N_K to a profile (discrete, second order); for tests.
RadialProfile apply_K(const RadialProfile& phi, ModeIndex mode, const BlackHoleParams& params);

struct SimilaritySolution {
  RadialProfile profile;        // phi_bar(rfrak), decaying as rfrak -> inf
  double leading_power = 0.0;   // rfrak^p behaviour at 0
  bool smooth_at_horizon = true;  // p integer
  double first_integral_const = 0.0;
};

// Homogeneous similarity solution with d phi_bar = rfrak^{p-1}(rfrak+2)^{-(1+p)},
// normalised to decay at infinity; closed form ((rfrak/(rfrak+2))^p - 1)/(2p).
SimilaritySolution similarity_homogeneous(double p, const Eigen::ArrayXd& rfrak_grid);
double similarity_homogeneous_value(double p, double rfrak);
double similarity_homogeneous_slope(double p, double rfrak);

// Minimal decaying particular solution of the v^{-p}-reduced near-horizon
// equation in first-integral form
//   (rfrak^2 + 2 rfrak) d phi_bar - 2 p phi_bar = G + const,  G = int g.
SimilaritySolution invert_F_similarity(double p, const RadialProfile& g, ModeIndex mode);

// Residual of the reduced similarity operator
//   -2p d_rfrak + d_rfrak (rfrak^2 + 2 rfrak) d_rfrak
// applied to v^{-p} phi_bar, evaluated with second-order stencils.
Eigen::ArrayXd similarity_operator_residual(double p, const RadialProfile& phi_bar);

// Backward scattering solve of the flat operator (M = 0) attaining
// r phi|_I = psi_I at the outer boundary, with center regularity imposed.
// psi_I is a function of retarded time u; f(v, r) an optional source.
ModeField solve_minkowski_mode(const std::function<double(double)>& psi_I,
                               const std::function<double(double, double)>& f,
                               ModeIndex mode, const CharStrip& strip);

// (Box_ERN - N_face) phi sampled pointwise and fitted toward the face;
// returns the fitted decay of the difference and of Box phi for reference.
struct NormalOpErrorReport {
  FaceFit difference;
  FaceFit reference;
  double gain = 0.0;  // difference exponent - reference exponent
  double sup_difference = 0.0;
};

NormalOpErrorReport normal_operator_error(const std::function<double(double, double)>& phi,
                                          Face face, ModeIndex mode,
                                          const BlackHoleParams& params,
                                          double t_lo, double t_hi, double r_max);

// Pointwise discrete operators on a smooth field phi(v, r) (for the error
// lemma check and the duality tests).
double box_ern_pointwise(const std::function<double(double, double)>& phi, double v, double r,
                         ModeIndex mode, const BlackHoleParams& params, double hv, double hr);
double model_op_pointwise(const std::function<double(double, double)>& phi, Face face,
                          double v, double r, ModeIndex mode, const BlackHoleParams& params,
                          double hv, double hr);

}  // namespace ern
