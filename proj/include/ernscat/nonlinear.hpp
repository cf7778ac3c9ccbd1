// Semilinear nonlinearity N[phi] = phi^3 + g^{-1}(d phi, d phi) in the
// (v, r) chart and the Picard loop correcting an approximate solution to an
// exact one, in spherical symmetry.
#pragma once

#include <functional>

#include "ernscat/diagnostics.hpp"
#include "ernscat/evolution.hpp"

namespace ern {

struct NonlinearitySpec {
  bool cubic_on = false;
  bool gradient_on = false;
  bool any() const { return cubic_on || gradient_on; }
};

// N[phi] = phi^3 + D (d_r phi)^2 + 2 (d_v phi)(d_r phi), second-order
// stencils; l = 0 only.  Returns the co-located source array.
Eigen::ArrayXXd eval_nonlinearity(const ModeField& field, const NonlinearitySpec& spec,
                                  const BlackHoleParams& params);

// Pointwise version on a callable phi(v, r).
double eval_nonlinearity_pointwise(const std::function<double(double, double)>& phi,
                                   double v, double r, const NonlinearitySpec& spec,
                                   const BlackHoleParams& params, double hv, double hr);

struct PicardReport {
  std::vector<double> increments;        // weighted sup norms per iterate
  std::vector<double> contraction;       // successive ratios
  double final_residual = 0.0;           // sup |apply_box - N - f_ext| on the strip
  int iterations = 0;
  bool converged = false;
};

struct PicardOptions {
  double tol = 1e-9;
  int max_iter = 12;
  double weight_q = 2.0;    // contraction norm weight t*^q
  double T_f = 0.0;         // earliest time of the correction region (0: whole strip)
};

// Iterates phi_{n+1} = backward-solve of
//   Box phi = (N[phi_app + phi_n] - N[phi_app]) - (Box phi_app - N[phi_app] - f_ext)
// with zero final data, so the limit solves Box(phi_app+phi) = N[phi_app+phi] + f_ext.
// phi_app enters via its evaluation and discrete residual on the strip.
std::pair<ModeField, PicardReport> picard_correct(
    const std::function<double(double, double)>& phi_app, const CharStrip& strip,
    const NonlinearitySpec& spec, const PicardOptions& opt, const BlackHoleParams& params,
    const std::function<double(double, double)>& f_ext = nullptr);

}  // namespace ern
