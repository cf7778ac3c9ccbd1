// Characteristic (v, r) evolution of the mode equation
//
//   2 d_v d_r psi + d_r(D d_r psi) - (D'/r) psi - l(l+1)/r^2 psi = r f,
//
// psi = r*phi, marched in v with the outgoing combination
// G = 2 d_v psi + D d_r psi reconstructed by radial integration of
// d_r G = c(r) psi + r f from the outer boundary (ingoing rays are
// instantaneous in v).  The horizon is an ordinary grid region.
//
// The same engine drives the near-horizon model operator by swapping the
// metric coefficient D -> (r-M)^2 and dropping the first-order terms.
#pragma once

#include <functional>

#include "ernscat/grid.hpp"

namespace ern {

// Metric plug for the marching engine.
struct WaveCoefficients {
  std::function<double(double)> D;        // coefficient of d_r^2
  std::function<double(double)> c;        // zeroth-order coefficient (on psi)
  std::function<double(double)> src_wgt;  // factor multiplying f (r for Box, 1 for models)
};

WaveCoefficients ern_coefficients(const BlackHoleParams& params, ModeIndex mode);
// Near-horizon model operator on phi (not r*phi): D -> (r-M)^2,
// c -> l(l+1)/M^2, unit source weight.
WaveCoefficients near_horizon_coefficients(const BlackHoleParams& params, ModeIndex mode);

// Discrete residual  2 d_v d_r psi + d_r(D d_r psi) - c psi - w f  with
// second-order stencils; edge rows/columns are zero-filled.
ModeField apply_box(const ModeField& field, const BlackHoleParams& params);

// Data for one evolution run.
struct EvolutionProblem {
  CharStrip strip;
  ModeIndex mode;
  // Boundary values psi(v, r_max) and their v-derivative.
  std::function<double(double)> boundary;
  std::function<double(double)> boundary_dv;
  // Source f(v, r) of Box phi = f (zero if absent).
  std::function<double(double, double)> source;
  // Optional Dirichlet value at r_min.
  std::optional<std::function<double(double)>> inner_value;
  // Centre regularity for flat grids starting at r = 0: closes the r = 0
  // stencil by a parity ghost (odd for even l, even for odd l), which keeps
  // psi(v, 0) = 0 to truncation without a destabilising hard pin.
  bool center_regular = false;
  double dissipation = 0.0;  // Kreiss-Oliger coefficient, uniform sub-grids only
};

// Forward march from an initial slice psi(v0, .).
ModeField evolve_forward(const Eigen::ArrayXd& initial_slice, const EvolutionProblem& prob,
                         const BlackHoleParams& params,
                         const WaveCoefficients* coeffs = nullptr);

// Backward march from zero data at v = vF; boundary/source as in `prob`.
// Returns the correction field with Box phi = f.
ModeField evolve_backward(const EvolutionProblem& prob, const BlackHoleParams& params,
                          const WaveCoefficients* coeffs = nullptr);

// Backward correction with the spec'd precondition: the source must decay
// toward vF with fitted exponent > 5/2 (checked; throws std::domain_error).
ModeField solve_backward_correction(const ModeField& residual_source,
                                    const BlackHoleParams& params);

struct RadiationField {
  Eigen::ArrayXd u;        // retarded time u = v - 2 r_*(r_max)
  Eigen::ArrayXd psi;      // r*phi at r_max
  double error_scale = 0;  // O(1/r_max) truncation tag
};

RadiationField read_radiation_field(const ModeField& field, const BlackHoleParams& params);

struct HorizonData {
  Eigen::ArrayXd v;
  Eigen::ArrayXd phi;  // phi = psi / r at r = M
};

HorizonData read_horizon_data(const ModeField& field, const BlackHoleParams& params);

// Largest stable dv for the strip: dv <= cfl * dr_min * min(2/D).
double max_stable_dv(const CharStrip& strip, const BlackHoleParams& params, double cfl = 0.9);

}  // namespace ern
