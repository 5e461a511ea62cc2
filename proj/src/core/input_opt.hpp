#ifndef NLCAP_CORE_INPUT_OPT_HPP
#define NLCAP_CORE_INPUT_OPT_HPP

#include "core/channel.hpp"
#include "core/numerics.hpp"

namespace nlcap {

// Leading-order optimal input distribution in dimensionless form. The radial
// density is N0 * exp(-lambda0 * rho^2) / sqrt(1 + mu^2/3) with lambda0 = u/P
// and N0 = v/(pi*P); u and v depend on gamma_tilde alone.
struct OptimalInputSolution {
  double u = 0.0;
  double v = 0.0;
  double gamma_tilde = 0.0;
  // Constraint residuals |v*I0(u) - 1| and |v*I1(u) - 1|.
  double residual0 = 0.0;
  double residual1 = 0.0;
  // u - v evaluated without subtractive cancellation; downstream corrections
  // divide this difference by gamma_tilde^2.
  double u_minus_v = 0.0;
  bool series_branch = false;
};

// Multipliers of the O(QL) correction to the optimal input density.
struct OptimalInputCorrection {
  double dl1 = 0.0;  // dimensionless
  double dl2 = 0.0;  // 1/mW
  // Residuals of the zeroth and second moments of the density correction,
  // normalized by QL/P and QL respectively.
  double moment0_residual = 0.0;
  double moment2_residual = 0.0;
};

// I_k(u, gamma_tilde) = integral over t in [0, inf) of
// t^k * exp(-u*t) / sqrt(1 + gamma_tilde^2 t^2) dt, for k in {0, 1, 2}.
double constraint_integral(int k, double u, double gamma_tilde,
                           const num::Tolerances& tol = {});

// Solves the pair of normalization constraints v*I0 = 1, v*I1 = 1 for (u, v),
// reduced to a single root problem for u in (0, 1].
OptimalInputSolution solve_leading(double gamma_tilde,
                                   const num::Tolerances& tol = {});

// Closed-form large-nonlinearity limits of (u, v); accuracy O(1/log^2).
// Requires gamma_tilde >= 10.
struct AsymptoticUV {
  double u = 0.0;
  double v = 0.0;
};
AsymptoticUV asymptotic_large(double gamma_tilde);

// Leading-order optimal density at input radius rho for average power P.
double p_opt_leading(double rho, double P, const ChannelParams& params,
                     const OptimalInputSolution& sol);

// Lagrange-multiplier shifts for the O(QL) density correction, chosen so the
// correction preserves total probability and average power.
OptimalInputCorrection delta_lambdas(double P, const ChannelParams& params,
                                     const OptimalInputSolution& sol,
                                     const num::Tolerances& tol = {});

// O(QL) density correction at radius rho; p_opt_leading + p_opt_correction
// is the next-to-leading-order optimal density.
double p_opt_correction(double rho, double P, const ChannelParams& params,
                        const OptimalInputSolution& sol,
                        const OptimalInputCorrection& corr);

}  // namespace nlcap

#endif  // NLCAP_CORE_INPUT_OPT_HPP
