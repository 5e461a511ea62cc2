#include "core/input_opt.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace nlcap {
namespace {

// Euler-Mascheroni constant and the combination c = 2*exp(-gamma_E) that
// enters the large-nonlinearity asymptotics.
constexpr double kEulerGamma = 0.57721566490153286;
const double kAsymptoticC = 2.0 * std::exp(-kEulerGamma);

// Small-gamma_tilde series for u and v in powers of g = gamma_tilde^2. The
// leading terms 1 - 2g and 1 - g are exact; the g^2 coefficients were fitted
// numerically against the general solver (relative error below 1e-13 for
// gamma_tilde <= 1e-3).
constexpr double kSeriesCutoff = 1e-3;
constexpr double kSeriesU2 = 26.0;
constexpr double kSeriesV2 = 20.0;

// Quadrature budget for the constraint integrals. Values of I_k are O(1)
// near u = 1 and the integrands are smooth, so tight absolute tolerance is
// cheap and keeps the root solve stable at machine precision.
num::Tolerances integral_tol(const num::Tolerances& tol) {
  num::Tolerances t = tol;
  t.abs_tol = std::min(tol.abs_tol, 1e-14);
  t.rel_tol = std::min(tol.rel_tol, 1e-13);
  return t;
}

void require_gamma_tilde(double gamma_tilde) {
  if (!(gamma_tilde >= 0.0) || !std::isfinite(gamma_tilde)) {
    raise(errc::negative_gamma_tilde,
          "gamma_tilde must be finite and nonnegative, got " +
              std::to_string(gamma_tilde));
  }
}

double integrate_split(const num::Fn1& f, double u, double gamma_tilde,
                       const num::Tolerances& tol) {
  // Beyond gamma_tilde ~ 10 the sqrt factor crosses over well inside the
  // exp(-u*t) decay length; integrate the two regimes separately.
  if (gamma_tilde > 10.0) {
    const double t_split = 1.0 / gamma_tilde;
    const num::QuadratureResult head =
        num::integrate_interval(f, 0.0, t_split, tol);
    const num::QuadratureResult tail = num::integrate_semi_infinite(
        [&](double s) { return f(t_split + s); }, 1.0 / u, tol);
    return head.value + tail.value;
  }
  return num::integrate_semi_infinite(f, 1.0 / u, tol).value;
}

// K(u, gt) = integral of t^2 e^(-ut) / (sqrt(1+gt^2 t^2) (1+sqrt(1+gt^2 t^2)))
// over t in [0, inf). The identity I0 - I1 evaluated at the solved u gives
// u*I0 - 1 = -gt^2 * u * K with K > 0, which yields u - v and v without
// subtracting nearly equal integrals.
double cancellation_free_k(double u, double gamma_tilde,
                           const num::Tolerances& tol) {
  const double g2 = gamma_tilde * gamma_tilde;
  auto integrand = [u, g2](double t) {
    const double root = std::sqrt(1.0 + g2 * t * t);
    return t * t * std::exp(-u * t) / (root * (1.0 + root));
  };
  return integrate_split(integrand, u, gamma_tilde, tol);
}

double poly_mu2(const double* coeff, int n, double mu2) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc = acc * mu2 + coeff[i];
  return acc;
}

// Bulk coefficient of the density correction: descending powers of mu^2 in
// mu^2 * (-137 mu^4 + 1095 mu^2 + 4950) / (4050 |X|^2 (1 + mu^2/3)^3).
constexpr double kBulkPoly[3] = {-137.0, 1095.0, 4950.0};

}  // namespace

double constraint_integral(int k, double u, double gamma_tilde,
                           const num::Tolerances& tol) {
  require_gamma_tilde(gamma_tilde);
  if (k < 0 || k > 2) {
    raise(errc::invalid_argument,
          "constraint_integral supports k in {0, 1, 2}, got " +
              std::to_string(k));
  }
  if (!(u > 0.0) || !std::isfinite(u)) {
    raise(errc::invalid_argument,
          "constraint_integral requires u > 0, got " + std::to_string(u));
  }
  const double g2 = gamma_tilde * gamma_tilde;
  auto integrand = [k, u, g2](double t) {
    double tk = 1.0;
    for (int i = 0; i < k; ++i) tk *= t;
    return tk * std::exp(-u * t) / std::sqrt(1.0 + g2 * t * t);
  };
  return integrate_split(integrand, u, gamma_tilde, integral_tol(tol));
}

OptimalInputSolution solve_leading(double gamma_tilde,
                                   const num::Tolerances& tol) {
  require_gamma_tilde(gamma_tilde);

  OptimalInputSolution sol;
  sol.gamma_tilde = gamma_tilde;

  if (gamma_tilde == 0.0) {
    sol.u = 1.0;
    sol.v = 1.0;
    sol.u_minus_v = 0.0;
    return sol;
  }

  const num::Tolerances itol = integral_tol(tol);

  if (gamma_tilde < kSeriesCutoff) {
    const double g = gamma_tilde * gamma_tilde;
    sol.u = 1.0 + g * (-2.0 + kSeriesU2 * g);
    sol.v = 1.0 + g * (-1.0 + kSeriesV2 * g);
    sol.u_minus_v = g * (-1.0 + (kSeriesU2 - kSeriesV2) * g);
    sol.series_branch = true;
  } else {
    // Reduce the 2-D system to the root of I0 - I1 in u. The combined
    // integrand keeps the difference accurate near the root, where I0 and I1
    // individually agree to all but the last few digits.
    auto difference = [gamma_tilde, &itol](double u) {
      const double g2 = gamma_tilde * gamma_tilde;
      auto integrand = [u, g2](double t) {
        return (1.0 - t) * std::exp(-u * t) / std::sqrt(1.0 + g2 * t * t);
      };
      return integrate_split(integrand, u, gamma_tilde, itol);
    };

    // The difference is increasing in u, positive at u = 1, and negative for
    // small u (the t > 1 tail dominates). Bracket by halving.
    double lo = 0.5;
    double f_lo = difference(lo);
    int halvings = 0;
    while (f_lo >= 0.0) {
      if (++halvings > 200) {
        raise(errc::non_convergence,
              "failed to bracket the normalization root at gamma_tilde = " +
                  std::to_string(gamma_tilde));
      }
      lo *= 0.5;
      f_lo = difference(lo);
    }

    num::Tolerances rtol = tol;
    rtol.abs_tol = std::min(tol.abs_tol, 1e-15);
    rtol.rel_tol = std::min(tol.rel_tol, 1e-14);
    sol.u = num::find_root_bracketed(difference, lo, 1.0, rtol);

    // Recover v from the residual ratio: u*I0 - 1 = -gt^2*u*K exactly at the
    // root, so v = 1/I0 = u/(1 + delta0) with delta0 = -gt^2*u*K. |delta0|
    // stays below ~0.36 for gamma_tilde <= 1; fall back to the direct
    // reciprocal when the correction is no longer small.
    const double k_val = cancellation_free_k(sol.u, gamma_tilde, itol);
    const double delta0 = -gamma_tilde * gamma_tilde * sol.u * k_val;
    if (std::abs(delta0) <= 0.5) {
      sol.v = sol.u / (1.0 + delta0);
      sol.u_minus_v = sol.u * delta0 / (1.0 + delta0);
    } else {
      sol.v = 1.0 / constraint_integral(0, sol.u, gamma_tilde, tol);
      sol.u_minus_v = sol.u - sol.v;
    }
  }

  const double i0 = constraint_integral(0, sol.u, gamma_tilde, tol);
  const double i1 = constraint_integral(1, sol.u, gamma_tilde, tol);
  sol.residual0 = std::abs(sol.v * i0 - 1.0);
  sol.residual1 = std::abs(sol.v * i1 - 1.0);
  return sol;
}

AsymptoticUV asymptotic_large(double gamma_tilde) {
  require_gamma_tilde(gamma_tilde);
  if (gamma_tilde < 10.0) {
    raise(errc::domain_too_small,
          "large-nonlinearity asymptotics require gamma_tilde >= 10, got " +
              std::to_string(gamma_tilde));
  }
  const double lg = std::log(kAsymptoticC * gamma_tilde);
  AsymptoticUV out;
  out.u = (1.0 - std::log(lg) / lg) / lg;
  out.v = gamma_tilde / std::log(kAsymptoticC * gamma_tilde / out.u);
  return out;
}

double p_opt_leading(double rho, double P, const ChannelParams& params,
                     const OptimalInputSolution& sol) {
  validate(params);
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    raise(errc::invalid_argument,
          "p_opt_leading requires rho >= 0, got " + std::to_string(rho));
  }
  if (!(P > 0.0) || !std::isfinite(P)) {
    raise(errc::invalid_argument,
          "p_opt_leading requires P > 0, got " + std::to_string(P));
  }
  const double lambda0 = sol.u / P;
  const double n0 = sol.v / (std::numbers::pi * P);
  const double mu = params.gamma * params.length_L * rho * rho;
  return n0 * std::exp(-lambda0 * rho * rho) /
         std::sqrt(1.0 + mu * mu / 3.0);
}

OptimalInputCorrection delta_lambdas(double P, const ChannelParams& params,
                                     const OptimalInputSolution& sol,
                                     const num::Tolerances& tol) {
  validate(params);
  if (!(P > 0.0) || !std::isfinite(P)) {
    raise(errc::invalid_argument,
          "delta_lambdas requires P > 0, got " + std::to_string(P));
  }
  const PowerPoint point = make_power_point(P, params);
  if (std::abs(point.gamma_tilde - sol.gamma_tilde) >
      1e-12 * (1.0 + std::abs(point.gamma_tilde))) {
    raise(errc::invalid_argument,
          "solution was computed for gamma_tilde = " +
              std::to_string(sol.gamma_tilde) +
              " but (P, params) give gamma_tilde = " +
              std::to_string(point.gamma_tilde));
  }

  const double gt = sol.gamma_tilde;
  const double g2 = gt * gt;
  const double g4 = g2 * g2;
  const double u = sol.u;
  const double v = sol.v;
  const double umv = sol.u_minus_v;
  const double ql = params.noise_density_Q * params.length_L;

  // Shared denominator gt^2*(u - 1) + (u - v); both factors are evaluated
  // cancellation-free (u - 1 < 0 away from gt = 0, u - v stored by the
  // solver).
  const double denom = g2 * (u - 1.0) + umv;
  if (std::abs(denom) < 1e-12) {
    raise(errc::degenerate_denominator,
          "multiplier-shift denominator " + std::to_string(denom) +
              " is below 1e-12 at gamma_tilde = " + std::to_string(gt));
  }

  const double num1 = 16.0 * u * u * umv * umv +
                      g4 * (u * (-1370.0 + 1379.0 * u) - 428.0 * v) +
                      g2 * (u * u * (685.0 + 16.0 * u * (u - 4.0)) +
                            v * u * (48.0 * u - 257.0) - 428.0 * v * v);
  const double num2 = g2 * (685.0 - 347.0 * u * (1.0 + u) + 428.0 * v) +
                      u * (315.0 * v - u * (299.0 + 16.0 * v));

  OptimalInputCorrection corr;
  corr.dl1 = (ql / P) * num1 / (750.0 * g2 * denom);
  corr.dl2 = (u / P) * (ql / P) * num2 / (750.0 * denom);

  // Moment residuals of the corrected density, integrated in t = rho^2/P
  // (measure pi*P*dt). Both vanish identically when (dl1, dl2) are exact;
  // the tight absolute tolerance keeps the normalized residuals resolvable.
  auto correction_at_t = [&](double t) {
    return p_opt_correction(std::sqrt(P * t), P, params, sol, corr);
  };
  num::Tolerances mtol = tol;
  mtol.abs_tol = std::min(tol.abs_tol, 1e-13);
  mtol.rel_tol = std::min(tol.rel_tol, 1e-12);
  const double decay = 1.0 / u;
  const num::QuadratureResult m0 = num::integrate_semi_infinite(
      [&](double t) { return correction_at_t(t); }, decay, mtol);
  const num::QuadratureResult m2 = num::integrate_semi_infinite(
      [&](double t) { return t * correction_at_t(t); }, decay, mtol);
  corr.moment0_residual = std::numbers::pi * P * m0.value / (ql / P);
  corr.moment2_residual = std::numbers::pi * P * P * m2.value / ql;
  return corr;
}

double p_opt_correction(double rho, double P, const ChannelParams& params,
                        const OptimalInputSolution& sol,
                        const OptimalInputCorrection& corr) {
  validate(params);
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    raise(errc::invalid_argument,
          "p_opt_correction requires rho >= 0, got " + std::to_string(rho));
  }
  const double lambda0 = sol.u / P;
  const double ql = params.noise_density_Q * params.length_L;
  const double rho2 = rho * rho;
  const double mu = params.gamma * params.length_L * rho2;
  const double mu2 = mu * mu;
  const double d = 1.0 + mu2 / 3.0;

  double bracket = -lambda0 * lambda0 * rho2 + 2.0 * lambda0 / d;
  // mu^2/rho^2 is proportional to rho^2, so the bulk term vanishes at the
  // origin.
  if (rho2 > 0.0) {
    bracket +=
        mu2 * poly_mu2(kBulkPoly, 3, mu2) / (4050.0 * rho2 * d * d * d);
  }
  const double p0 = p_opt_leading(rho, P, params, sol);
  return (ql * bracket - (corr.dl1 + corr.dl2 * rho2)) * p0;
}

}  // namespace nlcap
