#include "core/entropy_capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace nlcap {
namespace {

constexpr double kEulerGamma = 0.57721566490153286;
const double kAsymptoticC = 2.0 * std::exp(-kEulerGamma);

// Below this value a density is treated as an exact zero and the f*log(f)
// style integrands take their limit value 0.
constexpr double kDensityFloor = 1e-300;

// Conditional-entropy correction polynomial, descending powers of mu^2 in
// mu^2 * (-13 mu^4 + 255 mu^2 + 450) / (150 (3 + mu^2)^3 |X|^2).
constexpr double kCondPoly[3] = {-13.0, 255.0, 450.0};

double poly_mu2(const double* coeff, int n, double mu2) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc = acc * mu2 + coeff[i];
  return acc;
}

// Weight of the O(QL) conditional-entropy shift at squared input radius
// rho^2. mu^2/rho^2 equals (gamma*L)^2*rho^2, so the weight vanishes at the
// origin instead of dividing zero by zero.
double cond_correction_weight(double rho2, double gamma_l) {
  const double mu2 = gamma_l * gamma_l * rho2 * rho2;
  const double s = 3.0 + mu2;
  return gamma_l * gamma_l * rho2 * poly_mu2(kCondPoly, 3, mu2) /
         (150.0 * s * s * s);
}

void require_power(double P, const char* who) {
  if (!(P > 0.0) || !std::isfinite(P)) {
    raise(errc::invalid_argument,
          std::string(who) + " requires P > 0, got " + std::to_string(P));
  }
}

void require_snr(double snr) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    raise(errc::invalid_argument,
          "snr must be positive and finite, got " + std::to_string(snr));
  }
}

void require_gamma_tilde(double gamma_tilde) {
  if (!(gamma_tilde >= 0.0) || !std::isfinite(gamma_tilde)) {
    raise(errc::negative_gamma_tilde,
          "gamma_tilde must be finite and nonnegative, got " +
              std::to_string(gamma_tilde));
  }
}

// dC * snr from a solved (u, v) pair. The 1/gamma_tilde^2 pieces are grouped
// onto the cancellation-free difference u - v stored by the solver.
double correction_times_snr(const OptimalInputSolution& sol) {
  const double u = sol.u;
  const double v = sol.v;
  const double g2 = sol.gamma_tilde * sol.gamma_tilde;
  const double ratio = u * u * (sol.u_minus_v / g2);
  return (214.0 / 375.0) * v + (137.0 / 150.0) * u -
         (347.0 / 750.0) * u * u + (8.0 / 375.0) * ratio;
}

// Small-nonlinearity value of dC * snr in g = gamma_tilde^2, exact to
// O(g^3). The g^2 coefficient 23/5 depends on the g^3 terms of u and v, so
// inserting the truncated solver series into the general expression would
// land on a different (wrong) constant.
double correction_series_times_snr(double gamma_tilde) {
  const double g = gamma_tilde * gamma_tilde;
  return 1.0 + g * (-1.0 / 3.0 + (23.0 / 5.0) * g);
}

double correction_value(const OptimalInputSolution& sol, double snr) {
  if (sol.gamma_tilde == 0.0 || sol.series_branch) {
    return correction_series_times_snr(sol.gamma_tilde) / snr;
  }
  return correction_times_snr(sol) / snr;
}

double region_lower(const ChannelParams& params) {
  return 10.0 * params.noise_density_Q * params.length_L;
}

double region_upper(const ChannelParams& params) {
  const double l3 =
      params.length_L * params.length_L * params.length_L;
  const double denom =
      params.gamma * params.gamma * params.noise_density_Q * l3;
  return denom > 0.0 ? 0.1 / denom
                     : std::numeric_limits<double>::infinity();
}

}  // namespace

std::pair<double, double> h_cond(const SmoothDensity& d, double P,
                                 const ChannelParams& params,
                                 const num::Tolerances& tol) {
  validate(params);
  require_power(P, "h_cond");
  if (!d.is_radial()) {
    raise(errc::invalid_argument,
          "conditional entropy needs a radial input density");
  }
  const double gamma_l = params.gamma * params.length_L;
  const double ql = params.noise_density_Q * params.length_L;
  const double pi_p = std::numbers::pi * P;
  const double decay = d.scale() * d.scale() / P;

  const double avg_log =
      pi_p * num::integrate_semi_infinite(
                 [&](double t) {
                   const double mu = gamma_l * P * t;
                   return d.radial_value(std::sqrt(P * t)) *
                          std::log1p(mu * mu / 3.0);
                 },
                 decay, tol)
                 .value;
  const double avg_weight =
      pi_p * num::integrate_semi_infinite(
                 [&](double t) {
                   return d.radial_value(std::sqrt(P * t)) *
                          cond_correction_weight(P * t, gamma_l);
                 },
                 decay, tol)
                 .value;

  return {1.0 + std::log(std::numbers::pi * ql) + 0.5 * avg_log,
          ql * avg_weight};
}

double cond_entropy_pointwise(double rho, const ChannelParams& params) {
  validate(params);
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    raise(errc::invalid_argument,
          "cond_entropy_pointwise requires rho > 0, got " + std::to_string(rho));
  }
  const double gamma_l = params.gamma * params.length_L;
  const double ql = params.noise_density_Q * params.length_L;
  const double mu = gamma_l * rho * rho;
  return 1.0 + std::log(std::numbers::pi * ql) + 0.5 * std::log1p(mu * mu / 3.0) +
         ql * cond_correction_weight(rho * rho, gamma_l);
}

double h_out(const SmoothDensity& d, double P, const ChannelParams& params,
             const num::Tolerances& tol) {
  validate(params);
  require_power(P, "h_out");
  const double ql = params.noise_density_Q * params.length_L;

  if (d.is_radial()) {
    const double pi_p = std::numbers::pi * P;
    const double decay = d.scale() * d.scale() / P;
    auto integrand = [&](double t) {
      const double rho = std::sqrt(P * t);
      const double f = d.radial_value(rho);
      if (!(f > kDensityFloor)) return 0.0;
      const double laplace = d.radial_d2(rho) + d.radial_d1(rho) / rho;
      return (f + 0.25 * ql * laplace) * std::log(f);
    };
    return -pi_p * num::integrate_semi_infinite(integrand, decay, tol).value;
  }

  num::Tolerances qtol = tol;
  qtol.abs_tol = std::max(tol.abs_tol, 1e-10);
  qtol.rel_tol = std::max(tol.rel_tol, 1e-9);
  qtol.max_evaluations = std::max(tol.max_evaluations, 4000000L);

  const double half = 10.0 * d.scale();
  auto integrand = [&](double y1, double y2) {
    const OutputPdfValue val = pout(d, ComplexSample{y1, y2}, params);
    if (!(val.leading > kDensityFloor)) return 0.0;
    return (val.leading + val.correction) * std::log(val.leading);
  };
  double acc = 0.0;
  for (const auto& r :
       {num::Rect2D{0.0, half, 0.0, half}, num::Rect2D{-half, 0.0, 0.0, half},
        num::Rect2D{-half, 0.0, -half, 0.0},
        num::Rect2D{0.0, half, -half, 0.0}}) {
    acc += num::integrate_rect_2d(integrand, r, qtol).value;
  }
  return -acc;
}

double capacity_leading(const OptimalInputSolution& sol, double snr) {
  require_snr(snr);
  if (!(sol.u > 0.0) || !(sol.v > 0.0) || !std::isfinite(sol.u) ||
      !std::isfinite(sol.v)) {
    raise(errc::invalid_argument,
          "capacity_leading needs a solved input distribution");
  }
  return std::log(snr) + sol.u - std::log(sol.v) - 1.0;
}

double capacity_leading(double gamma_tilde, double snr,
                        const num::Tolerances& tol) {
  return capacity_leading(solve_leading(gamma_tilde, tol), snr);
}

double capacity_correction(double gamma_tilde, double snr,
                           CorrectionBranch branch,
                           const num::Tolerances& tol) {
  require_snr(snr);
  if (branch == CorrectionBranch::series) {
    require_gamma_tilde(gamma_tilde);
    return correction_series_times_snr(gamma_tilde) / snr;
  }
  const OptimalInputSolution sol = solve_leading(gamma_tilde, tol);
  if (branch == CorrectionBranch::general) {
    if (!(gamma_tilde > 0.0)) {
      raise(errc::invalid_argument,
            "the general correction branch needs gamma_tilde > 0");
    }
    return correction_times_snr(sol) / snr;
  }
  return correction_value(sol, snr);
}

double capacity_correction_prime(double gamma_tilde, double snr,
                                 const num::Tolerances& tol) {
  return capacity_correction(gamma_tilde, snr, CorrectionBranch::automatic,
                             tol) -
         1.0 / snr;
}

double capacity_large_asymptotic(double P, const ChannelParams& params) {
  validate(params);
  require_power(P, "capacity_large_asymptotic");
  const PowerPoint point = make_power_point(P, params);
  if (point.gamma_tilde < 3.0) {
    raise(errc::domain_too_small,
          "large-power capacity asymptotics need gamma_tilde >= 3, got " +
              std::to_string(point.gamma_tilde));
  }
  // gamma*Q*L^2/sqrt(3) = gamma_tilde/snr.
  const double prefactor = point.gamma_tilde / point.snr;
  const double lg = std::log(kAsymptoticC * point.gamma_tilde);
  const double denom =
      std::log(kAsymptoticC * point.gamma_tilde * lg) + std::log(lg) / lg;
  return prefactor * (214.0 / 375.0) / denom;
}

double lower_bound_reference(double snr) {
  if (!(snr > std::numbers::e) || !std::isfinite(snr)) {
    raise(errc::invalid_argument,
          "half-log capacity bound needs snr > e, got " +
              std::to_string(snr));
  }
  return 0.5 * std::log(snr) +
         0.5 * (1.0 + kEulerGamma - std::log(4.0 * std::numbers::pi));
}

EntropyBreakdown entropy_breakdown(double P, const ChannelParams& params,
                                   const num::Tolerances& tol) {
  validate(params);
  require_power(P, "entropy_breakdown");
  const PowerPoint point = make_power_point(P, params);
  const OptimalInputSolution sol = solve_leading(point.gamma_tilde, tol);
  const OptimalInputCorrection corr = delta_lambdas(P, params, sol, tol);
  const OptimalLeadingDensity lead(P, params, sol);

  const double ql = params.noise_density_Q * params.length_L;
  const double gamma_l = params.gamma * params.length_L;
  const double gt = point.gamma_tilde;
  const double pi_p = std::numbers::pi * P;
  const double log_n0 = std::log(sol.v / pi_p);
  const double decay = 1.0 / sol.u;

  // All integrals run in t = rho^2/P (measure pi*P*dt). The logarithm of the
  // leading density is evaluated in closed form so the tails contribute
  // exact zero-times-finite products instead of 0*log(0).
  auto log_p0 = [&](double t) {
    return log_n0 - sol.u * t - 0.5 * std::log1p(gt * gt * t * t);
  };
  auto p0 = [&](double t) {
    return p_opt_leading(std::sqrt(P * t), P, params, sol);
  };
  auto p1 = [&](double t) {
    return p_opt_correction(std::sqrt(P * t), P, params, sol, corr);
  };
  auto laplace0 = [&](double t) {
    const double rho = std::sqrt(P * t);
    return lead.radial_d2(rho) + lead.radial_d1(rho) / rho;
  };

  const double h_out_val =
      -pi_p * num::integrate_semi_infinite(
                  [&](double t) {
                    return (p0(t) + p1(t) + 0.25 * ql * laplace0(t)) *
                           log_p0(t);
                  },
                  decay, tol)
                  .value;
  const double avg_log =
      pi_p * num::integrate_semi_infinite(
                 [&](double t) {
                   return (p0(t) + p1(t)) * std::log1p(gt * gt * t * t);
                 },
                 decay, tol)
                 .value;
  const double dh =
      ql * pi_p *
      num::integrate_semi_infinite(
          [&](double t) {
            return p0(t) * cond_correction_weight(P * t, gamma_l);
          },
          decay, tol)
          .value;

  EntropyBreakdown out;
  out.h_cond_leading =
      1.0 + std::log(std::numbers::pi * ql) + 0.5 * avg_log;
  out.h_cond_corr = dh;
  out.h_out = h_out_val;
  out.mutual_info = out.h_out - out.h_cond_leading - out.h_cond_corr;
  return out;
}

CapacityReport evaluate_power_point(double P, const ChannelParams& params,
                                    const num::Tolerances& tol) {
  validate(params);
  require_power(P, "evaluate_power_point");
  const PowerPoint point = make_power_point(P, params);

  CapacityReport row;
  row.power_P = P;
  row.snr = point.snr;
  row.gamma_tilde = point.gamma_tilde;
  row.outside_region =
      P < region_lower(params) || P > region_upper(params);

  try {
    const OptimalInputSolution sol = solve_leading(point.gamma_tilde, tol);
    row.u = sol.u;
    row.v = sol.v;
    row.residual0 = sol.residual0;
    row.residual1 = sol.residual1;
    row.series_branch = sol.series_branch;
    row.c0 = capacity_leading(sol, point.snr);

    // Settle (dC, dC_prime) on a floating-point fixed point so that both
    // dC_prime + 1/snr == dC and dC - 1/snr == dC_prime hold bit-exactly in
    // the stored row.
    const double inv_snr = 1.0 / point.snr;
    double prime = correction_value(sol, point.snr) - inv_snr;
    double total = prime + inv_snr;
    for (int i = 0; i < 4; ++i) {
      const double back = total - inv_snr;
      if (back == prime) break;
      prime = back;
      total = prime + inv_snr;
    }
    row.dC = total;
    row.dC_prime = prime;
    row.c_total = row.c0 + row.dC;
    row.lower_bound = point.snr > std::numbers::e
                          ? lower_bound_reference(point.snr)
                          : std::numeric_limits<double>::quiet_NaN();
  } catch (const Error& e) {
    row.failed = true;
    row.error = e.what();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.c0 = row.dC = row.dC_prime = row.c_total = row.lower_bound = nan;
    row.u = row.v = row.residual0 = row.residual1 = nan;
  }
  return row;
}

SweepResult sweep(const ChannelParams& params, const SweepRequest& req,
                  const num::Tolerances& tol) {
  validate(params);
  if (!(req.p_min > 0.0) || !(req.p_max > req.p_min) ||
      !std::isfinite(req.p_max)) {
    raise(errc::invalid_argument,
          "sweep needs 0 < p_min < p_max, got [" + std::to_string(req.p_min) +
              ", " + std::to_string(req.p_max) + "]");
  }
  if (req.points < 2) {
    raise(errc::invalid_argument,
          "sweep needs at least 2 points, got " + std::to_string(req.points));
  }

  SweepResult out;
  out.region_min_P = region_lower(params);
  out.region_max_P = region_upper(params);
  if (!req.allow_outside_region &&
      (req.p_min < out.region_min_P || req.p_max > out.region_max_P)) {
    raise(errc::invalid_argument,
          "sweep range [" + std::to_string(req.p_min) + ", " +
              std::to_string(req.p_max) +
              "] mW leaves the intermediate power region [" +
              std::to_string(out.region_min_P) + ", " +
              std::to_string(out.region_max_P) +
              "] mW; set allow_outside_region to evaluate anyway");
  }

  out.rows.reserve(static_cast<std::size_t>(req.points));
  const double log_min = std::log(req.p_min);
  const double log_max = std::log(req.p_max);
  for (long i = 0; i < req.points; ++i) {
    double P;
    if (i == 0) {
      P = req.p_min;
    } else if (i == req.points - 1) {
      P = req.p_max;
    } else {
      const double frac =
          static_cast<double>(i) / static_cast<double>(req.points - 1);
      P = req.log_spacing ? std::exp(log_min + frac * (log_max - log_min))
                          : req.p_min + frac * (req.p_max - req.p_min);
    }
    out.rows.push_back(evaluate_power_point(P, params, tol));
  }

  // Refine every interior grid extremum of dC_prime; the minimizer budget is
  // counted in full capacity evaluations, so keep it small.
  num::Tolerances refine_tol;
  refine_tol.abs_tol = 1e-4;
  refine_tol.rel_tol = 1e-6;
  refine_tol.max_evaluations = 200;
  for (std::size_t i = 1; i + 1 < out.rows.size(); ++i) {
    const CapacityReport& a = out.rows[i - 1];
    const CapacityReport& b = out.rows[i];
    const CapacityReport& c = out.rows[i + 1];
    if (a.failed || b.failed || c.failed) continue;
    if (!std::isfinite(a.dC_prime) || !std::isfinite(b.dC_prime) ||
        !std::isfinite(c.dC_prime)) {
      continue;
    }
    const bool is_min = b.dC_prime < a.dC_prime && b.dC_prime < c.dC_prime;
    const bool is_max = b.dC_prime > a.dC_prime && b.dC_prime > c.dC_prime;
    if (!is_min && !is_max) continue;

    SweepExtremum ex;
    ex.is_minimum = is_min;
    ex.power_P = b.power_P;
    ex.dC_prime = b.dC_prime;
    try {
      auto objective = [&](double P) {
        const PowerPoint point = make_power_point(P, params);
        const double val =
            capacity_correction_prime(point.gamma_tilde, point.snr, tol);
        return is_min ? val : -val;
      };
      const num::MinimumResult res = num::minimize_scalar(
          objective, a.power_P, c.power_P, refine_tol);
      ex.power_P = res.argmin;
      ex.dC_prime = is_min ? res.min_value : -res.min_value;
    } catch (const Error&) {
      // Keep the grid point when refinement fails.
    }
    out.extrema.push_back(ex);
  }
  return out;
}

}  // namespace nlcap
