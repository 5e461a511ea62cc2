// Release gate for the capacity-analysis library: one check per shipped
// claim, each printed as a single PASS/FAIL line with the measured numbers
// and the pinned tolerance. Exits nonzero when any check fails.
//
// All tolerances live here, next to the check that uses them; nothing is
// read from the environment, so a green run is reproducible byte-for-byte.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <string>

#include "core/cond_pdf.hpp"
#include "core/entropy_capacity.hpp"
#include "core/input_opt.hpp"
#include "core/mc_oracle.hpp"
#include "core/numerics.hpp"
#include "core/output_pdf.hpp"
#include "support/classical_action.hpp"

namespace {

using namespace nlcap;
using clock_type = std::chrono::steady_clock;

int g_failures = 0;

std::string strf(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

void report(int id, const char* label, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", ok ? "PASS" : "FAIL", id, label, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <typename Fn>
void run_criterion(int id, const char* label, Fn&& fn) {
  bool ok = false;
  std::string detail;
  try {
    ok = fn(detail);
  } catch (const std::exception& error) {
    ok = false;
    detail = std::string("exception: ") + error.what();
  }
  report(id, label, ok, detail);
}

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

// Reference channel used throughout: gamma in 1/(mW*km), Q in mW/km, L in km.
const ChannelParams kReference{1.3e-3, 1.5e-7, 1000.0};

// Extremum targets for the reference channel and the shared sweep that must
// locate both in one pass.
struct ExtremumTarget {
  bool is_minimum;
  double value;       // nat
  double power;       // mW
  double value_tol;   // relative
  double power_tol;   // relative
};

constexpr ExtremumTarget kMinTarget{true, -7.97e-6, 0.73, 0.02, 0.05};
constexpr ExtremumTarget kMaxTarget{false, 9.35e-6, 43.4, 0.02, 0.05};
constexpr double kSweepBudgetSeconds = 10.0;

std::optional<SweepResult> g_extrema_sweep;
double g_extrema_sweep_seconds = 0.0;

bool check_extremum(const ExtremumTarget& target, std::string& detail) {
  if (!g_extrema_sweep) {
    SweepRequest req{0.1, 200.0, 200, true, false};
    const auto start = clock_type::now();
    g_extrema_sweep = sweep(kReference, req);
    g_extrema_sweep_seconds = seconds_since(start);
  }
  const SweepExtremum* found = nullptr;
  for (const auto& e : g_extrema_sweep->extrema) {
    if (e.is_minimum == target.is_minimum) found = &e;
  }
  if (!found) {
    detail = "sweep produced no matching extremum";
    return false;
  }
  const double value_dev = std::abs(found->dC_prime / target.value - 1.0);
  const double power_dev = std::abs(found->power_P / target.power - 1.0);
  detail = strf(
      "dC'=%.6e nat at P=%.4f mW vs %.2e at %.2f; value dev %.2f%% (tol 2%%), "
      "location dev %.2f%% (tol 5%%), sweep %.2f s (budget %.0f s)",
      found->dC_prime, found->power_P, target.value, target.power, 100.0 * value_dev,
      100.0 * power_dev, g_extrema_sweep_seconds, kSweepBudgetSeconds);
  return value_dev <= target.value_tol && power_dev <= target.power_tol &&
         g_extrema_sweep_seconds < kSweepBudgetSeconds;
}

// The plateau level 4e-2 * gamma * Q * L^2 and its acceptance band.
bool check_plateau(std::string& detail) {
  const double level = 4e-2 * kReference.gamma * kReference.noise_density_Q *
                       kReference.length_L * kReference.length_L;
  SweepRequest req{5.0, 1000.0, 41, true, true};
  const auto result = sweep(kReference, req);
  double sum = 0.0;
  long count = 0;
  for (const auto& row : result.rows) {
    if (row.failed) continue;
    sum += row.dC_prime;
    ++count;
  }
  if (count == 0) {
    detail = "no successful sweep rows";
    return false;
  }
  const double mean = sum / static_cast<double>(count);
  const double dev = std::abs(mean / level - 1.0);
  detail = strf("mean dC' over [5, 1000] mW = %.4e nat vs level %.4e; dev %.2f%% (tol 15%%)",
                mean, level, 100.0 * dev);
  return dev <= 0.15;
}

// Small-nonlinearity behavior. The capacity correction must satisfy the
// quartic bound with constant 5; u and v must match their quadratic forms
// with quartic remainders, whose true coefficients are 26 and 20, so the
// pinned constants include headroom for the next order only.
bool check_small_gamma_series(std::string& detail) {
  const double snr = 1e3;
  double worst_dc = 0.0, worst_u = 0.0, worst_v = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double gt = std::pow(10.0, -3.0 + 2.0 * static_cast<double>(i) / 20.0);
    const double gt4 = gt * gt * gt * gt;
    const double dc = capacity_correction(gt, snr);
    const auto sol = solve_leading(gt);
    worst_dc = std::max(worst_dc, std::abs(dc * snr - (1.0 - gt * gt / 3.0)) / gt4);
    worst_u = std::max(worst_u, std::abs(sol.u - (1.0 - 2.0 * gt * gt)) / gt4);
    worst_v = std::max(worst_v, std::abs(sol.v - (1.0 - gt * gt)) / gt4);
  }
  detail = strf(
      "worst |dC*snr-(1-gt^2/3)|/gt^4 = %.3f (tol 5); worst u, v remainders "
      "%.3f, %.3f x gt^4 (tol 30, 24)",
      worst_dc, worst_u, worst_v);
  return worst_dc <= 5.0 && worst_u <= 30.0 && worst_v <= 24.0;
}

// Large-nonlinearity asymptotics: the closed forms must approach the solver
// with relative errors bounded by an O(1) constant over log^2(gt), and the
// errors must shrink as gt grows.
bool check_large_asymptotics(std::string& detail) {
  const double grid[3] = {1e3, 1e4, 1e6};
  double scaled_lo = 1e300, scaled_hi = 0.0;
  double prev_u = 1e300, prev_v = 1e300;
  bool decreasing = true;
  for (const double gt : grid) {
    const auto sol = solve_leading(gt);
    const auto asy = asymptotic_large(gt);
    const double log2gt = std::log(gt) * std::log(gt);
    const double rel_u = std::abs(asy.u / sol.u - 1.0);
    const double rel_v = std::abs(asy.v / sol.v - 1.0);
    scaled_lo = std::min({scaled_lo, rel_u * log2gt, rel_v * log2gt});
    scaled_hi = std::max({scaled_hi, rel_u * log2gt, rel_v * log2gt});
    decreasing = decreasing && rel_u < prev_u && rel_v < prev_v;
    prev_u = rel_u;
    prev_v = rel_v;
  }
  detail = strf("rel err x log^2(gt) spans [%.3f, %.3f] over gt in {1e3,1e4,1e6} "
                "(band [0.02, 10]); errors %s with gt",
                scaled_lo, scaled_hi, decreasing ? "decrease" : "DO NOT decrease");
  return scaled_lo >= 0.02 && scaled_hi <= 10.0 && decreasing;
}

// Conditional-density normalization: the leading term carries unit mass and
// both corrections carry none, on every (mu, snr) grid point.
bool check_normalization(std::string& detail) {
  const double mus[3] = {0.1, 1.0, 10.0};
  const double snrs[3] = {1e2, 1e3, 1e4};
  const num::Tolerances tol{1e-9, 1e-9, 4000000};
  double worst = 0.0;
  for (const double mu : mus) {
    for (const double snr : snrs) {
      const ChannelParams params{mu, 1.0 / snr, 1.0};
      const double ql = 1.0 / snr;
      const double sx = 10.0 * std::sqrt(ql / 2.0);
      const double sy = 10.0 * std::sqrt(ql / 2.0 * (1.0 + 4.0 * mu * mu / 3.0));
      const num::Rect2D box{-sx, sx, -sy, sy};
      auto mass = [&](auto pick) {
        return num::integrate_rect_2d(
                   [&](double x, double y) {
                     return pick(cond_pdf(FluctuationCoords{x, y, mu, 1.0}, params));
                   },
                   box, tol)
            .value;
      };
      const double p0_defect = std::abs(mass([](const CondPdfValue& v) { return v.p0; }) - 1.0);
      const double dp1_mass = std::abs(mass([](const CondPdfValue& v) { return v.dp1; }));
      const double dp2_mass = std::abs(mass([](const CondPdfValue& v) { return v.dp2; }));
      worst = std::max({worst, p0_defect, dp1_mass, dp2_mass});
    }
  }
  detail = strf("worst |mass defect| = %.2e over 9 (mu, snr) points x 3 integrals (tol 1e-6)",
                worst);
  return worst <= 1e-6;
}

// Action expansion versus the shooting oracle: the truncation error must
// shrink like the fifth power of the boundary offset.
bool check_action_order(std::string& detail) {
  const ChannelParams params{1.0, 1e-3, 1.0};
  const double mu = 1.0, rho = 1.0;
  double residual[3];
  for (int k = 0; k < 3; ++k) {
    const double eps = std::pow(0.5, k);
    const FluctuationCoords c{0.10 * eps, 0.08 * eps, mu, rho};
    const auto a = action_terms(c, params);
    const ComplexSample X{rho, 0.0};
    const ComplexSample Y = from_fluctuation_coords(c, 0.0);
    const auto bvp = nlcap::testing::classical_action(X, Y, params.gamma, params.length_L);
    if (bvp.endpoint_error >= 1e-11) {
      detail = strf("shooting solver missed the endpoint by %.2e", bvp.endpoint_error);
      return false;
    }
    residual[k] = bvp.action - (a.s1 + a.s2 + a.s3);
  }
  const double order01 = std::log2(std::abs(residual[0] / residual[1]));
  const double order12 = std::log2(std::abs(residual[1] / residual[2]));
  detail = strf("residuals %.2e, %.2e, %.2e at eps = 1, 1/2, 1/4; measured orders "
                "%.2f, %.2f (threshold 4.5)",
                residual[0], residual[1], residual[2], order01, order12);
  return order01 >= 4.5 && order12 >= 4.5;
}

// Moment conditions of the input-density correction: the multiplier shifts
// must zero both the mass and the power moment.
bool check_moment_conditions(std::string& detail) {
  double worst = 0.0;
  for (const double gt : {0.1, 1.0, 10.0}) {
    const ChannelParams params{std::sqrt(3.0) * gt, 1e-3, 1.0};
    const auto sol = solve_leading(gt);
    const auto corr = delta_lambdas(1.0, params, sol);
    worst = std::max({worst, std::abs(corr.moment0_residual), std::abs(corr.moment2_residual)});
  }
  detail = strf("worst normalized moment residual = %.2e over gt in {0.1, 1, 10} (tol 1e-8)",
                worst);
  return worst <= 1e-8;
}

// Radial input densities: the output-density correction must equal the pure
// diffusion term (QL/4) * Laplacian, in both evaluation forms.
bool check_radial_identity(std::string& detail) {
  const ChannelParams channels[2] = {kReference, ChannelParams{2.0, 1e-3, 1.0}};
  double worst = 0.0;
  for (const auto& params : channels) {
    const double ql = params.noise_density_Q * params.length_L;
    const double gt = params.gamma * params.length_L / std::sqrt(3.0);
    const IsotropicGaussian gaussian(1.0);
    const OptimalLeadingDensity optimal(1.0, params, solve_leading(gt));
    const SmoothDensity* densities[2] = {&gaussian, &optimal};
    for (const SmoothDensity* d : densities) {
      for (const double rho : {0.05, 0.3, 0.7, 1.2, 1.8, 2.5}) {
        const double diffusion =
            0.25 * ql * (d->radial_d2(rho) + d->radial_d1(rho) / rho);
        for (const double angle : {0.0, 1.1, 2.7, 4.6}) {
          const ComplexSample Y{rho * std::cos(angle), rho * std::sin(angle)};
          worst = std::max(worst, std::abs(delta_pout_cartesian(*d, Y, params) - diffusion));
          worst = std::max(worst, std::abs(delta_pout_polar(*d, Y, params) - diffusion));
        }
      }
    }
  }
  detail = strf("worst |correction - (QL/4) Laplacian| = %.2e over 2 channels x 2 "
                "densities x 24 points (tol 1e-12)",
                worst);
  return worst <= 1e-12;
}

// Monte-Carlo cross-check at snr = 1e4, mu = 1: sample covariances against
// the leading-density covariance and the sampled cross-entropy against the
// quadrature value of the pointwise conditional entropy.
bool check_monte_carlo(std::string& detail) {
  const auto start = clock_type::now();
  const ChannelParams params{1.0, 1e-4, 1.0};
  SimConfig cfg;
  cfg.n_steps = default_step_count(make_power_point(1.0, params).gamma_tilde);
  cfg.n_samples = 1000000;
  cfg.seed = 2026;
  cfg.scheme = SdeScheme::splitting;
  const auto stats = ensemble_stats(ComplexSample{1.0, 0.0}, params, cfg);

  const auto cov = cond_pdf_moments_leading(1.0, params);
  const double z_xx = (stats.cov_xx - cov.xx) / stats.stderr_cov_xx;
  const double z_xy = (stats.cov_xy - cov.xy) / stats.stderr_cov_xy;
  const double z_yy = (stats.cov_yy - cov.yy) / stats.stderr_cov_yy;

  const double ql = 1e-4;
  const double sx = 10.0 * std::sqrt(ql / 2.0);
  const double sy = 10.0 * std::sqrt(ql / 2.0 * (1.0 + 4.0 / 3.0));
  const num::Rect2D box{-sx, sx, -sy, sy};
  const double h_quad =
      num::integrate_rect_2d(
          [&](double x, double y) {
            const auto v = cond_pdf(FluctuationCoords{x, y, 1.0, 1.0}, params);
            return v.total > 0.0 ? -v.total * std::log(v.total) : 0.0;
          },
          box, num::Tolerances{1e-10, 1e-10, 4000000})
          .value;
  const double z_h = (stats.cross_entropy - h_quad) / stats.stderr_cross_entropy;

  const double elapsed = seconds_since(start);
  detail = strf("covariance z = %.2f, %.2f, %.2f (tol 3); cross-entropy %.6f vs "
                "quadrature %.6f, z = %.2f (tol 3); %.1f s (budget 60 s)",
                z_xx, z_xy, z_yy, stats.cross_entropy, h_quad, z_h, elapsed);
  return std::abs(z_xx) < 3.0 && std::abs(z_xy) < 3.0 && std::abs(z_yy) < 3.0 &&
         std::abs(z_h) < 3.0 && elapsed < 60.0;
}

// Entropy assembly versus the closed-form capacity: the mutual information
// integrated from h_out and h_cond at the next-to-leading-order input must
// reproduce c0 + dC.
bool check_self_consistency(std::string& detail) {
  const double snr = 1e3;
  double worst = 0.0;
  for (const double gt : {0.1, 1.0, 10.0}) {
    const ChannelParams params{std::sqrt(3.0) * gt, 1e-3, 1.0};
    const auto breakdown = entropy_breakdown(1.0, params);
    const auto sol = solve_leading(gt);
    const double c0 = capacity_leading(sol, snr);
    const double dc = capacity_correction(gt, snr);
    const double defect = std::abs(breakdown.mutual_info - (c0 + dc)) / (1.0 + c0);
    worst = std::max(worst, defect);
  }
  detail = strf("worst |MI - (C0+dC)| / (1+C0) = %.2e over gt in {0.1, 1, 10} at "
                "snr = 1e3 (tol 1e-8)",
                worst);
  return worst <= 1e-8;
}

}  // namespace

int main() {
  std::printf("acceptance gate: reference channel gamma = %.2e 1/(mW*km), "
              "Q = %.2e mW/km, L = %.0f km\n",
              kReference.gamma, kReference.noise_density_Q, kReference.length_L);

  run_criterion(1, "sweep locates the capacity-correction minimum",
                [](std::string& d) { return check_extremum(kMinTarget, d); });
  run_criterion(2, "sweep locates the capacity-correction maximum",
                [](std::string& d) { return check_extremum(kMaxTarget, d); });
  run_criterion(3, "plateau mean matches 4e-2 gamma Q L^2", check_plateau);
  run_criterion(4, "small-nonlinearity series for dC, u, v", check_small_gamma_series);
  run_criterion(5, "large-nonlinearity asymptotics converge as 1/log^2",
                check_large_asymptotics);
  run_criterion(6, "conditional-density mass: 1, 0, 0 by order", check_normalization);
  run_criterion(7, "action truncation error scales as the fifth power", check_action_order);
  run_criterion(8, "input-correction moments vanish", check_moment_conditions);
  run_criterion(9, "radial output correction equals the diffusion term", check_radial_identity);
  run_criterion(10, "Monte-Carlo covariance and cross-entropy agree", check_monte_carlo);
  run_criterion(11, "entropy assembly reproduces c0 + dC", check_self_consistency);

  if (g_failures == 0) {
    std::printf("all 11 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
