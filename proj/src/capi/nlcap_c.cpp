#include "nlcap/nlcap.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <utility>

#include "core/channel.hpp"
#include "core/cond_pdf.hpp"
#include "core/entropy_capacity.hpp"
#include "core/error.hpp"
#include "core/input_opt.hpp"
#include "core/mc_oracle.hpp"
#include "core/numerics.hpp"
#include "core/output_pdf.hpp"

struct nlcap_channel {
  nlcap::ChannelParams params;
  nlcap::num::Tolerances tol;
};

struct nlcap_density {
  std::unique_ptr<const nlcap::SmoothDensity> impl;
};

struct nlcap_sweep {
  nlcap::SweepResult result;
};

namespace {

// nlcap_status mirrors errc value for value; keep the two enums locked.
static_assert(static_cast<int>(nlcap::errc::ok) == NLCAP_OK);
static_assert(static_cast<int>(nlcap::errc::invalid_argument) == NLCAP_INVALID_ARGUMENT);
static_assert(static_cast<int>(nlcap::errc::zero_input_signal) == NLCAP_ZERO_INPUT_SIGNAL);
static_assert(static_cast<int>(nlcap::errc::zero_output_signal) == NLCAP_ZERO_OUTPUT_SIGNAL);
static_assert(static_cast<int>(nlcap::errc::missing_polar_derivatives) ==
              NLCAP_MISSING_POLAR_DERIVATIVES);
static_assert(static_cast<int>(nlcap::errc::non_convergence) == NLCAP_NON_CONVERGENCE);
static_assert(static_cast<int>(nlcap::errc::non_finite_integrand) == NLCAP_NON_FINITE_INTEGRAND);
static_assert(static_cast<int>(nlcap::errc::invalid_bracket) == NLCAP_INVALID_BRACKET);
static_assert(static_cast<int>(nlcap::errc::negative_gamma_tilde) == NLCAP_NEGATIVE_GAMMA_TILDE);
static_assert(static_cast<int>(nlcap::errc::domain_too_small) == NLCAP_DOMAIN_TOO_SMALL);
static_assert(static_cast<int>(nlcap::errc::degenerate_denominator) ==
              NLCAP_DEGENERATE_DENOMINATOR);

thread_local std::string g_last_error;

nlcap_status null_arg(const char* name) {
  g_last_error = std::string("null pointer argument: ") + name;
  return NLCAP_INVALID_ARGUMENT;
}

template <typename Fn>
nlcap_status guarded(Fn&& fn) {
  try {
    fn();
    return NLCAP_OK;
  } catch (const nlcap::Error& error) {
    g_last_error = error.what();
    return static_cast<nlcap_status>(error.code());
  } catch (const std::exception& error) {
    g_last_error = error.what();
    return NLCAP_UNKNOWN_ERROR;
  } catch (...) {
    g_last_error = "unrecognized exception";
    return NLCAP_UNKNOWN_ERROR;
  }
}

void copy_report(const nlcap::CapacityReport& report, nlcap_capacity_row* row) {
  row->power_P = report.power_P;
  row->snr = report.snr;
  row->gamma_tilde = report.gamma_tilde;
  row->c0 = report.c0;
  row->dc = report.dC;
  row->dc_prime = report.dC_prime;
  row->c_total = report.c_total;
  row->lower_bound = report.lower_bound;
  row->u = report.u;
  row->v = report.v;
  row->residual0 = report.residual0;
  row->residual1 = report.residual1;
  row->series_branch = report.series_branch ? 1 : 0;
  row->outside_region = report.outside_region ? 1 : 0;
  row->failed = report.failed ? 1 : 0;
  std::strncpy(row->error_message, report.error.c_str(), sizeof(row->error_message) - 1);
  row->error_message[sizeof(row->error_message) - 1] = '\0';
}

nlcap::SimConfig to_sim_config(const nlcap_sim_config& config) {
  nlcap::SimConfig cfg;
  cfg.n_steps = config.n_steps;
  cfg.n_samples = config.n_samples;
  cfg.seed = config.seed;
  if (config.scheme == NLCAP_SCHEME_SPLITTING) {
    cfg.scheme = nlcap::SdeScheme::splitting;
  } else if (config.scheme == NLCAP_SCHEME_EULER) {
    cfg.scheme = nlcap::SdeScheme::euler;
  } else {
    nlcap::raise(nlcap::errc::invalid_argument,
                 "scheme must be NLCAP_SCHEME_SPLITTING or NLCAP_SCHEME_EULER");
  }
  return cfg;
}

void copy_stats(const nlcap::EnsembleStats& stats, nlcap_ensemble_stats* out) {
  out->n_samples = stats.n_samples;
  out->entropy_samples = stats.entropy_samples;
  out->mean_x0 = stats.mean_x0;
  out->mean_y0 = stats.mean_y0;
  out->stderr_mean_x0 = stats.stderr_mean_x0;
  out->stderr_mean_y0 = stats.stderr_mean_y0;
  out->cov_xx = stats.cov_xx;
  out->cov_xy = stats.cov_xy;
  out->cov_yy = stats.cov_yy;
  out->stderr_cov_xx = stats.stderr_cov_xx;
  out->stderr_cov_xy = stats.stderr_cov_xy;
  out->stderr_cov_yy = stats.stderr_cov_yy;
  out->cross_entropy = stats.cross_entropy;
  out->stderr_cross_entropy = stats.stderr_cross_entropy;
  out->mean_energy = stats.mean_energy;
  out->stderr_energy = stats.stderr_energy;
  out->breach_fraction = stats.breach_fraction;
  out->perturbative_breach = stats.perturbative_breach ? 1 : 0;
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    nlcap::raise(nlcap::errc::invalid_argument, std::string(name) + " must be finite");
  }
}

}  // namespace

extern "C" {

const char* nlcap_version(void) {
#define NLCAP_STR_IMPL(x) #x
#define NLCAP_STR(x) NLCAP_STR_IMPL(x)
  return NLCAP_STR(NLCAP_VERSION_MAJOR) "." NLCAP_STR(NLCAP_VERSION_MINOR) "." NLCAP_STR(
      NLCAP_VERSION_PATCH);
#undef NLCAP_STR
#undef NLCAP_STR_IMPL
}

const char* nlcap_status_string(nlcap_status status) {
  switch (status) {
    case NLCAP_OK: return "ok";
    case NLCAP_INVALID_ARGUMENT: return "invalid_argument";
    case NLCAP_ZERO_INPUT_SIGNAL: return "zero_input_signal";
    case NLCAP_ZERO_OUTPUT_SIGNAL: return "zero_output_signal";
    case NLCAP_MISSING_POLAR_DERIVATIVES: return "missing_polar_derivatives";
    case NLCAP_NON_CONVERGENCE: return "non_convergence";
    case NLCAP_NON_FINITE_INTEGRAND: return "non_finite_integrand";
    case NLCAP_INVALID_BRACKET: return "invalid_bracket";
    case NLCAP_NEGATIVE_GAMMA_TILDE: return "negative_gamma_tilde";
    case NLCAP_DOMAIN_TOO_SMALL: return "domain_too_small";
    case NLCAP_DEGENERATE_DENOMINATOR: return "degenerate_denominator";
    case NLCAP_UNKNOWN_ERROR: return "unknown_error";
  }
  return "unknown_error";
}

const char* nlcap_last_error_message(void) { return g_last_error.c_str(); }

nlcap_status nlcap_channel_create(double gamma, double noise_density_Q, double length_L,
                                  nlcap_channel** out_channel) {
  if (!out_channel) return null_arg("out_channel");
  *out_channel = nullptr;
  return guarded([&] {
    nlcap::ChannelParams params{gamma, noise_density_Q, length_L};
    nlcap::validate(params);
    *out_channel = new nlcap_channel{params, nlcap::num::Tolerances{}};
  });
}

void nlcap_channel_destroy(nlcap_channel* channel) { delete channel; }

nlcap_status nlcap_channel_set_tolerances(nlcap_channel* channel, double abs_tol, double rel_tol,
                                          long max_evaluations) {
  if (!channel) return null_arg("channel");
  return guarded([&] {
    if (!std::isfinite(abs_tol) || !std::isfinite(rel_tol) || abs_tol < 0.0 || rel_tol < 0.0 ||
        (abs_tol == 0.0 && rel_tol == 0.0)) {
      nlcap::raise(nlcap::errc::invalid_argument,
                   "tolerances must be nonnegative and not both zero");
    }
    if (max_evaluations < 1) {
      nlcap::raise(nlcap::errc::invalid_argument, "max_evaluations must be positive");
    }
    channel->tol = nlcap::num::Tolerances{abs_tol, rel_tol, max_evaluations};
  });
}

nlcap_status nlcap_power_point(const nlcap_channel* channel, double power_P, double* out_snr,
                               double* out_gamma_tilde) {
  if (!channel) return null_arg("channel");
  if (!out_snr) return null_arg("out_snr");
  if (!out_gamma_tilde) return null_arg("out_gamma_tilde");
  return guarded([&] {
    const nlcap::PowerPoint point = nlcap::make_power_point(power_P, channel->params);
    *out_snr = point.snr;
    *out_gamma_tilde = point.gamma_tilde;
  });
}

nlcap_status nlcap_cond_pdf_eval(const nlcap_channel* channel, double input_amplitude, double x0,
                                 double y0, nlcap_cond_pdf_value* out_value) {
  if (!channel) return null_arg("channel");
  if (!out_value) return null_arg("out_value");
  return guarded([&] {
    require_finite(input_amplitude, "input_amplitude");
    require_finite(x0, "x0");
    require_finite(y0, "y0");
    if (input_amplitude == 0.0) {
      nlcap::raise(nlcap::errc::zero_input_signal, "input amplitude is zero");
    }
    if (input_amplitude < 0.0) {
      nlcap::raise(nlcap::errc::invalid_argument, "input_amplitude must be positive");
    }
    const double rho = input_amplitude;
    const double mu = channel->params.gamma * channel->params.length_L * rho * rho;
    const nlcap::FluctuationCoords coords{x0, y0, mu, rho};
    const nlcap::CondPdfValue value = nlcap::cond_pdf(coords, channel->params);
    out_value->mu = mu;
    out_value->p0 = value.p0;
    out_value->dp1 = value.dp1;
    out_value->dp2 = value.dp2;
    out_value->total = value.total;
    out_value->outside_perturbative_regime = value.outside_perturbative_regime ? 1 : 0;
  });
}

nlcap_status nlcap_cond_pdf_moments(const nlcap_channel* channel, double mu, double* out_cov_xx,
                                    double* out_cov_xy, double* out_cov_yy) {
  if (!channel) return null_arg("channel");
  if (!out_cov_xx) return null_arg("out_cov_xx");
  if (!out_cov_xy) return null_arg("out_cov_xy");
  if (!out_cov_yy) return null_arg("out_cov_yy");
  return guarded([&] {
    const nlcap::Covariance2 cov = nlcap::cond_pdf_moments_leading(mu, channel->params);
    *out_cov_xx = cov.xx;
    *out_cov_xy = cov.xy;
    *out_cov_yy = cov.yy;
  });
}

nlcap_status nlcap_density_create_gaussian(double sigma2, nlcap_density** out_density) {
  if (!out_density) return null_arg("out_density");
  *out_density = nullptr;
  return guarded([&] {
    auto impl = std::make_unique<const nlcap::IsotropicGaussian>(sigma2);
    *out_density = new nlcap_density{std::move(impl)};
  });
}

nlcap_status nlcap_density_create_optimal(const nlcap_channel* channel, double power_P,
                                          nlcap_density** out_density) {
  if (!channel) return null_arg("channel");
  if (!out_density) return null_arg("out_density");
  *out_density = nullptr;
  return guarded([&] {
    const nlcap::PowerPoint point = nlcap::make_power_point(power_P, channel->params);
    const nlcap::OptimalInputSolution sol =
        nlcap::solve_leading(point.gamma_tilde, channel->tol);
    auto impl =
        std::make_unique<const nlcap::OptimalLeadingDensity>(power_P, channel->params, sol);
    *out_density = new nlcap_density{std::move(impl)};
  });
}

nlcap_status nlcap_density_create_callback(nlcap_density_fn fn, void* user_data, double scale,
                                           int radial, nlcap_density** out_density) {
  if (!fn) return null_arg("fn");
  if (!out_density) return null_arg("out_density");
  *out_density = nullptr;
  return guarded([&] {
    auto value = [fn, user_data](nlcap::ComplexSample X) {
      return fn(X.real(), X.imag(), user_data);
    };
    auto impl = std::make_unique<const nlcap::CallbackDensity>(value, scale, radial != 0);
    nlcap::validate_density(*impl);
    *out_density = new nlcap_density{std::move(impl)};
  });
}

void nlcap_density_destroy(nlcap_density* density) { delete density; }

nlcap_status nlcap_output_pdf(const nlcap_channel* channel, const nlcap_density* density,
                              double y_re, double y_im, double* out_leading,
                              double* out_correction, double* out_total) {
  if (!channel) return null_arg("channel");
  if (!density) return null_arg("density");
  if (!out_leading) return null_arg("out_leading");
  if (!out_correction) return null_arg("out_correction");
  if (!out_total) return null_arg("out_total");
  return guarded([&] {
    require_finite(y_re, "y_re");
    require_finite(y_im, "y_im");
    const nlcap::OutputPdfValue value =
        nlcap::pout(*density->impl, nlcap::ComplexSample(y_re, y_im), channel->params);
    *out_leading = value.leading;
    *out_correction = value.correction;
    *out_total = value.total;
  });
}

nlcap_status nlcap_entropy_h_cond(const nlcap_channel* channel, const nlcap_density* density,
                                  double power_P, double* out_leading, double* out_correction) {
  if (!channel) return null_arg("channel");
  if (!density) return null_arg("density");
  if (!out_leading) return null_arg("out_leading");
  if (!out_correction) return null_arg("out_correction");
  return guarded([&] {
    const auto [h0, dh] = nlcap::h_cond(*density->impl, power_P, channel->params, channel->tol);
    *out_leading = h0;
    *out_correction = dh;
  });
}

nlcap_status nlcap_entropy_h_out(const nlcap_channel* channel, const nlcap_density* density,
                                 double power_P, double* out_h_out) {
  if (!channel) return null_arg("channel");
  if (!density) return null_arg("density");
  if (!out_h_out) return null_arg("out_h_out");
  return guarded([&] {
    *out_h_out = nlcap::h_out(*density->impl, power_P, channel->params, channel->tol);
  });
}

nlcap_status nlcap_cond_entropy_pointwise(const nlcap_channel* channel, double rho,
                                          double* out_entropy) {
  if (!channel) return null_arg("channel");
  if (!out_entropy) return null_arg("out_entropy");
  return guarded([&] { *out_entropy = nlcap::cond_entropy_pointwise(rho, channel->params); });
}

nlcap_status nlcap_optimal_input_solve(const nlcap_channel* channel, double power_P,
                                       nlcap_input_solution* out_solution) {
  if (!channel) return null_arg("channel");
  if (!out_solution) return null_arg("out_solution");
  return guarded([&] {
    const nlcap::PowerPoint point = nlcap::make_power_point(power_P, channel->params);
    const nlcap::OptimalInputSolution sol =
        nlcap::solve_leading(point.gamma_tilde, channel->tol);
    const nlcap::OptimalInputCorrection corr =
        nlcap::delta_lambdas(power_P, channel->params, sol, channel->tol);
    out_solution->u = sol.u;
    out_solution->v = sol.v;
    out_solution->gamma_tilde = sol.gamma_tilde;
    out_solution->residual0 = sol.residual0;
    out_solution->residual1 = sol.residual1;
    out_solution->u_minus_v = sol.u_minus_v;
    out_solution->series_branch = sol.series_branch ? 1 : 0;
    out_solution->delta_lambda1 = corr.dl1;
    out_solution->delta_lambda2 = corr.dl2;
    out_solution->moment0_residual = corr.moment0_residual;
    out_solution->moment2_residual = corr.moment2_residual;
  });
}

nlcap_status nlcap_optimal_input_asymptotic(double gamma_tilde, double* out_u, double* out_v) {
  if (!out_u) return null_arg("out_u");
  if (!out_v) return null_arg("out_v");
  return guarded([&] {
    const nlcap::AsymptoticUV uv = nlcap::asymptotic_large(gamma_tilde);
    *out_u = uv.u;
    *out_v = uv.v;
  });
}

nlcap_status nlcap_optimal_input_density(const nlcap_channel* channel, double power_P, double rho,
                                         double* out_leading, double* out_correction) {
  if (!channel) return null_arg("channel");
  if (!out_leading) return null_arg("out_leading");
  if (!out_correction) return null_arg("out_correction");
  return guarded([&] {
    require_finite(rho, "rho");
    if (rho < 0.0) {
      nlcap::raise(nlcap::errc::invalid_argument, "rho must be nonnegative");
    }
    const nlcap::PowerPoint point = nlcap::make_power_point(power_P, channel->params);
    const nlcap::OptimalInputSolution sol =
        nlcap::solve_leading(point.gamma_tilde, channel->tol);
    const nlcap::OptimalInputCorrection corr =
        nlcap::delta_lambdas(power_P, channel->params, sol, channel->tol);
    *out_leading = nlcap::p_opt_leading(rho, power_P, channel->params, sol);
    *out_correction = nlcap::p_opt_correction(rho, power_P, channel->params, sol, corr);
  });
}

nlcap_status nlcap_capacity_at(const nlcap_channel* channel, double power_P,
                               nlcap_capacity_row* out_row) {
  if (!channel) return null_arg("channel");
  if (!out_row) return null_arg("out_row");
  return guarded([&] {
    const nlcap::CapacityReport report =
        nlcap::evaluate_power_point(power_P, channel->params, channel->tol);
    copy_report(report, out_row);
  });
}

nlcap_status nlcap_entropy_breakdown(const nlcap_channel* channel, double power_P,
                                     double* out_h_cond_leading, double* out_h_cond_correction,
                                     double* out_h_out, double* out_mutual_info) {
  if (!channel) return null_arg("channel");
  if (!out_h_cond_leading) return null_arg("out_h_cond_leading");
  if (!out_h_cond_correction) return null_arg("out_h_cond_correction");
  if (!out_h_out) return null_arg("out_h_out");
  if (!out_mutual_info) return null_arg("out_mutual_info");
  return guarded([&] {
    const nlcap::EntropyBreakdown breakdown =
        nlcap::entropy_breakdown(power_P, channel->params, channel->tol);
    *out_h_cond_leading = breakdown.h_cond_leading;
    *out_h_cond_correction = breakdown.h_cond_corr;
    *out_h_out = breakdown.h_out;
    *out_mutual_info = breakdown.mutual_info;
  });
}

nlcap_status nlcap_sweep_run(const nlcap_channel* channel, double p_min, double p_max, long points,
                             int log_spacing, int allow_outside_region, nlcap_sweep** out_sweep) {
  if (!channel) return null_arg("channel");
  if (!out_sweep) return null_arg("out_sweep");
  *out_sweep = nullptr;
  return guarded([&] {
    nlcap::SweepRequest request;
    request.p_min = p_min;
    request.p_max = p_max;
    request.points = points;
    request.log_spacing = log_spacing != 0;
    request.allow_outside_region = allow_outside_region != 0;
    nlcap::SweepResult result = nlcap::sweep(channel->params, request, channel->tol);
    *out_sweep = new nlcap_sweep{std::move(result)};
  });
}

void nlcap_sweep_destroy(nlcap_sweep* sweep) { delete sweep; }

long nlcap_sweep_size(const nlcap_sweep* sweep) {
  return sweep ? static_cast<long>(sweep->result.rows.size()) : 0;
}

nlcap_status nlcap_sweep_row(const nlcap_sweep* sweep, long index, nlcap_capacity_row* out_row) {
  if (!sweep) return null_arg("sweep");
  if (!out_row) return null_arg("out_row");
  return guarded([&] {
    if (index < 0 || index >= static_cast<long>(sweep->result.rows.size())) {
      nlcap::raise(nlcap::errc::invalid_argument, "row index out of range");
    }
    copy_report(sweep->result.rows[static_cast<size_t>(index)], out_row);
  });
}

long nlcap_sweep_extrema_count(const nlcap_sweep* sweep) {
  return sweep ? static_cast<long>(sweep->result.extrema.size()) : 0;
}

nlcap_status nlcap_sweep_extremum(const nlcap_sweep* sweep, long index, int* out_is_minimum,
                                  double* out_power_P, double* out_dc_prime) {
  if (!sweep) return null_arg("sweep");
  if (!out_is_minimum) return null_arg("out_is_minimum");
  if (!out_power_P) return null_arg("out_power_P");
  if (!out_dc_prime) return null_arg("out_dc_prime");
  return guarded([&] {
    if (index < 0 || index >= static_cast<long>(sweep->result.extrema.size())) {
      nlcap::raise(nlcap::errc::invalid_argument, "extremum index out of range");
    }
    const nlcap::SweepExtremum& extremum = sweep->result.extrema[static_cast<size_t>(index)];
    *out_is_minimum = extremum.is_minimum ? 1 : 0;
    *out_power_P = extremum.power_P;
    *out_dc_prime = extremum.dC_prime;
  });
}

nlcap_status nlcap_sweep_region(const nlcap_sweep* sweep, double* out_region_min_P,
                                double* out_region_max_P) {
  if (!sweep) return null_arg("sweep");
  if (!out_region_min_P) return null_arg("out_region_min_P");
  if (!out_region_max_P) return null_arg("out_region_max_P");
  *out_region_min_P = sweep->result.region_min_P;
  *out_region_max_P = sweep->result.region_max_P;
  return NLCAP_OK;
}

nlcap_status nlcap_mc_default_steps(double gamma_tilde, long* out_steps) {
  if (!out_steps) return null_arg("out_steps");
  return guarded([&] { *out_steps = nlcap::default_step_count(gamma_tilde); });
}

nlcap_status nlcap_mc_propagate(const nlcap_channel* channel, double x_re, double x_im,
                                const nlcap_sim_config* config, long sample_index, double* out_y_re,
                                double* out_y_im) {
  if (!channel) return null_arg("channel");
  if (!config) return null_arg("config");
  if (!out_y_re) return null_arg("out_y_re");
  if (!out_y_im) return null_arg("out_y_im");
  return guarded([&] {
    const nlcap::SimConfig cfg = to_sim_config(*config);
    const nlcap::ComplexSample y =
        nlcap::propagate(nlcap::ComplexSample(x_re, x_im), channel->params, cfg, sample_index);
    *out_y_re = y.real();
    *out_y_im = y.imag();
  });
}

nlcap_status nlcap_mc_ensemble(const nlcap_channel* channel, double x_re, double x_im,
                               const nlcap_sim_config* config, nlcap_ensemble_stats* out_stats) {
  if (!channel) return null_arg("channel");
  if (!config) return null_arg("config");
  if (!out_stats) return null_arg("out_stats");
  return guarded([&] {
    const nlcap::SimConfig cfg = to_sim_config(*config);
    const nlcap::EnsembleStats stats =
        nlcap::ensemble_stats(nlcap::ComplexSample(x_re, x_im), channel->params, cfg);
    copy_stats(stats, out_stats);
  });
}

nlcap_status nlcap_mc_convergence(const nlcap_channel* channel, double x_re, double x_im,
                                  const nlcap_sim_config* config, long out_step_counts[3],
                                  nlcap_convergence_row* out_rows, long row_capacity,
                                  long* out_row_count) {
  if (!channel) return null_arg("channel");
  if (!config) return null_arg("config");
  if (!out_step_counts) return null_arg("out_step_counts");
  if (!out_row_count) return null_arg("out_row_count");
  if (row_capacity > 0 && !out_rows) return null_arg("out_rows");
  return guarded([&] {
    if (row_capacity < 0) {
      nlcap::raise(nlcap::errc::invalid_argument, "row_capacity must be nonnegative");
    }
    const nlcap::SimConfig cfg = to_sim_config(*config);
    const nlcap::ConvergenceAudit audit =
        nlcap::convergence_audit(nlcap::ComplexSample(x_re, x_im), channel->params, cfg);
    for (int level = 0; level < 3; ++level) {
      out_step_counts[level] = audit.step_counts[static_cast<size_t>(level)];
    }
    const long produced = static_cast<long>(audit.moments.size());
    const long copied = std::min(row_capacity, produced);
    for (long i = 0; i < copied; ++i) {
      const nlcap::MomentConvergence& moment = audit.moments[static_cast<size_t>(i)];
      nlcap_convergence_row& row = out_rows[i];
      std::strncpy(row.name, moment.name.c_str(), sizeof(row.name) - 1);
      row.name[sizeof(row.name) - 1] = '\0';
      for (int level = 0; level < 3; ++level) {
        row.value[level] = moment.value[static_cast<size_t>(level)];
        row.error[level] = moment.error[static_cast<size_t>(level)];
      }
      row.drift = moment.drift;
      row.drift_sigma = moment.drift_sigma;
      row.slope = moment.slope;
    }
    *out_row_count = produced;
  });
}

}  // extern "C"
