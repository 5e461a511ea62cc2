#ifndef NLCAP_H
#define NLCAP_H

/*
 * C interface to the nonlinear-channel analysis library: the conditional and
 * output densities of the zero-dispersion Kerr channel at next-to-leading
 * order in the inverse signal-to-noise ratio, the matching optimal input
 * distribution, per-power capacity corrections, and a Monte-Carlo channel
 * simulator for validation.
 *
 * Conventions:
 *  - every function returns an nlcap_status; results go through out pointers,
 *    which are written only on NLCAP_OK unless stated otherwise;
 *  - handles are opaque, created by *_create/*_run and released by the
 *    matching *_destroy (destroy accepts NULL);
 *  - calls are thread-safe on distinct handles; shared handles are read-only
 *    after creation;
 *  - nlcap_last_error_message() returns a thread-local description of the
 *    most recent failure on the calling thread.
 *
 * Units: power in mW, gamma in 1/(mW*km), noise density Q in mW/km, length L
 * in km, amplitudes in sqrt(mW), entropies and capacities in nat.
 */

#ifdef __cplusplus
extern "C" {
#endif

#define NLCAP_VERSION_MAJOR 1
#define NLCAP_VERSION_MINOR 0
#define NLCAP_VERSION_PATCH 0

typedef enum nlcap_status {
  NLCAP_OK = 0,
  NLCAP_INVALID_ARGUMENT = 1,
  NLCAP_ZERO_INPUT_SIGNAL = 2,
  NLCAP_ZERO_OUTPUT_SIGNAL = 3,
  NLCAP_MISSING_POLAR_DERIVATIVES = 4,
  NLCAP_NON_CONVERGENCE = 5,
  NLCAP_NON_FINITE_INTEGRAND = 6,
  NLCAP_INVALID_BRACKET = 7,
  NLCAP_NEGATIVE_GAMMA_TILDE = 8,
  NLCAP_DOMAIN_TOO_SMALL = 9,
  NLCAP_DEGENERATE_DENOMINATOR = 10,
  NLCAP_UNKNOWN_ERROR = 99
} nlcap_status;

/* Version string "major.minor.patch". */
const char* nlcap_version(void);

/* Stable name of a status code, e.g. "invalid_argument". */
const char* nlcap_status_string(nlcap_status status);

/* Message of the last failure on this thread; empty string if none. The
 * pointer stays valid until the next failing call on the same thread. */
const char* nlcap_last_error_message(void);

/* ---------------------------------------------------------------- channel */

typedef struct nlcap_channel nlcap_channel;

/* Requires gamma >= 0, Q > 0, L > 0, all finite. */
nlcap_status nlcap_channel_create(double gamma, double noise_density_Q,
                                  double length_L, nlcap_channel** out_channel);
void nlcap_channel_destroy(nlcap_channel* channel);

/* Quadrature/root-finding tolerances used by all evaluations on this
 * channel. Defaults: abs 1e-12, rel 1e-10, budget 1e6 evaluations. */
nlcap_status nlcap_channel_set_tolerances(nlcap_channel* channel, double abs_tol,
                                          double rel_tol, long max_evaluations);

/* snr = P/(Q*L) and gamma_tilde = gamma*L*P/sqrt(3) for average power P. */
nlcap_status nlcap_power_point(const nlcap_channel* channel, double power_P,
                               double* out_snr, double* out_gamma_tilde);

/* ------------------------------------------------------- conditional pdf */

typedef struct nlcap_cond_pdf_value {
  double mu;    /* nonlinear phase gamma*L*rho^2 of the input */
  double p0;    /* leading Gaussian density, 1/mW */
  double dp1;   /* first-order correction */
  double dp2;   /* second-order correction */
  double total; /* p0 + dp1 + dp2 */
  /* set when the point is outside the weak-noise validity region */
  int outside_perturbative_regime;
} nlcap_cond_pdf_value;

/* Conditional density of the output fluctuation (x0, y0) around the
 * noiseless trajectory of an input with amplitude input_amplitude > 0. */
nlcap_status nlcap_cond_pdf_eval(const nlcap_channel* channel,
                                 double input_amplitude, double x0, double y0,
                                 nlcap_cond_pdf_value* out_value);

/* Leading-order fluctuation covariance for nonlinear phase mu. */
nlcap_status nlcap_cond_pdf_moments(const nlcap_channel* channel, double mu,
                                    double* out_cov_xx, double* out_cov_xy,
                                    double* out_cov_yy);

/* -------------------------------------------------- densities, output pdf */

typedef struct nlcap_density nlcap_density;

/* User density over the complex plane; must integrate to 1. */
typedef double (*nlcap_density_fn)(double re, double im, void* user_data);

/* Isotropic complex Gaussian with per-quadrature variance sigma2/2. */
nlcap_status nlcap_density_create_gaussian(double sigma2,
                                           nlcap_density** out_density);

/* Leading-order capacity-achieving input density at average power P. */
nlcap_status nlcap_density_create_optimal(const nlcap_channel* channel,
                                          double power_P,
                                          nlcap_density** out_density);

/* Wraps a user callback with characteristic width `scale`; set radial when
 * the density depends on |X| only. The density is validated on registration
 * (unit mass within 1e-6, and phase independence when radial); an invalid
 * callback fails with NLCAP_INVALID_ARGUMENT and no handle is created. */
nlcap_status nlcap_density_create_callback(nlcap_density_fn fn, void* user_data,
                                           double scale, int radial,
                                           nlcap_density** out_density);
void nlcap_density_destroy(nlcap_density* density);

/* Output density at Y for inputs drawn from `density`: leading term (the
 * density at the back-rotated point) plus the O(QL) smearing correction. */
nlcap_status nlcap_output_pdf(const nlcap_channel* channel,
                              const nlcap_density* density, double y_re,
                              double y_im, double* out_leading,
                              double* out_correction, double* out_total);

/* Conditional entropy (leading term and O(QL) shift) of the channel for
 * inputs drawn from a radial `density` at average power P. */
nlcap_status nlcap_entropy_h_cond(const nlcap_channel* channel,
                                  const nlcap_density* density, double power_P,
                                  double* out_leading, double* out_correction);

/* Output-signal entropy for inputs drawn from `density` at average power P. */
nlcap_status nlcap_entropy_h_out(const nlcap_channel* channel,
                                 const nlcap_density* density, double power_P,
                                 double* out_h_out);

/* Differential entropy (nat) of the conditional output density for a single
 * input of amplitude rho > 0, to first order in QL. */
nlcap_status nlcap_cond_entropy_pointwise(const nlcap_channel* channel,
                                          double rho, double* out_entropy);

/* ----------------------------------------------------------- input design */

typedef struct nlcap_input_solution {
  double u;         /* radial exponent of the optimal density */
  double v;         /* normalization multiplier */
  double gamma_tilde;
  double residual0; /* normalization-constraint residual */
  double residual1; /* power-constraint residual */
  double u_minus_v; /* cancellation-free difference u - v */
  int series_branch;
  double delta_lambda1; /* O(QL) shift of the normalization multiplier */
  double delta_lambda2; /* O(QL) shift of the power multiplier */
  double moment0_residual;
  double moment2_residual;
} nlcap_input_solution;

/* Solves the optimal-input conditions at average power P, including the
 * first-order multiplier shifts. */
nlcap_status nlcap_optimal_input_solve(const nlcap_channel* channel,
                                       double power_P,
                                       nlcap_input_solution* out_solution);

/* Large-nonlinearity closed forms for (u, v); requires gamma_tilde >= 10. */
nlcap_status nlcap_optimal_input_asymptotic(double gamma_tilde, double* out_u,
                                            double* out_v);

/* Optimal input density at radius rho: leading value and O(QL) correction. */
nlcap_status nlcap_optimal_input_density(const nlcap_channel* channel,
                                         double power_P, double rho,
                                         double* out_leading,
                                         double* out_correction);

/* -------------------------------------------------------------- capacity */

typedef struct nlcap_capacity_row {
  double power_P;
  double snr;
  double gamma_tilde;
  double c0;          /* leading-order capacity, nat */
  double dc;          /* O(1/snr) correction, nat */
  double dc_prime;    /* dc - 1/snr, nat */
  double c_total;     /* c0 + dc, nat */
  double lower_bound; /* half-log reference bound; NaN when snr <= e */
  double u;
  double v;
  double residual0;
  double residual1;
  int series_branch;
  int outside_region; /* outside [10*QL, 0.1/(gamma^2*Q*L^3)] */
  int failed;         /* solver failure; numeric fields are NaN */
  char error_message[128];
} nlcap_capacity_row;

/* Full capacity report at one power; solver failures are recorded in the row
 * (failed = 1) rather than returned as a status. */
nlcap_status nlcap_capacity_at(const nlcap_channel* channel, double power_P,
                               nlcap_capacity_row* out_row);

/* Entropy decomposition at the optimal input: conditional entropy (leading
 * and correction), output entropy, and their mutual-information difference,
 * which reproduces c_total up to quadrature error. */
nlcap_status nlcap_entropy_breakdown(const nlcap_channel* channel,
                                     double power_P, double* out_h_cond_leading,
                                     double* out_h_cond_correction,
                                     double* out_h_out, double* out_mutual_info);

typedef struct nlcap_sweep nlcap_sweep;

/* Evaluates `points` powers across [p_min, p_max] (log- or linear-spaced)
 * and locates the local extrema of dc_prime. When allow_outside_region is
 * zero the range must lie inside the validity region; otherwise out-of-range
 * rows are evaluated and tagged. */
nlcap_status nlcap_sweep_run(const nlcap_channel* channel, double p_min,
                             double p_max, long points, int log_spacing,
                             int allow_outside_region, nlcap_sweep** out_sweep);
void nlcap_sweep_destroy(nlcap_sweep* sweep);

long nlcap_sweep_size(const nlcap_sweep* sweep);
nlcap_status nlcap_sweep_row(const nlcap_sweep* sweep, long index,
                             nlcap_capacity_row* out_row);
long nlcap_sweep_extrema_count(const nlcap_sweep* sweep);
nlcap_status nlcap_sweep_extremum(const nlcap_sweep* sweep, long index,
                                  int* out_is_minimum, double* out_power_P,
                                  double* out_dc_prime);
/* Validity region [10*QL, 0.1/(gamma^2*Q*L^3)] of the sweep's channel. */
nlcap_status nlcap_sweep_region(const nlcap_sweep* sweep,
                                double* out_region_min_P,
                                double* out_region_max_P);

/* ------------------------------------------------------------ monte carlo */

typedef enum nlcap_scheme {
  NLCAP_SCHEME_SPLITTING = 0, /* exact Kerr rotation + exact noise step */
  NLCAP_SCHEME_EULER = 1      /* first-order deterministic step */
} nlcap_scheme;

typedef struct nlcap_sim_config {
  long n_steps;            /* >= 16 */
  long n_samples;          /* >= 1000 */
  unsigned long long seed; /* counter-based generator key */
  int scheme;              /* an nlcap_scheme value */
} nlcap_sim_config;

typedef struct nlcap_ensemble_stats {
  long n_samples;
  long entropy_samples;
  double mean_x0, mean_y0;
  double stderr_mean_x0, stderr_mean_y0;
  double cov_xx, cov_xy, cov_yy;
  double stderr_cov_xx, stderr_cov_xy, stderr_cov_yy;
  double cross_entropy, stderr_cross_entropy;
  double mean_energy, stderr_energy;
  double breach_fraction;
  int perturbative_breach;
} nlcap_ensemble_stats;

/* Step count keeping per-step nonlinear phase small at this gamma_tilde. */
nlcap_status nlcap_mc_default_steps(double gamma_tilde, long* out_steps);

/* One channel realization, deterministic in (config->seed, sample_index). */
nlcap_status nlcap_mc_propagate(const nlcap_channel* channel, double x_re,
                                double x_im, const nlcap_sim_config* config,
                                long sample_index, double* out_y_re,
                                double* out_y_im);

/* Ensemble statistics in fluctuation coordinates with standard errors and
 * the analytic-density cross entropy. Byte-reproducible for any thread
 * count; NLCAP_THREADS (positive integer) caps parallelism. */
nlcap_status nlcap_mc_ensemble(const nlcap_channel* channel, double x_re,
                               double x_im, const nlcap_sim_config* config,
                               nlcap_ensemble_stats* out_stats);

typedef struct nlcap_convergence_row {
  char name[16];   /* moment name, NUL-terminated */
  double value[3]; /* estimate at n_steps = N, 2N, 4N */
  double error[3]; /* standard errors */
  double drift;    /* value[2] - value[0] */
  double drift_sigma;
  double slope; /* log2 drift ratio; NaN when unresolved */
} nlcap_convergence_row;

/* Weak-convergence audit at n_steps in {N, 2N, 4N}. Writes up to
 * row_capacity rows (6 are produced) and the three step counts. */
nlcap_status nlcap_mc_convergence(const nlcap_channel* channel, double x_re,
                                  double x_im, const nlcap_sim_config* config,
                                  long out_step_counts[3],
                                  nlcap_convergence_row* out_rows,
                                  long row_capacity, long* out_row_count);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NLCAP_H */
