#ifndef NLCAP_CORE_MC_ORACLE_HPP
#define NLCAP_CORE_MC_ORACLE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/channel.hpp"

namespace nlcap {

// Spatial discretization scheme for the channel equation. The splitting
// scheme alternates the exact Kerr phase rotation with an exact Gaussian
// noise increment, so its only weak error comes from the non-commutation of
// the two flows, O(dz). Euler treats the nonlinearity to first order in dz
// and is kept for cross-checks of the convergence audit.
enum class SdeScheme { splitting, euler };

struct SimConfig {
  long n_steps = 256;
  long n_samples = 100000;
  std::uint64_t seed = 1;
  SdeScheme scheme = SdeScheme::splitting;
};

// Throws invalid_argument unless n_steps >= 16 and n_samples >= 1000.
void validate(const SimConfig& cfg);

// Step count keeping per-step nonlinear phase increments small: 256 up to
// gamma_tilde = 10, then ceil(256 * gamma_tilde / 10).
long default_step_count(double gamma_tilde);

// One realization of the channel output psi(L) for input X, deterministic
// given (cfg.seed, sample_index): per step dz = L/n_steps the scheme applies
// its deterministic update followed by a complex Gaussian increment with
// variance Q*dz/2 in each quadrature. Randomness is drawn in the input-phase
// frame, so rotating X rotates the output sample by the same phase.
ComplexSample propagate(ComplexSample X, const ChannelParams& params,
                        const SimConfig& cfg, long sample_index);

// Monte-Carlo summary of the output ensemble in fluctuation coordinates.
// Covariances are unbiased sample estimates; every estimate carries a
// standard error. cross_entropy averages -log of the analytic conditional
// density over the samples, an upper estimate of the conditional entropy
// that is tight when the analytic density is exact. Samples carrying the
// density's validity flag are counted in breach_fraction; when that fraction
// exceeds 1% the statistics are still reported but perturbative_breach is
// set.
struct EnsembleStats {
  long n_samples = 0;
  long entropy_samples = 0;

  double mean_x0 = 0.0;
  double mean_y0 = 0.0;
  double stderr_mean_x0 = 0.0;
  double stderr_mean_y0 = 0.0;

  double cov_xx = 0.0;
  double cov_xy = 0.0;
  double cov_yy = 0.0;
  double stderr_cov_xx = 0.0;
  double stderr_cov_xy = 0.0;
  double stderr_cov_yy = 0.0;

  double cross_entropy = 0.0;
  double stderr_cross_entropy = 0.0;

  double mean_energy = 0.0;
  double stderr_energy = 0.0;

  double breach_fraction = 0.0;
  bool perturbative_breach = false;
};

// Generates cfg.n_samples realizations for input X and accumulates the
// statistics above. Accumulation runs in fixed-size blocks with compensated
// sums combined in block order, so the result is byte-identical for any
// thread count. The environment variable NLCAP_THREADS (positive integer)
// caps the parallelism. Throws zero_input_signal when |X| = 0.
EnsembleStats ensemble_stats(ComplexSample X, const ChannelParams& params,
                             const SimConfig& cfg);

// Convergence record of one moment estimate across step counts N, 2N, 4N.
// drift is the value change from N to 4N and drift_sigma that change in
// units of its combined standard error. slope is the log2 ratio of the two
// successive drifts, near 1 for a first-order weak error once the drift is
// resolved above the Monte-Carlo noise, and NaN when it is not resolved.
struct MomentConvergence {
  std::string name;
  std::array<double, 3> value{};
  std::array<double, 3> error{};
  double drift = 0.0;
  double drift_sigma = 0.0;
  double slope = 0.0;
};

struct ConvergenceAudit {
  std::array<long, 3> step_counts{};
  std::array<EnsembleStats, 3> stats{};
  std::vector<MomentConvergence> moments;
};

// Runs ensemble_stats at n_steps in {N, 2N, 4N} (N = base_cfg.n_steps) with
// identical seed and sample count and tabulates the convergence of the mean,
// covariance, and energy estimates. Pure function of its arguments.
ConvergenceAudit convergence_audit(ComplexSample X, const ChannelParams& params,
                                   const SimConfig& base_cfg);

}  // namespace nlcap

#endif  // NLCAP_CORE_MC_ORACLE_HPP
