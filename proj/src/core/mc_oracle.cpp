#include "core/mc_oracle.hpp"

#include <atomic>
#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "core/cond_pdf.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace nlcap {

namespace {

constexpr long kBlockSize = 4096;

// Compensated accumulator. Blocks are summed independently and then combined
// in block order, so totals do not depend on how blocks were scheduled.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;

  void add(double value) {
    const double adjusted = value - carry;
    const double next = sum + adjusted;
    carry = (next - sum) - adjusted;
    sum = next;
  }
};

struct BlockSums {
  Kahan x0, y0;
  Kahan x0x0, y0y0, x0y0;
  Kahan x0p4, y0p4, x0y0sq;
  Kahan energy, energy_sq;
  Kahan log_density, log_density_sq;
  long breaches = 0;
  long entropy_samples = 0;
};

int thread_cap() {
  if (const char* env = std::getenv("NLCAP_THREADS")) {
    errno = 0;
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || parsed < 1) {
      raise(errc::invalid_argument, "NLCAP_THREADS must be a positive integer");
    }
    return static_cast<int>(std::min<long>(parsed, 1024));
  }
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware == 0 ? 1 : static_cast<int>(hardware);
}

// Propagates the input placed on the positive real axis. Drawing the noise in
// this frame makes the fluctuation-coordinate ensemble independent of the
// input phase; callers needing the physical output rotate by exp(i*arg(X)).
ComplexSample propagate_radial(double rho, const ChannelParams& params,
                               const SimConfig& cfg, std::uint64_t sample_index) {
  const double dz = params.length_L / static_cast<double>(cfg.n_steps);
  const double sigma = std::sqrt(0.5 * params.noise_density_Q * dz);
  const double gamma_dz = params.gamma * dz;
  ComplexSample psi(rho, 0.0);
  for (long step = 0; step < cfg.n_steps; ++step) {
    if (cfg.scheme == SdeScheme::splitting) {
      psi *= std::polar(1.0, gamma_dz * std::norm(psi));
    } else {
      psi += ComplexSample(0.0, gamma_dz * std::norm(psi)) * psi;
    }
    const auto [noise_re, noise_im] =
        rng::gaussian_pair(cfg.seed, sample_index, static_cast<std::uint64_t>(step));
    psi += ComplexSample(sigma * noise_re, sigma * noise_im);
  }
  return psi;
}

void accumulate_sample(BlockSums& sums, double rho, ComplexSample output,
                       const ChannelParams& params) {
  const FluctuationCoords coords =
      to_fluctuation_coords(ComplexSample(rho, 0.0), output, params);
  const CondPdfValue density = cond_pdf(coords, params);

  const double sq_x = coords.x0 * coords.x0;
  const double sq_y = coords.y0 * coords.y0;
  const double cross = coords.x0 * coords.y0;
  sums.x0.add(coords.x0);
  sums.y0.add(coords.y0);
  sums.x0x0.add(sq_x);
  sums.y0y0.add(sq_y);
  sums.x0y0.add(cross);
  sums.x0p4.add(sq_x * sq_x);
  sums.y0p4.add(sq_y * sq_y);
  sums.x0y0sq.add(cross * cross);

  const double energy = std::norm(output);
  sums.energy.add(energy);
  sums.energy_sq.add(energy * energy);

  if (density.outside_perturbative_regime) ++sums.breaches;
  if (density.total > 0.0) {
    const double log_value = std::log(density.total);
    sums.log_density.add(log_value);
    sums.log_density_sq.add(log_value * log_value);
    ++sums.entropy_samples;
  }
}

double variance_of_mean(double raw_second, double mean, double n) {
  return std::sqrt(std::max(raw_second - mean * mean, 0.0) / n);
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.n_steps < 16) {
    raise(errc::invalid_argument, "SimConfig.n_steps must be at least 16");
  }
  if (cfg.n_samples < 1000) {
    raise(errc::invalid_argument, "SimConfig.n_samples must be at least 1000");
  }
}

long default_step_count(double gamma_tilde) {
  if (!(gamma_tilde >= 0.0) || !std::isfinite(gamma_tilde)) {
    raise(errc::negative_gamma_tilde,
          "step-count heuristic needs a finite gamma_tilde >= 0");
  }
  if (gamma_tilde <= 10.0) return 256;
  return static_cast<long>(std::ceil(25.6 * gamma_tilde));
}

ComplexSample propagate(ComplexSample X, const ChannelParams& params,
                        const SimConfig& cfg, long sample_index) {
  validate(params);
  validate(cfg);
  if (sample_index < 0) {
    raise(errc::invalid_argument, "sample_index must be nonnegative");
  }
  const double rho = std::abs(X);
  const ComplexSample output =
      propagate_radial(rho, params, cfg, static_cast<std::uint64_t>(sample_index));
  if (rho == 0.0) return output;
  return output * (X / rho);
}

EnsembleStats ensemble_stats(ComplexSample X, const ChannelParams& params,
                             const SimConfig& cfg) {
  validate(params);
  validate(cfg);
  const double rho = std::abs(X);
  if (rho == 0.0) {
    raise(errc::zero_input_signal,
          "ensemble statistics need |X| > 0 to fix the fluctuation frame");
  }

  const long block_count = (cfg.n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> blocks(static_cast<std::size_t>(block_count));

  const auto run_block = [&](long block) {
    BlockSums sums;
    const long begin = block * kBlockSize;
    const long end = std::min(cfg.n_samples, begin + kBlockSize);
    for (long i = begin; i < end; ++i) {
      const ComplexSample output =
          propagate_radial(rho, params, cfg, static_cast<std::uint64_t>(i));
      accumulate_sample(sums, rho, output, params);
    }
    blocks[static_cast<std::size_t>(block)] = sums;
  };

  const int workers = static_cast<int>(std::min<long>(thread_cap(), block_count));
  if (workers <= 1) {
    for (long block = 0; block < block_count; ++block) run_block(block);
  } else {
    std::atomic<long> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (long block = next.fetch_add(1); block < block_count;
               block = next.fetch_add(1)) {
            run_block(block);
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  BlockSums total;
  for (const BlockSums& sums : blocks) {
    total.x0.add(sums.x0.sum);
    total.y0.add(sums.y0.sum);
    total.x0x0.add(sums.x0x0.sum);
    total.y0y0.add(sums.y0y0.sum);
    total.x0y0.add(sums.x0y0.sum);
    total.x0p4.add(sums.x0p4.sum);
    total.y0p4.add(sums.y0p4.sum);
    total.x0y0sq.add(sums.x0y0sq.sum);
    total.energy.add(sums.energy.sum);
    total.energy_sq.add(sums.energy_sq.sum);
    total.log_density.add(sums.log_density.sum);
    total.log_density_sq.add(sums.log_density_sq.sum);
    total.breaches += sums.breaches;
    total.entropy_samples += sums.entropy_samples;
  }

  EnsembleStats stats;
  stats.n_samples = cfg.n_samples;
  stats.entropy_samples = total.entropy_samples;

  const double n = static_cast<double>(cfg.n_samples);
  const double bessel = n / (n - 1.0);
  stats.mean_x0 = total.x0.sum / n;
  stats.mean_y0 = total.y0.sum / n;

  const double raw_xx = total.x0x0.sum / n;
  const double raw_yy = total.y0y0.sum / n;
  const double raw_xy = total.x0y0.sum / n;
  stats.cov_xx = (raw_xx - stats.mean_x0 * stats.mean_x0) * bessel;
  stats.cov_yy = (raw_yy - stats.mean_y0 * stats.mean_y0) * bessel;
  stats.cov_xy = (raw_xy - stats.mean_x0 * stats.mean_y0) * bessel;
  stats.stderr_mean_x0 = std::sqrt(std::max(stats.cov_xx, 0.0) / n);
  stats.stderr_mean_y0 = std::sqrt(std::max(stats.cov_yy, 0.0) / n);

  // Standard errors of the second moments from their own sample variances;
  // the O(mean^2) centering terms are negligible in this frame.
  stats.stderr_cov_xx = variance_of_mean(total.x0p4.sum / n, raw_xx, n);
  stats.stderr_cov_yy = variance_of_mean(total.y0p4.sum / n, raw_yy, n);
  stats.stderr_cov_xy = variance_of_mean(total.x0y0sq.sum / n, raw_xy, n);

  stats.mean_energy = total.energy.sum / n;
  stats.stderr_energy =
      variance_of_mean(total.energy_sq.sum / n, stats.mean_energy, n);

  if (total.entropy_samples > 0) {
    const double m = static_cast<double>(total.entropy_samples);
    const double mean_log = total.log_density.sum / m;
    stats.cross_entropy = -mean_log;
    stats.stderr_cross_entropy =
        variance_of_mean(total.log_density_sq.sum / m, mean_log, m);
  } else {
    stats.cross_entropy = std::numeric_limits<double>::quiet_NaN();
    stats.stderr_cross_entropy = std::numeric_limits<double>::quiet_NaN();
  }

  stats.breach_fraction = static_cast<double>(total.breaches) / n;
  stats.perturbative_breach = stats.breach_fraction > 0.01;
  return stats;
}

ConvergenceAudit convergence_audit(ComplexSample X, const ChannelParams& params,
                                   const SimConfig& base_cfg) {
  ConvergenceAudit audit;
  for (int level = 0; level < 3; ++level) {
    SimConfig cfg = base_cfg;
    cfg.n_steps = base_cfg.n_steps << level;
    audit.step_counts[static_cast<std::size_t>(level)] = cfg.n_steps;
    audit.stats[static_cast<std::size_t>(level)] = ensemble_stats(X, params, cfg);
  }

  const auto add_moment = [&audit](const std::string& name,
                                   double EnsembleStats::* value_field,
                                   double EnsembleStats::* error_field) {
    MomentConvergence moment;
    moment.name = name;
    for (std::size_t level = 0; level < 3; ++level) {
      moment.value[level] = audit.stats[level].*value_field;
      moment.error[level] = audit.stats[level].*error_field;
    }
    moment.drift = moment.value[2] - moment.value[0];
    const double combined = std::hypot(moment.error[0], moment.error[2]);
    moment.drift_sigma = (combined == 0.0 && moment.drift == 0.0)
                             ? 0.0
                             : moment.drift / combined;
    const double step_one = moment.value[1] - moment.value[0];
    const double step_two = moment.value[2] - moment.value[1];
    const bool resolved =
        std::abs(step_one) > 2.0 * std::hypot(moment.error[0], moment.error[1]) &&
        std::abs(step_two) > 2.0 * std::hypot(moment.error[1], moment.error[2]);
    moment.slope = resolved ? std::log2(std::abs(step_one / step_two))
                            : std::numeric_limits<double>::quiet_NaN();
    audit.moments.push_back(std::move(moment));
  };

  add_moment("mean_x0", &EnsembleStats::mean_x0, &EnsembleStats::stderr_mean_x0);
  add_moment("mean_y0", &EnsembleStats::mean_y0, &EnsembleStats::stderr_mean_y0);
  add_moment("cov_xx", &EnsembleStats::cov_xx, &EnsembleStats::stderr_cov_xx);
  add_moment("cov_xy", &EnsembleStats::cov_xy, &EnsembleStats::stderr_cov_xy);
  add_moment("cov_yy", &EnsembleStats::cov_yy, &EnsembleStats::stderr_cov_yy);
  add_moment("mean_energy", &EnsembleStats::mean_energy, &EnsembleStats::stderr_energy);
  return audit;
}

}  // namespace nlcap
