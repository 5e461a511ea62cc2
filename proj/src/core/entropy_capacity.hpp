#ifndef NLCAP_CORE_ENTROPY_CAPACITY_HPP
#define NLCAP_CORE_ENTROPY_CAPACITY_HPP

#include <string>
#include <utility>
#include <vector>

#include "core/channel.hpp"
#include "core/input_opt.hpp"
#include "core/numerics.hpp"
#include "core/output_pdf.hpp"

namespace nlcap {

// Entropies of the channel at the next-to-leading-order optimal input, all
// in nat per complex sample.
struct EntropyBreakdown {
  double h_cond_leading = 0.0;  // noise entropy given the input
  double h_cond_corr = 0.0;     // O(QL) conditional-entropy shift
  double h_out = 0.0;           // output-signal entropy
  double mutual_info = 0.0;     // h_out - h_cond_leading - h_cond_corr
};

// One evaluated power point of a capacity sweep.
struct CapacityReport {
  double power_P = 0.0;
  double snr = 0.0;
  double gamma_tilde = 0.0;
  double c0 = 0.0;           // leading-order capacity, nat
  double dC = 0.0;           // O(1/snr) correction, nat
  double dC_prime = 0.0;     // dC - 1/snr, nat
  double c_total = 0.0;      // c0 + dC, nat
  double lower_bound = 0.0;  // half-log reference bound (NaN if snr <= e)
  double u = 0.0;
  double v = 0.0;
  double residual0 = 0.0;
  double residual1 = 0.0;
  bool series_branch = false;
  bool outside_region = false;
  bool failed = false;
  std::string error;
};

struct SweepExtremum {
  bool is_minimum = false;
  double power_P = 0.0;   // refined location, mW
  double dC_prime = 0.0;  // refined value, nat
};

struct SweepRequest {
  double p_min = 0.0;
  double p_max = 0.0;
  long points = 0;
  bool log_spacing = true;
  // When false (default) the requested range must lie inside the
  // intermediate power region [10*QL, 0.1/(gamma^2*Q*L^3)]; when true,
  // out-of-region rows are evaluated anyway and tagged.
  bool allow_outside_region = false;
};

struct SweepResult {
  std::vector<CapacityReport> rows;
  std::vector<SweepExtremum> extrema;  // refined dC_prime extrema
  double region_min_P = 0.0;
  double region_max_P = 0.0;
};

// Conditional entropy (h0, dh) for a radial input density: the leading term
// 1 + log(pi*QL) + (1/2)*E[log(1+mu^2/3)] and the O(QL) correction.
std::pair<double, double> h_cond(const SmoothDensity& d, double P,
                                 const ChannelParams& params,
                                 const num::Tolerances& tol = {});

// Output entropy -int (d + correction) * log d over the output plane.
double h_out(const SmoothDensity& d, double P, const ChannelParams& params,
             const num::Tolerances& tol = {});

// Differential entropy of the conditional output density for a single input
// of amplitude rho, to first order in QL:
// 1 + log(pi*QL) + (1/2)log(1 + mu^2/3) plus the QL-weighted shift.
double cond_entropy_pointwise(double rho, const ChannelParams& params);

// C0 = log(snr) + u - log(v) - 1.
double capacity_leading(const OptimalInputSolution& sol, double snr);
double capacity_leading(double gamma_tilde, double snr,
                        const num::Tolerances& tol = {});

enum class CorrectionBranch {
  automatic,  // series below gamma_tilde = 1e-3, general otherwise
  general,
  series,
};

// O(1/snr) capacity correction dC.
double capacity_correction(double gamma_tilde, double snr,
                           CorrectionBranch branch = CorrectionBranch::automatic,
                           const num::Tolerances& tol = {});

// dC' = dC - 1/snr (literal floating-point subtraction).
double capacity_correction_prime(double gamma_tilde, double snr,
                                 const num::Tolerances& tol = {});

// Closed-form large-power behavior of dC; requires gamma_tilde >= 3.
double capacity_large_asymptotic(double P, const ChannelParams& params);

// Half-log capacity reference: (1/2)log(snr) + (1 + gamma_E - log(4*pi))/2.
// Requires snr > e.
double lower_bound_reference(double snr);

// Entropy decomposition at the next-to-leading-order optimal input for
// power P; mutual_info equals c0 + dC up to quadrature error.
EntropyBreakdown entropy_breakdown(double P, const ChannelParams& params,
                                   const num::Tolerances& tol = {});

// Full report for a single power point (never throws for per-point solver
// failures; they are recorded in the row).
CapacityReport evaluate_power_point(double P, const ChannelParams& params,
                                    const num::Tolerances& tol = {});

SweepResult sweep(const ChannelParams& params, const SweepRequest& req,
                  const num::Tolerances& tol = {});

}  // namespace nlcap

#endif  // NLCAP_CORE_ENTROPY_CAPACITY_HPP
