#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "nlcap/nlcap.h"

// The suite links the shared library only, so every check exercises the C
// boundary: handles, status codes, and plain-struct mirrors of the results.

namespace {

constexpr double kPi = 3.14159265358979323846;

struct ChannelGuard {
  nlcap_channel* handle = nullptr;
  ~ChannelGuard() { nlcap_channel_destroy(handle); }
};

struct DensityGuard {
  nlcap_density* handle = nullptr;
  ~DensityGuard() { nlcap_density_destroy(handle); }
};

struct SweepGuard {
  nlcap_sweep* handle = nullptr;
  ~SweepGuard() { nlcap_sweep_destroy(handle); }
};

nlcap_channel* make_channel(double gamma, double Q, double L) {
  nlcap_channel* ch = nullptr;
  REQUIRE(nlcap_channel_create(gamma, Q, L, &ch) == NLCAP_OK);
  REQUIRE(ch != nullptr);
  return ch;
}

double gaussian_callback(double re, double im, void* user_data) {
  const double sigma2 = *static_cast<const double*>(user_data);
  return std::exp(-(re * re + im * im) / sigma2) / (kPi * sigma2);
}

double overweight_callback(double re, double im, void* user_data) {
  return 1.1 * gaussian_callback(re, im, user_data);
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(nlcap_version()) == "1.0.0");
  CHECK(std::string(nlcap_status_string(NLCAP_OK)) == "ok");
  CHECK(std::string(nlcap_status_string(NLCAP_ZERO_INPUT_SIGNAL)) == "zero_input_signal");
  CHECK(std::string(nlcap_status_string(NLCAP_DEGENERATE_DENOMINATOR)) ==
        "degenerate_denominator");
  CHECK(std::string(nlcap_status_string(static_cast<nlcap_status>(42))) == "unknown_error");
}

TEST_CASE("channel lifecycle and argument checking") {
  ChannelGuard guard{make_channel(1.3e-3, 1.5e-7, 1000.0)};
  nlcap_channel* ch = guard.handle;

  double snr = 0.0;
  double gt = 0.0;
  REQUIRE(nlcap_power_point(ch, 1.0, &snr, &gt) == NLCAP_OK);
  CHECK(snr == doctest::Approx(1.0 / 1.5e-4).epsilon(1e-12));
  CHECK(gt == doctest::Approx(1.3 / std::sqrt(3.0)).epsilon(1e-12));

  nlcap_channel* bad = reinterpret_cast<nlcap_channel*>(0x1);
  CHECK(nlcap_channel_create(1.0, -1.0, 1.0, &bad) == NLCAP_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(nlcap_last_error_message()) > 0);
  CHECK(nlcap_channel_create(1.0, 1.0, 1.0, nullptr) == NLCAP_INVALID_ARGUMENT);

  CHECK(nlcap_channel_set_tolerances(ch, 0.0, 0.0, 100) == NLCAP_INVALID_ARGUMENT);
  CHECK(nlcap_channel_set_tolerances(ch, 1e-13, 1e-11, -5) == NLCAP_INVALID_ARGUMENT);
  CHECK(nlcap_channel_set_tolerances(ch, 1e-12, 1e-10, 1000000) == NLCAP_OK);

  CHECK(nlcap_power_point(nullptr, 1.0, &snr, &gt) == NLCAP_INVALID_ARGUMENT);
  CHECK(nlcap_power_point(ch, -2.0, &snr, &gt) == NLCAP_INVALID_ARGUMENT);

  nlcap_channel_destroy(nullptr);
}

TEST_CASE("conditional density through the boundary") {
  ChannelGuard guard{make_channel(1.0, 1e-3, 1.0)};
  nlcap_channel* ch = guard.handle;
  const double ql = 1e-3;

  nlcap_cond_pdf_value value{};
  REQUIRE(nlcap_cond_pdf_eval(ch, 1.0, 0.0, 0.0, &value) == NLCAP_OK);
  CHECK(value.mu == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(value.p0 ==
        doctest::Approx(1.0 / (kPi * ql * std::sqrt(1.0 + 1.0 / 3.0))).epsilon(1e-12));
  CHECK(value.total == doctest::Approx(value.p0 + value.dp1 + value.dp2).epsilon(1e-15));
  CHECK(value.outside_perturbative_regime == 0);

  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
  REQUIRE(nlcap_cond_pdf_moments(ch, 1.0, &xx, &xy, &yy) == NLCAP_OK);
  CHECK(xx == doctest::Approx(0.5 * ql).epsilon(1e-14));
  CHECK(xy == doctest::Approx(0.5 * ql).epsilon(1e-14));
  CHECK(yy == doctest::Approx(0.5 * ql * (1.0 + 4.0 / 3.0)).epsilon(1e-14));

  CHECK(nlcap_cond_pdf_eval(ch, 0.0, 0.0, 0.0, &value) == NLCAP_ZERO_INPUT_SIGNAL);
  CHECK(nlcap_cond_pdf_eval(ch, -1.0, 0.0, 0.0, &value) == NLCAP_INVALID_ARGUMENT);
  const double nan = std::nan("");
  CHECK(nlcap_cond_pdf_eval(ch, 1.0, nan, 0.0, &value) == NLCAP_INVALID_ARGUMENT);
  CHECK(nlcap_cond_pdf_eval(ch, 1.0, 0.0, 0.0, nullptr) == NLCAP_INVALID_ARGUMENT);
}

TEST_CASE("gaussian and callback densities drive the output pdf") {
  ChannelGuard guard{make_channel(0.0, 1.5e-7, 1000.0)};
  nlcap_channel* ch = guard.handle;
  const double ql = 1.5e-4;

  DensityGuard gaussian;
  REQUIRE(nlcap_density_create_gaussian(1.0, &gaussian.handle) == NLCAP_OK);

  // With gamma = 0 the back-rotation is the identity and the correction
  // reduces to (QL/4) times the Laplacian of the input density.
  const double y_re = 0.3;
  const double y_im = -0.2;
  const double r2 = y_re * y_re + y_im * y_im;
  const double f = std::exp(-r2) / kPi;
  double leading = 0.0;
  double correction = 0.0;
  double total = 0.0;
  REQUIRE(nlcap_output_pdf(ch, gaussian.handle, y_re, y_im, &leading, &correction, &total) ==
          NLCAP_OK);
  CHECK(leading == doctest::Approx(f).epsilon(1e-12));
  CHECK(correction == doctest::Approx(ql * (r2 - 1.0) * f).epsilon(1e-9));
  CHECK(total == doctest::Approx(leading + correction).epsilon(1e-15));

  double sigma2 = 1.0;
  DensityGuard callback;
  REQUIRE(nlcap_density_create_callback(&gaussian_callback, &sigma2, 1.0, 1,
                                        &callback.handle) == NLCAP_OK);
  double cb_leading = 0.0;
  double cb_correction = 0.0;
  double cb_total = 0.0;
  REQUIRE(nlcap_output_pdf(ch, callback.handle, y_re, y_im, &cb_leading, &cb_correction,
                           &cb_total) == NLCAP_OK);
  CHECK(cb_leading == doctest::Approx(leading).epsilon(1e-12));
  CHECK(cb_correction == doctest::Approx(correction).epsilon(1e-6));

  // A density that integrates to 1.1 must be rejected at registration.
  nlcap_density* bad = reinterpret_cast<nlcap_density*>(0x1);
  CHECK(nlcap_density_create_callback(&overweight_callback, &sigma2, 1.0, 1, &bad) ==
        NLCAP_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(nlcap_last_error_message()) > 0);
  CHECK(nlcap_density_create_callback(nullptr, &sigma2, 1.0, 1, &bad) ==
        NLCAP_INVALID_ARGUMENT);

  double h0 = 0.0;
  double dh = 0.0;
  REQUIRE(nlcap_entropy_h_cond(ch, gaussian.handle, 1.0, &h0, &dh) == NLCAP_OK);
  CHECK(h0 == doctest::Approx(1.0 + std::log(kPi * ql)).epsilon(1e-12));
  CHECK(dh == doctest::Approx(0.0).epsilon(1e-12));

  double point_entropy = 0.0;
  REQUIRE(nlcap_cond_entropy_pointwise(ch, 2.0, &point_entropy) == NLCAP_OK);
  CHECK(point_entropy == doctest::Approx(1.0 + std::log(kPi * ql)).epsilon(1e-14));
  CHECK(nlcap_cond_entropy_pointwise(ch, 0.0, &point_entropy) == NLCAP_INVALID_ARGUMENT);

  // -int (d + corr) log d for the unit Gaussian at gamma = 0 works out to
  // log(pi e) + QL.
  double hout = 0.0;
  REQUIRE(nlcap_entropy_h_out(ch, gaussian.handle, 1.0, &hout) == NLCAP_OK);
  CHECK(hout == doctest::Approx(std::log(kPi) + 1.0 + ql).epsilon(1e-9));

  CHECK(nlcap_density_create_gaussian(-1.0, &bad) == NLCAP_INVALID_ARGUMENT);
  nlcap_density_destroy(nullptr);
}

TEST_CASE("optimal input solution and density") {
  // gamma*L*P/sqrt(3) = 1 and snr = 1e3 at P = 1 mW.
  ChannelGuard guard{make_channel(std::sqrt(3.0) * 1e-3, 1e-6, 1000.0)};
  nlcap_channel* ch = guard.handle;

  nlcap_input_solution sol{};
  REQUIRE(nlcap_optimal_input_solve(ch, 1.0, &sol) == NLCAP_OK);
  CHECK(sol.gamma_tilde == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.u == doctest::Approx(0.62880676860478884).epsilon(1e-10));
  CHECK(sol.v == doctest::Approx(0.97056725475620301).epsilon(1e-10));
  CHECK(sol.series_branch == 0);
  CHECK(sol.residual0 < 1e-10);
  CHECK(sol.residual1 < 1e-10);
  CHECK(sol.delta_lambda1 == doctest::Approx(0.00189828373918).epsilon(1e-8));
  CHECK(sol.delta_lambda2 == doctest::Approx(-0.000955923432838).epsilon(1e-8));
  CHECK(std::abs(sol.moment0_residual) < 1e-8);
  CHECK(std::abs(sol.moment2_residual) < 1e-8);

  // Leading density at rho = 1: v*exp(-u)/(pi*sqrt(1 + gamma_tilde^2)).
  double leading = 0.0;
  double correction = 0.0;
  REQUIRE(nlcap_optimal_input_density(ch, 1.0, 1.0, &leading, &correction) == NLCAP_OK);
  const double expected = sol.v * std::exp(-sol.u) / (kPi * std::sqrt(2.0));
  CHECK(leading == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(correction) < 0.05 * leading);
  CHECK(nlcap_optimal_input_density(ch, 1.0, -1.0, &leading, &correction) ==
        NLCAP_INVALID_ARGUMENT);

  double u = 0.0;
  double v = 0.0;
  REQUIRE(nlcap_optimal_input_asymptotic(1e6, &u, &v) == NLCAP_OK);
  CHECK(u > 0.0);
  CHECK(v > u);
  CHECK(nlcap_optimal_input_asymptotic(1.0, &u, &v) == NLCAP_DOMAIN_TOO_SMALL);
}

TEST_CASE("capacity report and entropy identity") {
  ChannelGuard guard{make_channel(std::sqrt(3.0) * 1e-3, 1e-6, 1000.0)};
  nlcap_channel* ch = guard.handle;

  nlcap_capacity_row row{};
  REQUIRE(nlcap_capacity_at(ch, 1.0, &row) == NLCAP_OK);
  CHECK(row.failed == 0);
  CHECK(row.outside_region == 0);
  CHECK(row.error_message[0] == '\0');
  CHECK(row.snr == doctest::Approx(1e3).epsilon(1e-12));
  CHECK(row.c_total == row.c0 + row.dc);
  CHECK(row.dc_prime == doctest::Approx(row.dc - 1.0 / row.snr).epsilon(1e-12));
  CHECK(row.lower_bound < row.c_total);

  double hcl = 0.0;
  double hcc = 0.0;
  double hout = 0.0;
  double mi = 0.0;
  REQUIRE(nlcap_entropy_breakdown(ch, 1.0, &hcl, &hcc, &hout, &mi) == NLCAP_OK);
  CHECK(mi == doctest::Approx(hout - hcl - hcc).epsilon(1e-12));
  CHECK(mi == doctest::Approx(6.56737898758838).epsilon(1e-8));
  CHECK(std::abs(mi - row.c_total) <= 1e-8 * (1.0 + row.c0));

  CHECK(nlcap_capacity_at(ch, 0.0, &row) == NLCAP_INVALID_ARGUMENT);
}

TEST_CASE("capacity sweep handle") {
  ChannelGuard guard{make_channel(1.3e-3, 1.5e-7, 1000.0)};
  nlcap_channel* ch = guard.handle;

  SweepGuard sweep;
  REQUIRE(nlcap_sweep_run(ch, 0.1, 100.0, 60, 1, 0, &sweep.handle) == NLCAP_OK);
  REQUIRE(sweep.handle != nullptr);
  REQUIRE(nlcap_sweep_size(sweep.handle) == 60);

  nlcap_capacity_row first{};
  nlcap_capacity_row last{};
  REQUIRE(nlcap_sweep_row(sweep.handle, 0, &first) == NLCAP_OK);
  REQUIRE(nlcap_sweep_row(sweep.handle, 59, &last) == NLCAP_OK);
  CHECK(first.power_P == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(last.power_P == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(first.failed == 0);
  CHECK(last.failed == 0);

  double region_min = 0.0;
  double region_max = 0.0;
  REQUIRE(nlcap_sweep_region(sweep.handle, &region_min, &region_max) == NLCAP_OK);
  CHECK(region_min == doctest::Approx(10.0 * 1.5e-4).epsilon(1e-12));
  CHECK(region_max ==
        doctest::Approx(0.1 / (1.3e-3 * 1.3e-3 * 1.5e-7 * 1e9)).epsilon(1e-12));

  REQUIRE(nlcap_sweep_extrema_count(sweep.handle) == 2);
  int is_min = 0;
  double at_power = 0.0;
  double value = 0.0;
  REQUIRE(nlcap_sweep_extremum(sweep.handle, 0, &is_min, &at_power, &value) == NLCAP_OK);
  CHECK(is_min == 1);
  CHECK(at_power == doctest::Approx(0.741376125355).epsilon(1e-3));
  CHECK(value == doctest::Approx(-7.91489982812e-6).epsilon(1e-6));
  REQUIRE(nlcap_sweep_extremum(sweep.handle, 1, &is_min, &at_power, &value) == NLCAP_OK);
  CHECK(is_min == 0);
  CHECK(at_power == doctest::Approx(43.3650145052).epsilon(1e-3));
  CHECK(value == doctest::Approx(9.26493840178e-6).epsilon(1e-6));

  nlcap_capacity_row row{};
  CHECK(nlcap_sweep_row(sweep.handle, 60, &row) == NLCAP_INVALID_ARGUMENT);
  CHECK(nlcap_sweep_row(sweep.handle, -1, &row) == NLCAP_INVALID_ARGUMENT);
  CHECK(nlcap_sweep_extremum(sweep.handle, 2, &is_min, &at_power, &value) ==
        NLCAP_INVALID_ARGUMENT);

  // The strict mode refuses ranges leaving the validity region; the tagged
  // mode evaluates them and sets the flag per row.
  nlcap_sweep* rejected = reinterpret_cast<nlcap_sweep*>(0x1);
  CHECK(nlcap_sweep_run(ch, 380.0, 420.0, 3, 0, 0, &rejected) == NLCAP_INVALID_ARGUMENT);
  CHECK(rejected == nullptr);

  SweepGuard tagged;
  REQUIRE(nlcap_sweep_run(ch, 380.0, 420.0, 3, 0, 1, &tagged.handle) == NLCAP_OK);
  nlcap_capacity_row inside{};
  nlcap_capacity_row outside{};
  REQUIRE(nlcap_sweep_row(tagged.handle, 0, &inside) == NLCAP_OK);
  REQUIRE(nlcap_sweep_row(tagged.handle, 2, &outside) == NLCAP_OK);
  CHECK(inside.outside_region == 0);
  CHECK(outside.outside_region == 1);

  CHECK(nlcap_sweep_size(nullptr) == 0);
  CHECK(nlcap_sweep_extrema_count(nullptr) == 0);
  nlcap_sweep_destroy(nullptr);
}

TEST_CASE("monte carlo simulation through the boundary") {
  ChannelGuard guard{make_channel(0.0, 1.5e-7, 1000.0)};
  nlcap_channel* ch = guard.handle;
  const double ql = 1.5e-4;

  long steps = 0;
  REQUIRE(nlcap_mc_default_steps(0.5, &steps) == NLCAP_OK);
  CHECK(steps == 256);
  REQUIRE(nlcap_mc_default_steps(20.0, &steps) == NLCAP_OK);
  CHECK(steps == 512);
  CHECK(nlcap_mc_default_steps(-1.0, &steps) == NLCAP_NEGATIVE_GAMMA_TILDE);

  nlcap_sim_config cfg{};
  cfg.n_steps = 16;
  cfg.n_samples = 5000;
  cfg.seed = 99;
  cfg.scheme = NLCAP_SCHEME_SPLITTING;

  double y_re = 0.0;
  double y_im = 0.0;
  REQUIRE(nlcap_mc_propagate(ch, 0.8, 0.0, &cfg, 7, &y_re, &y_im) == NLCAP_OK);
  double y_re2 = 0.0;
  double y_im2 = 0.0;
  REQUIRE(nlcap_mc_propagate(ch, 0.8, 0.0, &cfg, 7, &y_re2, &y_im2) == NLCAP_OK);
  CHECK(y_re == y_re2);
  CHECK(y_im == y_im2);
  REQUIRE(nlcap_mc_propagate(ch, 0.8, 0.0, &cfg, 8, &y_re2, &y_im2) == NLCAP_OK);
  CHECK(y_re != y_re2);

  nlcap_sim_config bad_cfg = cfg;
  bad_cfg.scheme = 5;
  CHECK(nlcap_mc_propagate(ch, 0.8, 0.0, &bad_cfg, 0, &y_re, &y_im) ==
        NLCAP_INVALID_ARGUMENT);
  bad_cfg = cfg;
  bad_cfg.n_samples = 500;
  nlcap_ensemble_stats stats{};
  CHECK(nlcap_mc_ensemble(ch, 0.8, 0.0, &bad_cfg, &stats) == NLCAP_INVALID_ARGUMENT);

  REQUIRE(nlcap_mc_ensemble(ch, 0.8, 0.0, &cfg, &stats) == NLCAP_OK);
  CHECK(stats.n_samples == 5000);
  CHECK(stats.entropy_samples == 5000);
  CHECK(std::abs(stats.mean_x0) < 4.0 * stats.stderr_mean_x0);
  CHECK(std::abs(stats.mean_y0) < 4.0 * stats.stderr_mean_y0);
  CHECK(std::abs(stats.cov_xx - 0.5 * ql) < 4.0 * stats.stderr_cov_xx);
  CHECK(std::abs(stats.cov_yy - 0.5 * ql) < 4.0 * stats.stderr_cov_yy);
  CHECK(stats.perturbative_breach == 0);

  nlcap_ensemble_stats again{};
  REQUIRE(nlcap_mc_ensemble(ch, 0.8, 0.0, &cfg, &again) == NLCAP_OK);
  CHECK(stats.mean_x0 == again.mean_x0);
  CHECK(stats.cov_xy == again.cov_xy);
  CHECK(stats.cross_entropy == again.cross_entropy);

  cfg.n_samples = 2000;
  long step_counts[3] = {0, 0, 0};
  nlcap_convergence_row rows[6];
  long produced = 0;
  REQUIRE(nlcap_mc_convergence(ch, 0.8, 0.0, &cfg, step_counts, rows, 6, &produced) ==
          NLCAP_OK);
  CHECK(produced == 6);
  CHECK(step_counts[0] == 16);
  CHECK(step_counts[1] == 32);
  CHECK(step_counts[2] == 64);
  CHECK(std::string(rows[0].name) == "mean_x0");
  CHECK(std::string(rows[5].name) == "mean_energy");
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(rows[i].drift_sigma) < 5.0);
  }

  // Query mode: capacity 0 reports the row count without writing rows.
  REQUIRE(nlcap_mc_convergence(ch, 0.8, 0.0, &cfg, step_counts, nullptr, 0, &produced) ==
          NLCAP_OK);
  CHECK(produced == 6);
  CHECK(nlcap_mc_convergence(ch, 0.8, 0.0, &cfg, step_counts, nullptr, 4, &produced) ==
        NLCAP_INVALID_ARGUMENT);
}
