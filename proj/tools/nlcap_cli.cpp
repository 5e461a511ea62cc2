// Command-line front end for the nonlinear-channel analysis library.
// Subcommands: capacity-sweep, pdf-eval, opt-input, mc-validate,
// gnuplot-script. All heavy lifting goes through the shared C API.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlcap/nlcap.h"

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

int exit_code_for(nlcap_status status) {
  switch (status) {
    case NLCAP_OK:
      return kExitOk;
    case NLCAP_INVALID_ARGUMENT:
    case NLCAP_ZERO_INPUT_SIGNAL:
    case NLCAP_ZERO_OUTPUT_SIGNAL:
    case NLCAP_NEGATIVE_GAMMA_TILDE:
    case NLCAP_DOMAIN_TOO_SMALL:
      return kExitConfigError;
    default:
      return kExitNumericalError;
  }
}

int fail_status(nlcap_status status, const std::string& context) {
  const char* message = nlcap_last_error_message();
  std::cerr << "error: " << context << ": ";
  if (message[0] != '\0') {
    std::cerr << message;
  } else {
    std::cerr << nlcap_status_string(status);
  }
  std::cerr << "\n";
  return exit_code_for(status);
}

int fail_config(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitConfigError;
}

std::string fmt17(double value) {
  if (value == 0.0) value = 0.0;  // print negative zero as plain 0
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

struct ChannelOptions {
  double gamma = 1.3e-3;
  double Q = 1.5e-7;
  double L = 1000.0;
};

void add_channel_options(CLI::App* cmd, ChannelOptions* opts) {
  cmd->add_option("--gamma", opts->gamma, "Kerr coefficient, 1/(mW*km)")
      ->capture_default_str();
  cmd->add_option("--Q", opts->Q, "noise power density, mW/km")->capture_default_str();
  cmd->add_option("--L", opts->L, "fiber length, km")->capture_default_str();
}

std::string channel_line(const ChannelOptions& opts) {
  return "channel: gamma=" + fmt17(opts.gamma) + " 1/(mW*km), Q=" + fmt17(opts.Q) +
         " mW/km, L=" + fmt17(opts.L) + " km";
}

ordered_json channel_json(const ChannelOptions& opts) {
  return ordered_json{
      {"gamma_per_mW_km", opts.gamma}, {"Q_mW_per_km", opts.Q}, {"L_km", opts.L}};
}

struct Channel {
  nlcap_channel* handle = nullptr;
  ~Channel() { nlcap_channel_destroy(handle); }
};

struct Sweep {
  nlcap_sweep* handle = nullptr;
  ~Sweep() { nlcap_sweep_destroy(handle); }
};

struct Density {
  nlcap_density* handle = nullptr;
  ~Density() { nlcap_density_destroy(handle); }
};

std::string row_flags(const nlcap_capacity_row& row) {
  std::string flags;
  auto push = [&flags](const char* token) {
    if (!flags.empty()) flags += '|';
    flags += token;
  };
  if (row.series_branch) push("series");
  if (row.outside_region) push("outside-region");
  if (row.failed) push("failed");
  return flags;
}

bool open_output(std::ofstream& stream, const std::string& path) {
  stream.open(path, std::ios::binary);
  return stream.is_open();
}

// ------------------------------------------------------------ capacity-sweep

struct SweepOptions {
  ChannelOptions channel;
  double pmin = 0.0;
  double pmax = 0.0;
  long points = 0;
  bool log_spacing = false;
  bool strict_region = false;
  std::string out = "capacity_sweep.csv";
  bool json = false;
};

std::string extrema_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".extrema.txt";
  }
  return csv_path + ".extrema.txt";
}

int run_capacity_sweep(const SweepOptions& opts) {
  Channel ch;
  nlcap_status st =
      nlcap_channel_create(opts.channel.gamma, opts.channel.Q, opts.channel.L, &ch.handle);
  if (st != NLCAP_OK) return fail_status(st, "channel parameters");

  Sweep sweep;
  st = nlcap_sweep_run(ch.handle, opts.pmin, opts.pmax, opts.points,
                       opts.log_spacing ? 1 : 0, opts.strict_region ? 0 : 1, &sweep.handle);
  if (st != NLCAP_OK) return fail_status(st, "capacity sweep");

  const long size = nlcap_sweep_size(sweep.handle);
  std::vector<nlcap_capacity_row> rows(static_cast<size_t>(size));
  long failed_rows = 0;
  for (long i = 0; i < size; ++i) {
    st = nlcap_sweep_row(sweep.handle, i, &rows[static_cast<size_t>(i)]);
    if (st != NLCAP_OK) return fail_status(st, "sweep row");
    if (rows[static_cast<size_t>(i)].failed) ++failed_rows;
  }

  double region_min = 0.0;
  double region_max = 0.0;
  nlcap_sweep_region(sweep.handle, &region_min, &region_max);
  const long n_extrema = nlcap_sweep_extrema_count(sweep.handle);

  struct Extremum {
    int is_minimum = 0;
    double power_P = 0.0;
    double dc_prime = 0.0;
  };
  std::vector<Extremum> extrema(static_cast<size_t>(n_extrema));
  for (long i = 0; i < n_extrema; ++i) {
    Extremum& e = extrema[static_cast<size_t>(i)];
    st = nlcap_sweep_extremum(sweep.handle, i, &e.is_minimum, &e.power_P, &e.dc_prime);
    if (st != NLCAP_OK) return fail_status(st, "sweep extremum");
  }

  if (opts.json) {
    ordered_json doc;
    doc["command"] = "capacity-sweep";
    doc["channel"] = channel_json(opts.channel);
    doc["region_min_P_mW"] = region_min;
    doc["region_max_P_mW"] = region_max;
    doc["rows"] = ordered_json::array();
    for (const nlcap_capacity_row& row : rows) {
      doc["rows"].push_back(ordered_json{{"P_mW", row.power_P},
                                         {"snr", row.snr},
                                         {"gamma_tilde", row.gamma_tilde},
                                         {"C0_nat", row.c0},
                                         {"dC_nat", row.dc},
                                         {"dC_prime_nat", row.dc_prime},
                                         {"C_total_nat", row.c_total},
                                         {"lower_bound_nat", row.lower_bound},
                                         {"u", row.u},
                                         {"v", row.v},
                                         {"flags", row_flags(row)}});
    }
    doc["extrema"] = ordered_json::array();
    for (const Extremum& e : extrema) {
      doc["extrema"].push_back(ordered_json{{"kind", e.is_minimum ? "min" : "max"},
                                            {"P_mW", e.power_P},
                                            {"dC_prime_nat", e.dc_prime}});
    }
    doc["failed_rows"] = failed_rows;
    std::cout << doc.dump(2) << "\n";
    return failed_rows > 0 ? kExitNumericalError : kExitOk;
  }

  std::ofstream csv;
  if (!open_output(csv, opts.out)) return fail_config("cannot open " + opts.out);
  csv << "P_mW,snr,gamma_tilde,C0_nat,dC_nat,dC_prime_nat,C_total_nat,lower_bound_nat,"
         "u,v,flags\n";
  for (const nlcap_capacity_row& row : rows) {
    csv << fmt17(row.power_P) << ',' << fmt17(row.snr) << ',' << fmt17(row.gamma_tilde)
        << ',' << fmt17(row.c0) << ',' << fmt17(row.dc) << ',' << fmt17(row.dc_prime)
        << ',' << fmt17(row.c_total) << ',' << fmt17(row.lower_bound) << ','
        << fmt17(row.u) << ',' << fmt17(row.v) << ',' << row_flags(row) << '\n';
  }
  csv.close();

  const std::string extrema_path = extrema_path_for(opts.out);
  std::ofstream ext;
  if (!open_output(ext, extrema_path)) return fail_config("cannot open " + extrema_path);
  ext << "# dC_prime_nat extrema; " << channel_line(opts.channel) << "\n";
  ext << "# valid power region: [" << fmt17(region_min) << ", " << fmt17(region_max)
      << "] mW\n";
  if (extrema.empty()) {
    ext << "# no interior extrema found\n";
  }
  for (const Extremum& e : extrema) {
    ext << (e.is_minimum ? "min" : "max") << " P_mW=" << fmt17(e.power_P)
        << " dC_prime_nat=" << fmt17(e.dc_prime) << "\n";
  }
  ext.close();

  std::cout << "capacity-sweep: " << size << " rows -> " << opts.out << "\n";
  std::cout << channel_line(opts.channel) << "\n";
  std::cout << "valid power region: [" << fmt17(region_min) << ", " << fmt17(region_max)
            << "] mW\n";
  for (const Extremum& e : extrema) {
    std::cout << (e.is_minimum ? "min" : "max") << " dC' = " << fmt17(e.dc_prime)
              << " nat at P = " << fmt17(e.power_P) << " mW\n";
  }
  std::cout << "extrema summary -> " << extrema_path << "\n";
  if (failed_rows > 0) {
    std::cerr << "warning: " << failed_rows
              << " rows failed to converge; see the flags column\n";
    return kExitNumericalError;
  }
  return kExitOk;
}

// ----------------------------------------------------------------- pdf-eval

struct PdfEvalOptions {
  ChannelOptions channel;
  double rho = 0.0;
  std::vector<double> x0;
  std::vector<double> y0;
  long grid = 0;
  double span = 0.0;
  std::string out;
  bool json = false;
};

int run_pdf_eval(const PdfEvalOptions& opts) {
  Channel ch;
  nlcap_status st =
      nlcap_channel_create(opts.channel.gamma, opts.channel.Q, opts.channel.L, &ch.handle);
  if (st != NLCAP_OK) return fail_status(st, "channel parameters");

  std::vector<std::pair<double, double>> points;
  if (opts.grid > 0) {
    if (!(opts.span > 0.0)) {
      return fail_config("--grid requires --span > 0 (half-width in sqrt(mW))");
    }
    points.reserve(static_cast<size_t>(opts.grid * opts.grid));
    for (long j = 0; j < opts.grid; ++j) {
      for (long i = 0; i < opts.grid; ++i) {
        const double step = opts.grid > 1 ? 2.0 * opts.span / (opts.grid - 1) : 0.0;
        points.emplace_back(-opts.span + step * i, -opts.span + step * j);
      }
    }
  } else {
    if (opts.x0.empty() || opts.x0.size() != opts.y0.size()) {
      return fail_config("--x0 and --y0 need equal nonzero lengths (or use --grid)");
    }
    for (size_t i = 0; i < opts.x0.size(); ++i) {
      points.emplace_back(opts.x0[i], opts.y0[i]);
    }
  }

  struct Row {
    double x0 = 0.0;
    double y0 = 0.0;
    nlcap_cond_pdf_value value{};
    bool failed = false;
  };
  std::vector<Row> rows;
  rows.reserve(points.size());
  for (const auto& [x0, y0] : points) {
    Row row;
    row.x0 = x0;
    row.y0 = y0;
    st = nlcap_cond_pdf_eval(ch.handle, opts.rho, x0, y0, &row.value);
    if (st != NLCAP_OK) {
      if (exit_code_for(st) == kExitConfigError && rows.empty()) {
        // A bad amplitude poisons every row; report it as a config error.
        return fail_status(st, "conditional density");
      }
      row.failed = true;
      const double nan = std::nan("");
      row.value = nlcap_cond_pdf_value{nan, nan, nan, nan, nan, 0};
    }
    rows.push_back(row);
  }

  auto flag_of = [](const Row& row) -> std::string {
    if (row.failed) return "failed";
    if (row.value.outside_perturbative_regime) return "outside-perturbative";
    return "";
  };

  if (opts.json) {
    ordered_json doc;
    doc["command"] = "pdf-eval";
    doc["channel"] = channel_json(opts.channel);
    doc["input_amplitude_sqrt_mW"] = opts.rho;
    doc["rows"] = ordered_json::array();
    for (const Row& row : rows) {
      doc["rows"].push_back(ordered_json{{"x0", row.x0},
                                         {"y0", row.y0},
                                         {"mu", row.value.mu},
                                         {"p0", row.value.p0},
                                         {"dp1", row.value.dp1},
                                         {"dp2", row.value.dp2},
                                         {"total", row.value.total},
                                         {"flag", flag_of(row)}});
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!opts.out.empty()) {
    if (!open_output(file, opts.out)) return fail_config("cannot open " + opts.out);
    out = &file;
  }
  *out << "x0,y0,mu,p0,dp1,dp2,total,flag\n";
  for (const Row& row : rows) {
    *out << fmt17(row.x0) << ',' << fmt17(row.y0) << ',' << fmt17(row.value.mu) << ','
         << fmt17(row.value.p0) << ',' << fmt17(row.value.dp1) << ','
         << fmt17(row.value.dp2) << ',' << fmt17(row.value.total) << ',' << flag_of(row)
         << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- opt-input

struct OptInputOptions {
  ChannelOptions channel;
  double P = 1.0;
  long rpoints = 200;
  double rmax = 0.0;
  std::string out = "opt_input.csv";
  bool json = false;
};

int run_opt_input(const OptInputOptions& opts) {
  Channel ch;
  nlcap_status st =
      nlcap_channel_create(opts.channel.gamma, opts.channel.Q, opts.channel.L, &ch.handle);
  if (st != NLCAP_OK) return fail_status(st, "channel parameters");

  double snr = 0.0;
  double gamma_tilde = 0.0;
  st = nlcap_power_point(ch.handle, opts.P, &snr, &gamma_tilde);
  if (st != NLCAP_OK) return fail_status(st, "power point");

  nlcap_input_solution sol{};
  st = nlcap_optimal_input_solve(ch.handle, opts.P, &sol);
  if (st != NLCAP_OK) return fail_status(st, "optimal input solve");

  const bool has_asymptotic = gamma_tilde >= 10.0;
  double asym_u = 0.0;
  double asym_v = 0.0;
  double rel_err_u = 0.0;
  double rel_err_v = 0.0;
  if (has_asymptotic) {
    st = nlcap_optimal_input_asymptotic(gamma_tilde, &asym_u, &asym_v);
    if (st != NLCAP_OK) return fail_status(st, "asymptotic comparison");
    rel_err_u = std::abs(asym_u - sol.u) / sol.u;
    rel_err_v = std::abs(asym_v - sol.v) / sol.v;
  }

  if (opts.rpoints < 2) return fail_config("--rpoints must be at least 2");
  const double rmax = opts.rmax > 0.0 ? opts.rmax : 5.0 * std::sqrt(opts.P);
  struct DensityRow {
    double rho = 0.0;
    double p0 = 0.0;
    double p1 = 0.0;
  };
  std::vector<DensityRow> grid(static_cast<size_t>(opts.rpoints));
  for (long i = 0; i < opts.rpoints; ++i) {
    DensityRow& row = grid[static_cast<size_t>(i)];
    row.rho = rmax * static_cast<double>(i) / static_cast<double>(opts.rpoints - 1);
    st = nlcap_optimal_input_density(ch.handle, opts.P, row.rho, &row.p0, &row.p1);
    if (st != NLCAP_OK) return fail_status(st, "optimal input density");
  }

  if (opts.json) {
    ordered_json doc;
    doc["command"] = "opt-input";
    doc["channel"] = channel_json(opts.channel);
    doc["power_P_mW"] = opts.P;
    doc["snr"] = snr;
    doc["gamma_tilde"] = gamma_tilde;
    doc["u"] = sol.u;
    doc["v"] = sol.v;
    doc["delta_lambda1"] = sol.delta_lambda1;
    doc["delta_lambda2_per_mW"] = sol.delta_lambda2;
    doc["residual0"] = sol.residual0;
    doc["residual1"] = sol.residual1;
    doc["moment0_residual"] = sol.moment0_residual;
    doc["moment2_residual"] = sol.moment2_residual;
    doc["series_branch"] = sol.series_branch != 0;
    if (has_asymptotic) {
      const double log2_gt = std::log(gamma_tilde) * std::log(gamma_tilde);
      doc["asymptotic"] = ordered_json{{"u", asym_u},
                                       {"v", asym_v},
                                       {"rel_err_u", rel_err_u},
                                       {"rel_err_v", rel_err_v},
                                       {"rel_err_u_times_log2", rel_err_u * log2_gt},
                                       {"rel_err_v_times_log2", rel_err_v * log2_gt}};
    } else {
      doc["asymptotic"] = nullptr;
    }
    doc["density"] = ordered_json::array();
    for (const DensityRow& row : grid) {
      doc["density"].push_back(ordered_json{{"rho_sqrt_mW", row.rho},
                                            {"p0_density_per_mW", row.p0},
                                            {"p1_density_per_mW", row.p1}});
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }

  std::cout << "opt-input report\n";
  std::cout << channel_line(opts.channel) << "\n";
  std::cout << "power: P=" << fmt17(opts.P) << " mW (snr=" << fmt17(snr)
            << ", gamma_tilde=" << fmt17(gamma_tilde) << ")\n";
  std::cout << "u = " << fmt17(sol.u) << "\n";
  std::cout << "v = " << fmt17(sol.v) << "\n";
  std::cout << "delta_lambda1 = " << fmt17(sol.delta_lambda1) << "\n";
  std::cout << "delta_lambda2 = " << fmt17(sol.delta_lambda2) << " 1/mW\n";
  std::cout << "constraint residuals: r0=" << fmt17(sol.residual0)
            << " r1=" << fmt17(sol.residual1) << "\n";
  std::cout << "moment residuals: m0=" << fmt17(sol.moment0_residual)
            << " m2=" << fmt17(sol.moment2_residual) << "\n";
  std::cout << "series branch: " << (sol.series_branch ? "yes" : "no") << "\n";
  if (has_asymptotic) {
    const double log2_gt = std::log(gamma_tilde) * std::log(gamma_tilde);
    std::cout << "asymptotic (u,v)=(" << fmt17(asym_u) << ", " << fmt17(asym_v)
              << "); rel err u=" << fmt17(rel_err_u) << " v=" << fmt17(rel_err_v)
              << "; err*log^2(gamma_tilde): u=" << fmt17(rel_err_u * log2_gt)
              << " v=" << fmt17(rel_err_v * log2_gt) << "\n";
  }

  std::ofstream csv;
  if (!open_output(csv, opts.out)) return fail_config("cannot open " + opts.out);
  csv << "rho,p0_density,p1_density\n";
  for (const DensityRow& row : grid) {
    csv << fmt17(row.rho) << ',' << fmt17(row.p0) << ',' << fmt17(row.p1) << '\n';
  }
  csv.close();
  std::cout << "density grid (" << opts.rpoints << " rows, rho in [0, " << fmt17(rmax)
            << "] sqrt(mW)) -> " << opts.out << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- mc-validate

struct McValidateOptions {
  ChannelOptions channel;
  double rho = 1.0;
  long samples = 100000;
  long steps = 0;
  unsigned long long seed = 1;
  std::string scheme = "splitting";
  bool json = false;
};

int run_mc_validate(const McValidateOptions& opts) {
  Channel ch;
  nlcap_status st =
      nlcap_channel_create(opts.channel.gamma, opts.channel.Q, opts.channel.L, &ch.handle);
  if (st != NLCAP_OK) return fail_status(st, "channel parameters");

  if (!(opts.rho > 0.0)) return fail_config("--rho must be positive, in sqrt(mW)");
  const double power = opts.rho * opts.rho;
  double snr = 0.0;
  double gamma_tilde = 0.0;
  st = nlcap_power_point(ch.handle, power, &snr, &gamma_tilde);
  if (st != NLCAP_OK) return fail_status(st, "power point");

  nlcap_sim_config cfg{};
  cfg.n_samples = opts.samples;
  cfg.seed = opts.seed;
  cfg.scheme = opts.scheme == "euler" ? NLCAP_SCHEME_EULER : NLCAP_SCHEME_SPLITTING;
  cfg.n_steps = opts.steps;
  if (cfg.n_steps == 0) {
    st = nlcap_mc_default_steps(gamma_tilde, &cfg.n_steps);
    if (st != NLCAP_OK) return fail_status(st, "default step count");
  }

  nlcap_ensemble_stats stats{};
  st = nlcap_mc_ensemble(ch.handle, opts.rho, 0.0, &cfg, &stats);
  if (st != NLCAP_OK) return fail_status(st, "ensemble simulation");

  long step_counts[3] = {0, 0, 0};
  nlcap_convergence_row moments[6];
  long n_moments = 0;
  st = nlcap_mc_convergence(ch.handle, opts.rho, 0.0, &cfg, step_counts, moments, 6,
                            &n_moments);
  if (st != NLCAP_OK) return fail_status(st, "convergence audit");

  const double mu = opts.channel.gamma * opts.channel.L * power;
  const double ql = opts.channel.Q * opts.channel.L;
  double ref_xx = 0.0;
  double ref_xy = 0.0;
  double ref_yy = 0.0;
  st = nlcap_cond_pdf_moments(ch.handle, mu, &ref_xx, &ref_xy, &ref_yy);
  if (st != NLCAP_OK) return fail_status(st, "analytic covariance");
  double ref_entropy = 0.0;
  st = nlcap_cond_entropy_pointwise(ch.handle, opts.rho, &ref_entropy);
  if (st != NLCAP_OK) return fail_status(st, "analytic conditional entropy");
  const double ref_energy = power + ql;

  struct GatedRow {
    const char* name;
    double mc;
    double stderr_mc;
    double reference;
    double z;
  };
  auto zscore = [](double mc, double ref, double se) {
    return se > 0.0 ? (mc - ref) / se : std::numeric_limits<double>::infinity();
  };
  const GatedRow gated[] = {
      {"cov_xx", stats.cov_xx, stats.stderr_cov_xx, ref_xx,
       zscore(stats.cov_xx, ref_xx, stats.stderr_cov_xx)},
      {"cov_xy", stats.cov_xy, stats.stderr_cov_xy, ref_xy,
       zscore(stats.cov_xy, ref_xy, stats.stderr_cov_xy)},
      {"cov_yy", stats.cov_yy, stats.stderr_cov_yy, ref_yy,
       zscore(stats.cov_yy, ref_yy, stats.stderr_cov_yy)},
      {"mean_energy", stats.mean_energy, stats.stderr_energy, ref_energy,
       zscore(stats.mean_energy, ref_energy, stats.stderr_energy)},
      {"cross_entropy", stats.cross_entropy, stats.stderr_cross_entropy, ref_entropy,
       zscore(stats.cross_entropy, ref_entropy, stats.stderr_cross_entropy)},
  };
  bool passed = true;
  for (const GatedRow& row : gated) {
    if (!(std::abs(row.z) <= 4.0)) passed = false;
  }

  if (opts.json) {
    ordered_json doc;
    doc["command"] = "mc-validate";
    doc["channel"] = channel_json(opts.channel);
    doc["input_amplitude_sqrt_mW"] = opts.rho;
    doc["mu"] = mu;
    doc["snr"] = snr;
    doc["gamma_tilde"] = gamma_tilde;
    doc["config"] = ordered_json{{"n_steps", cfg.n_steps},
                                 {"n_samples", cfg.n_samples},
                                 {"seed", cfg.seed},
                                 {"scheme", opts.scheme}};
    doc["means_ungated"] = ordered_json{{"mean_x0", stats.mean_x0},
                                        {"stderr_mean_x0", stats.stderr_mean_x0},
                                        {"mean_y0", stats.mean_y0},
                                        {"stderr_mean_y0", stats.stderr_mean_y0}};
    doc["breach_fraction"] = stats.breach_fraction;
    doc["perturbative_breach"] = stats.perturbative_breach != 0;
    doc["entropy_samples"] = stats.entropy_samples;
    doc["table"] = ordered_json::array();
    for (const GatedRow& row : gated) {
      doc["table"].push_back(ordered_json{{"name", row.name},
                                          {"mc", row.mc},
                                          {"stderr", row.stderr_mc},
                                          {"reference", row.reference},
                                          {"z", row.z}});
    }
    doc["convergence"] = ordered_json{
        {"step_counts", {step_counts[0], step_counts[1], step_counts[2]}},
        {"moments", ordered_json::array()}};
    for (long i = 0; i < n_moments; ++i) {
      doc["convergence"]["moments"].push_back(
          ordered_json{{"name", moments[i].name},
                       {"value", {moments[i].value[0], moments[i].value[1],
                                  moments[i].value[2]}},
                       {"error", {moments[i].error[0], moments[i].error[1],
                                  moments[i].error[2]}},
                       {"drift", moments[i].drift},
                       {"drift_sigma", moments[i].drift_sigma},
                       {"slope", moments[i].slope}});
    }
    doc["passed"] = passed;
    std::cout << doc.dump(2) << "\n";
    return passed ? kExitOk : kExitValidationFailure;
  }

  std::cout << "mc-validate report\n";
  std::cout << channel_line(opts.channel) << "\n";
  std::cout << "input: rho=" << fmt17(opts.rho) << " sqrt(mW) (mu=" << fmt17(mu)
            << ", snr=" << fmt17(snr) << ", gamma_tilde=" << fmt17(gamma_tilde) << ")\n";
  std::cout << "config: steps=" << cfg.n_steps << " samples=" << cfg.n_samples
            << " seed=" << cfg.seed << " scheme=" << opts.scheme << "\n";
  std::cout << "fraction outside perturbative regime: " << fmt17(stats.breach_fraction);
  if (stats.perturbative_breach) std::cout << " (exceeds the 1% advisory threshold)";
  std::cout << "\n";
  std::cout << "means (ungated; include the O(QL) deterministic shift):\n";
  std::cout << "  mean_x0 = " << fmt17(stats.mean_x0) << " +/- "
            << fmt17(stats.stderr_mean_x0) << " sqrt(mW)\n";
  std::cout << "  mean_y0 = " << fmt17(stats.mean_y0) << " +/- "
            << fmt17(stats.stderr_mean_y0) << " sqrt(mW)\n";
  std::cout << "gated comparisons (threshold |z| <= 4):\n";
  std::cout << "  name           mc                      reference               stderr"
               "                  z\n";
  for (const GatedRow& row : gated) {
    std::printf("  %-14s %-23.15g %-23.15g %-23.15g %.3f\n", row.name, row.mc,
                row.reference, row.stderr_mc, row.z);
  }
  std::cout << "convergence audit (steps " << step_counts[0] << "/" << step_counts[1]
            << "/" << step_counts[2] << "):\n";
  std::cout << "  name           drift                   drift_sigma   slope\n";
  for (long i = 0; i < n_moments; ++i) {
    std::printf("  %-14s %-23.15g %-13.3f ", moments[i].name, moments[i].drift,
                moments[i].drift_sigma);
    if (std::isnan(moments[i].slope)) {
      std::printf("n/a (drift below resolution)\n");
    } else {
      std::printf("%.3f\n", moments[i].slope);
    }
  }
  std::cout << "result: " << (passed ? "PASS" : "FAIL") << "\n";
  return passed ? kExitOk : kExitValidationFailure;
}

// ------------------------------------------------------------ gnuplot-script

struct GnuplotOptions {
  std::string csv = "capacity_sweep.csv";
  std::string out;
  bool json = false;
};

std::string gnuplot_script(const std::string& csv) {
  std::ostringstream script;
  script << "# Capacity-correction figures from a capacity-sweep CSV.\n"
         << "# Column 1 is P_mW, column 6 is dC_prime_nat.\n"
         << "set datafile separator \",\"\n"
         << "set terminal pngcairo size 900,600 enhanced\n"
         << "set grid\n"
         << "set logscale x\n"
         << "set xlabel \"P, mW\"\n"
         << "set ylabel \"dC', nat\"\n"
         << "set format y \"%.1e\"\n"
         << "\n"
         << "set output \"capacity_correction_min.png\"\n"
         << "set title \"Capacity correction near its minimum\"\n"
         << "set xrange [0.01:5]\n"
         << "plot \"" << csv
         << "\" using 1:6 skip 1 with lines lw 2 title \"dC'\", 0 with lines dt 2 lc "
            "\"gray\" notitle\n"
         << "\n"
         << "set output \"capacity_correction_max.png\"\n"
         << "set title \"Capacity correction through the high-power plateau\"\n"
         << "set xrange [1:1000]\n"
         << "plot \"" << csv
         << "\" using 1:6 skip 1 with lines lw 2 title \"dC'\", 0 with lines dt 2 lc "
            "\"gray\" notitle\n";
  return script.str();
}

int run_gnuplot_script(const GnuplotOptions& opts) {
  const std::string script = gnuplot_script(opts.csv);
  if (opts.json) {
    ordered_json doc;
    doc["command"] = "gnuplot-script";
    doc["csv"] = opts.csv;
    doc["script"] = script;
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }
  if (opts.out.empty()) {
    std::cout << script;
    return kExitOk;
  }
  std::ofstream file;
  if (!open_output(file, opts.out)) return fail_config("cannot open " + opts.out);
  file << script;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Analysis tools for the zero-dispersion nonlinear fiber channel.\n"
      "Units: power in mW, gamma in 1/(mW*km), Q in mW/km, L in km,\n"
      "amplitudes in sqrt(mW), entropies and capacities in nat."};
  app.require_subcommand(1);
  app.footer("The environment variable NLCAP_THREADS (positive integer) caps\n"
             "internal parallelism; outputs are byte-identical for any setting.");

  SweepOptions sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand(
      "capacity-sweep", "Evaluate the capacity correction over a power grid (CSV)");
  add_channel_options(sweep_cmd, &sweep_opts.channel);
  sweep_cmd->add_option("--pmin", sweep_opts.pmin, "lowest power, mW")->required();
  sweep_cmd->add_option("--pmax", sweep_opts.pmax, "highest power, mW")->required();
  sweep_cmd->add_option("--points", sweep_opts.points, "number of grid points")
      ->required();
  sweep_cmd->add_flag("--log", sweep_opts.log_spacing, "log-spaced power grid");
  sweep_cmd->add_flag("--strict-region", sweep_opts.strict_region,
                      "reject powers outside the validity region instead of tagging");
  sweep_cmd->add_option("--out", sweep_opts.out, "output CSV path")
      ->capture_default_str();
  sweep_cmd->add_flag("--json", sweep_opts.json,
                      "emit a single JSON document on stdout instead of files");

  PdfEvalOptions pdf_opts;
  CLI::App* pdf_cmd = app.add_subcommand(
      "pdf-eval", "Evaluate the conditional output density at fluctuation points (CSV)");
  add_channel_options(pdf_cmd, &pdf_opts.channel);
  pdf_cmd->add_option("--rho", pdf_opts.rho, "input amplitude, sqrt(mW)")->required();
  pdf_cmd->add_option("--x0", pdf_opts.x0, "in-phase offsets, sqrt(mW)")
      ->delimiter(',');
  pdf_cmd->add_option("--y0", pdf_opts.y0, "quadrature offsets, sqrt(mW)")
      ->delimiter(',');
  pdf_cmd->add_option("--grid", pdf_opts.grid,
                      "evaluate an N x N grid instead of explicit lists");
  pdf_cmd->add_option("--span", pdf_opts.span, "grid half-width, sqrt(mW)");
  pdf_cmd->add_option("--out", pdf_opts.out, "output CSV path (default: stdout)");
  pdf_cmd->add_flag("--json", pdf_opts.json,
                    "emit a single JSON document on stdout instead of CSV");

  OptInputOptions opt_opts;
  CLI::App* opt_cmd = app.add_subcommand(
      "opt-input", "Solve the capacity-achieving input density (report + CSV)");
  add_channel_options(opt_cmd, &opt_opts.channel);
  opt_cmd->add_option("--P", opt_opts.P, "average power, mW")->capture_default_str();
  opt_cmd->add_option("--rpoints", opt_opts.rpoints, "radial grid size")
      ->capture_default_str();
  opt_cmd->add_option("--rmax", opt_opts.rmax,
                      "radial grid extent, sqrt(mW) (default 5*sqrt(P))");
  opt_cmd->add_option("--out", opt_opts.out, "output CSV path")->capture_default_str();
  opt_cmd->add_flag("--json", opt_opts.json,
                    "emit a single JSON document on stdout instead of report + CSV");

  McValidateOptions mc_opts;
  CLI::App* mc_cmd = app.add_subcommand(
      "mc-validate", "Monte-Carlo channel simulation against the analytic densities");
  add_channel_options(mc_cmd, &mc_opts.channel);
  mc_cmd->add_option("--rho", mc_opts.rho, "input amplitude, sqrt(mW)")
      ->capture_default_str();
  mc_cmd->add_option("--samples", mc_opts.samples, "sample count")
      ->capture_default_str();
  mc_cmd->add_option("--steps", mc_opts.steps,
                     "integration steps (default: picked from gamma_tilde)");
  mc_cmd->add_option("--seed", mc_opts.seed, "generator seed")->capture_default_str();
  mc_cmd->add_option("--scheme", mc_opts.scheme, "integration scheme")
      ->check(CLI::IsMember({"splitting", "euler"}))
      ->capture_default_str();
  mc_cmd->add_flag("--json", mc_opts.json,
                   "emit a single JSON document on stdout instead of the report");

  GnuplotOptions gp_opts;
  CLI::App* gp_cmd = app.add_subcommand(
      "gnuplot-script", "Emit a gnuplot script for the capacity-correction figures");
  gp_cmd->add_option("--csv", gp_opts.csv, "capacity-sweep CSV path")
      ->capture_default_str();
  gp_cmd->add_option("--out", gp_opts.out, "script path (default: stdout)");
  gp_cmd->add_flag("--json", gp_opts.json,
                   "emit a single JSON document on stdout instead of the script");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (sweep_cmd->parsed()) return run_capacity_sweep(sweep_opts);
  if (pdf_cmd->parsed()) return run_pdf_eval(pdf_opts);
  if (opt_cmd->parsed()) return run_opt_input(opt_opts);
  if (mc_cmd->parsed()) return run_mc_validate(mc_opts);
  if (gp_cmd->parsed()) return run_gnuplot_script(gp_opts);
  return kExitConfigError;
}
