#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lclock/config_file.hpp"
#include "lclock/constants.hpp"
#include "lclock/csv.hpp"
#include "lclock/detection.hpp"
#include "lclock/errors.hpp"
#include "lclock/experiments.hpp"
#include "lclock/integrator.hpp"
#include "lclock/manifest.hpp"
#include "lclock/oscillator.hpp"
#include "lclock/params.hpp"
#include "quadrature_oracle.hpp"

namespace {

using namespace lclock;

struct Flags {
  std::string config_path;
  std::string out_dir = ".";
  double tol_rel = 0.0;  // 0: library default
  int n_max = 20;
  std::string omega_text;
  double window_T = 1.0;
  int jobs = 1;
  std::string format = "csv";
  // Sweep grid controls; empty bounds fall back per scheme.
  std::string grid_lo_text;
  std::string grid_hi_text;
  int per_decade = 40;
  // Matrix dump controls.
  std::string kind = "sin";
};

void add_common_options(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config_path,
                  "Config file (flat key = value; defaults apply otherwise)");
  sub->add_option("--out", flags.out_dir, "Output directory")
      ->capture_default_str();
  sub->add_option("--tol-rel", flags.tol_rel,
                  "Integrator relative tolerance (0 keeps the default)");
  sub->add_option("--nmax", flags.n_max, "Highest oscillator level")
      ->capture_default_str();
  sub->add_option("--jobs", flags.jobs, "Sweep worker threads")
      ->capture_default_str();
  sub->add_option("--format", flags.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

PhysicalConfig resolve_config(const Flags& flags,
                              const PhysicalConfig& fallback) {
  if (flags.config_path.empty()) return fallback;
  return load_config(flags.config_path);
}

ExperimentOptions resolve_options(const Flags& flags) {
  ExperimentOptions opts;
  if (flags.tol_rel > 0.0) opts.tol.rel = flags.tol_rel;
  opts.n_max = flags.n_max;
  opts.jobs = flags.jobs;
  return opts;
}

// "<value><unit>" with unit rec (recoil shifts), osc (trap frequencies), or
// Hz (cycles per second, converted to rad/s).
double parse_omega(const std::string& text, const DerivedParams& params) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) {
    throw ConfigError("--omega: cannot parse '" + text + "'");
  }
  const std::string unit(end);
  if (unit == "rec") return value * params.omega_rec;
  if (unit == "osc") return value * params.omega_osc;
  if (unit == "Hz" || unit == "hz") return value * kTwoPi;
  throw ConfigError("--omega: unit must be rec, osc, or Hz, got '" + text +
                    "'");
}

std::string output_path(const Flags& flags, const std::string& stem) {
  std::filesystem::create_directories(flags.out_dir);
  const std::string ext = flags.format == "json" ? ".json" : ".csv";
  return (std::filesystem::path(flags.out_dir) / (stem + ext)).string();
}

void write_table(const CsvTable& table, const std::string& path,
                 const std::string& format) {
  if (format == "csv") {
    table.write(path);
    return;
  }
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows()) {
    nlohmann::ordered_json entry;
    for (std::size_t i = 0; i < row.size(); ++i) {
      entry[table.header()[i]] = row[i];
    }
    rows.push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << rows.dump(2) << "\n";
  if (!out) throw ConfigError(path + ": write failed");
}

// Data file plus its manifest, timed from `started`.
void emit(const CsvTable& table, const std::string& stem, const Flags& flags,
          RunManifest manifest,
          const std::chrono::steady_clock::time_point& started) {
  const std::string path = output_path(flags, stem);
  write_table(table, path, flags.format);
  manifest.format = flags.format;
  manifest.outputs = {path};
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_manifest(manifest, manifest_path_for(path));
  std::cout << path << "\n";
}

void print_derived(const DerivedParams& p, const std::string& format) {
  const std::vector<std::pair<std::string, double>> entries = {
      {"atom_count", p.atom_count},
      {"atomic_mass_kg", p.atomic_mass},
      {"lattice_carrier_rad_per_s", p.omega_laser},
      {"lattice_wavenumber_rad_per_m", p.k_full},
      {"clock_wavenumber_rad_per_m", p.k_c},
      {"axial_lattice_wavenumber_rad_per_m", p.k_L},
      {"single_photon_shift_rad_per_s", p.g0},
      {"cavity_linewidth_rad_per_s", p.kappa},
      {"recoil_shift_rad_per_s", p.omega_rec},
      {"axial_recoil_shift_rad_per_s", p.omega_rec_axial},
      {"trap_angular_frequency_rad_per_s", p.omega_osc},
      {"oscillator_length_m", p.a_osc},
      {"lamb_dicke_lattice", p.eta_L},
      {"lamb_dicke_clock", p.eta_c},
      {"pump_photon_number", p.beta_plus_sq},
      {"initial_lattice_overlap_sum", p.C0},
      {"cavity_detuning_rad_per_s", p.Delta},
      {"pump_rate_rad_per_s", p.pump_eta},
      {"pump_amplitude_re", p.beta_plus.real()},
      {"pump_amplitude_im", p.beta_plus.imag()},
      {"clock_detuning_rad_per_s", p.clock_detuning},
  };
  if (format == "json") {
    nlohmann::ordered_json doc;
    for (const auto& [key, value] : entries) doc[key] = value;
    doc["lamb_dicke_warning"] = p.lamb_dicke_warning;
    std::cout << doc.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : entries) {
    std::cout << key << " = " << format_full(value) << "\n";
  }
  if (p.lamb_dicke_warning) {
    std::cout << "# warning: clock Lamb-Dicke parameter exceeds 0.5\n";
  }
}

int run_derive(const Flags& flags) {
  auto config = resolve_config(flags, PhysicalConfig{});
  print_derived(derive(config), flags.format);
  return 0;
}

int run_pulse(const Flags& flags) {
  const auto started = std::chrono::steady_clock::now();
  auto config = resolve_config(flags, PhysicalConfig{});
  auto params = derive(config);
  if (flags.omega_text.empty()) {
    throw ConfigError("pulse needs --omega <value><rec|osc|Hz>");
  }
  const double omega = parse_omega(flags.omega_text, params);
  auto opts = resolve_options(flags);
  auto traj = run_pi_half_pulse(config, omega, opts);
  if (!traj.ok()) {
    throw NumericalError("pulse integration aborted: " + traj.diagnostic);
  }
  auto manifest = make_manifest("pulse", config, opts);
  manifest.omega = omega;
  emit(trajectory_table(traj), "pulse", flags, std::move(manifest), started);
  return 0;
}

int run_fig5(const Flags& flags) {
  const auto started = std::chrono::steady_clock::now();
  auto config = resolve_config(flags, fig5_config());
  auto params = derive(config);
  const double lo = flags.grid_lo_text.empty()
                        ? 1e-2 * params.omega_rec
                        : parse_omega(flags.grid_lo_text, params);
  const double hi = flags.grid_hi_text.empty()
                        ? 10.0 * params.omega_rec
                        : parse_omega(flags.grid_hi_text, params);
  auto grid = log_grid(lo, hi, flags.per_decade);
  auto opts = resolve_options(flags);
  auto sweep = sweep_snr1(config, grid, opts);
  auto manifest = make_manifest("fig5", config, opts);
  manifest.grid = grid;
  emit(sweep_table(sweep), "fig5", flags, std::move(manifest), started);
  return 0;
}

int run_fig6(const Flags& flags) {
  const auto started = std::chrono::steady_clock::now();
  auto config = resolve_config(flags, fig7_config());
  auto params = derive(config);
  const double omega = flags.omega_text.empty()
                           ? 0.0
                           : parse_omega(flags.omega_text, params);
  auto opts = resolve_options(flags);
  auto trace = phase_space_trace(config, omega, opts);
  auto manifest = make_manifest("fig6", config, opts);
  manifest.omega = trace.omega;
  emit(phase_space_table(trace, params), "fig6", flags, std::move(manifest),
       started);
  return 0;
}

int run_fig7(const Flags& flags) {
  const auto started = std::chrono::steady_clock::now();
  auto config = resolve_config(flags, fig7_config());
  auto params = derive(config);
  const double lo = flags.grid_lo_text.empty()
                        ? 1e-2 * params.omega_rec
                        : parse_omega(flags.grid_lo_text, params);
  const double hi = flags.grid_hi_text.empty()
                        ? 1e2 * params.omega_rec
                        : parse_omega(flags.grid_hi_text, params);
  auto grid = log_grid(lo, hi, flags.per_decade);
  auto opts = resolve_options(flags);
  auto sweep = sweep_snr2(config, grid, flags.window_T, opts);
  auto manifest = make_manifest("fig7", config, opts);
  manifest.grid = grid;
  manifest.window = flags.window_T;
  emit(sweep_table(sweep), "fig7", flags, std::move(manifest), started);
  return 0;
}

int run_sweep(const Flags& flags, DetectionScheme scheme) {
  const auto started = std::chrono::steady_clock::now();
  const bool sideband = scheme == DetectionScheme::kSideband;
  auto config =
      resolve_config(flags, sideband ? fig7_config() : fig5_config());
  auto params = derive(config);
  const double lo = flags.grid_lo_text.empty()
                        ? 1e-2 * params.omega_rec
                        : parse_omega(flags.grid_lo_text, params);
  const double hi =
      flags.grid_hi_text.empty()
          ? (sideband ? 1e2 : 10.0) * params.omega_rec
          : parse_omega(flags.grid_hi_text, params);
  auto grid = log_grid(lo, hi, flags.per_decade);
  auto opts = resolve_options(flags);
  const char* stem = sideband ? "sweep_snr2" : "sweep_snr1";
  auto sweep = sideband ? sweep_snr2(config, grid, flags.window_T, opts)
                        : sweep_snr1(config, grid, opts);
  auto manifest = make_manifest(stem, config, opts);
  manifest.grid = grid;
  if (sideband) manifest.window = flags.window_T;
  emit(sweep_table(sweep), stem, flags, std::move(manifest), started);
  return 0;
}

int run_matrix(const Flags& flags) {
  const auto started = std::chrono::steady_clock::now();
  auto config = resolve_config(flags, PhysicalConfig{});
  auto params = derive(config);
  auto ops = build_operator_set(params, flags.n_max);

  Eigen::MatrixXd values;
  if (flags.kind == "sin") {
    values = ops.sin_2kL;
  } else if (flags.kind == "cos") {
    values = ops.cos_2kL;
  } else if (flags.kind == "sin_sq") {
    values = ops.sin_sq;
  } else if (flags.kind == "cos_sq") {
    values = ops.cos_sq;
  } else if (flags.kind == "position") {
    values = ops.z;
  } else if (flags.kind == "momentum_im") {
    values = ops.p.imag();
  } else if (flags.kind == "drive_re") {
    values = ops.drive.real();
  } else if (flags.kind == "drive_im") {
    values = ops.drive.imag();
  } else {
    throw ConfigError("--kind must be one of sin, cos, sin_sq, cos_sq, "
                      "position, momentum_im, drive_re, drive_im");
  }

  std::vector<std::string> header;
  for (int c = 0; c < values.cols(); ++c) {
    header.push_back("n" + std::to_string(c));
  }
  CsvTable table(std::move(header));
  for (int r = 0; r < values.rows(); ++r) {
    std::vector<double> row(values.cols());
    for (int c = 0; c < values.cols(); ++c) row[c] = values(r, c);
    table.add_row(row);
  }
  auto manifest = make_manifest("matrix", config, resolve_options(flags));
  emit(table, "matrix_" + flags.kind, flags, std::move(manifest), started);
  return 0;
}

// Self-contained cross-checks against independent references: the audit a
// fresh install runs to trust the build.
class CheckSuite {
 public:
  bool close(const std::string& name, double got, double want, double rel) {
    const double err = std::abs(got - want) /
                       std::max({std::abs(want), std::abs(got), 1e-300});
    report(name, err <= rel, got, want);
    return err <= rel;
  }

  bool truth(const std::string& name, bool pass) {
    report(name, pass, pass ? 1.0 : 0.0, 1.0);
    return pass;
  }

  int exit_code() const { return all_ok_ ? 0 : 4; }

 private:
  void report(const std::string& name, bool pass, double got, double want) {
    if (!pass) all_ok_ = false;
    std::cout << (pass ? "[ok]   " : "[FAIL] ") << name;
    if (!pass) {
      std::cout << "  (got " << format_full(got) << ", want "
                << format_full(want) << ")";
    }
    std::cout << "\n";
  }

  bool all_ok_ = true;
};

int run_check(const Flags& flags) {
  CheckSuite suite;

  // Derivation chain against frozen references for both shipped scenes.
  auto p7 = derive(fig7_config());
  suite.close("scene7 cavity linewidth", p7.kappa, 1.883651567309e7, 1e-9);
  suite.close("scene7 recoil shift", p7.omega_rec, 2.182285527602e4, 1e-9);
  suite.close("scene7 trap frequency", p7.omega_osc, 4.364571055204e5, 1e-9);
  suite.close("scene7 oscillator length", p7.a_osc, 4.091764944095e-8, 1e-9);
  suite.close("scene7 single-photon shift", p7.g0, -4.400397702501e-2, 1e-9);
  suite.close("scene7 lattice overlap sum", p7.C0, 9.833449100188e5, 1e-9);
  suite.close("scene7 dressed detuning", p7.Delta, -8.654217365625e4, 1e-9);
  suite.close("scene7 pump photon number", p7.beta_plus_sq,
              7.319425743105e7, 1e-9);
  auto p5 = derive(fig5_config());
  suite.close("scene5 cavity linewidth", p5.kappa, 1.883651567309e5, 1e-9);
  suite.close("scene5 pump rate", p5.pump_eta, 7.737735984014e8, 1e-9);
  suite.close("scene5 pump amplitude re", p5.beta_plus.real(),
              5788.6314937291645, 1e-9);
  suite.close("scene5 pump amplitude im", p5.beta_plus.imag(),
              -6299.682758747397, 1e-9);

  // Oscillator matrices against brute-force quadrature.
  const int n_check = 6;
  auto trig = trig_matrices(2.0 * p7.k_L * p7.a_osc, n_check);
  auto drive = displacement_matrix(p7.k_c * p7.a_osc, n_check);
  double worst = 0.0;
  for (int n = 0; n <= n_check; ++n) {
    for (int m = 0; m <= n_check; ++m) {
      const auto sin_ref = oracle::matrix_element(oracle::Kind::kSin, n, m,
                                                  2.0 * p7.k_L, p7.a_osc);
      const auto cos_ref = oracle::matrix_element(oracle::Kind::kCos, n, m,
                                                  2.0 * p7.k_L, p7.a_osc);
      const auto exp_ref = oracle::matrix_element(oracle::Kind::kExp, n, m,
                                                  p7.k_c, p7.a_osc);
      worst = std::max(worst, std::abs(trig.sin(n, m) - sin_ref.real()));
      worst = std::max(worst, std::abs(trig.cos(n, m) - cos_ref.real()));
      worst = std::max(worst, std::abs(drive(n, m) - exp_ref));
    }
  }
  suite.truth("matrix elements match quadrature to 1e-9", worst < 1e-9);
  suite.close("ground-state lattice overlap", trig.cos(0, 0),
              std::exp(-p7.eta_L * p7.eta_L), 1e-12);

  bool parity_ok = true;
  for (int n = 0; n <= n_check; ++n) {
    for (int m = 0; m <= n_check; ++m) {
      if ((n + m) % 2 == 0 && trig.sin(n, m) != 0.0) parity_ok = false;
      if ((n + m) % 2 == 1 && trig.cos(n, m) != 0.0) parity_ok = false;
    }
  }
  suite.truth("trig matrices have exact parity zeros", parity_ok);

  // Dynamics: a real pulse conserves the atom number.
  ExperimentOptions opts = resolve_options(flags);
  opts.n_max = std::min(opts.n_max, 12);
  auto pulse = run_pi_half_pulse(fig7_config(), p7.omega_rec, opts);
  const auto& end = pulse.back().moments;
  suite.truth("pulse conserves the atom number to 1e-8",
              pulse.ok() && std::abs(end.C + end.S - p7.atom_count) <
                                1e-8 * p7.atom_count);

  // Readout pipeline against its closed forms.
  auto opts14 = opts;
  opts14.n_max = 14;
  auto weak = measure_snr1(fig5_config(), 1e-3 * p5.omega_osc, opts14);
  suite.truth("weak-drive imbalance near closed form",
              weak.value / weak.analytic > 0.8 &&
                  weak.value / weak.analytic < 1.05);

  const double period = kTwoPi / p7.omega_osc;
  auto direct_opts = opts;
  direct_opts.extrapolate_window = false;
  const double T = 30.0 * period;
  auto direct = measure_snr2(fig7_config(), p7.omega_rec, T, direct_opts);
  auto extrap = measure_snr2(fig7_config(), p7.omega_rec, T, opts);
  suite.truth("window extrapolation matches direct integration",
              std::abs(extrap.value / direct.value - 1.0) < 0.02);

  return suite.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field simulator for nondestructive clock-state readout "
               "in a ring-cavity lattice"};
  app.require_subcommand(1);
  Flags flags;

  auto* derive_cmd =
      app.add_subcommand("derive", "Print the derived-parameter audit table");
  add_common_options(derive_cmd, flags);

  auto* pulse_cmd =
      app.add_subcommand("pulse", "Integrate one pi/2 pulse, write the "
                                  "trajectory");
  add_common_options(pulse_cmd, flags);
  pulse_cmd->add_option("--omega", flags.omega_text,
                        "Drive strength, e.g. 1rec, 0.5osc, 3470Hz");

  auto* fig5_cmd = app.add_subcommand(
      "fig5", "Imbalance-readout SNR sweep (high-finesse scene)");
  auto* fig6_cmd = app.add_subcommand(
      "fig6", "Centroid phase-space trace through a slow pulse");
  auto* fig7_cmd = app.add_subcommand(
      "fig7", "Sideband-readout SNR sweep (dressed-resonance scene)");
  auto* s1_cmd =
      app.add_subcommand("sweep-snr1", "Imbalance SNR on a custom grid");
  auto* s2_cmd =
      app.add_subcommand("sweep-snr2", "Sideband SNR on a custom grid");
  for (auto* sweep_cmd : {fig5_cmd, fig7_cmd, s1_cmd, s2_cmd}) {
    add_common_options(sweep_cmd, flags);
    sweep_cmd->add_option("--grid-lo", flags.grid_lo_text,
                          "Lowest drive, e.g. 1e-2rec");
    sweep_cmd->add_option("--grid-hi", flags.grid_hi_text,
                          "Highest drive, e.g. 10rec");
    sweep_cmd->add_option("--per-decade", flags.per_decade,
                          "Grid points per decade")
        ->capture_default_str();
  }
  for (auto* windowed : {fig7_cmd, s2_cmd}) {
    windowed->add_option("--window-T", flags.window_T,
                         "Detection window, seconds")
        ->capture_default_str();
  }
  add_common_options(fig6_cmd, flags);
  fig6_cmd->add_option("--omega", flags.omega_text,
                       "Drive strength (default: half the recoil shift)");

  auto* matrix_cmd =
      app.add_subcommand("matrix", "Dump one oscillator-basis operator");
  add_common_options(matrix_cmd, flags);
  matrix_cmd
      ->add_option("--kind", flags.kind,
                   "sin, cos, sin_sq, cos_sq, position, momentum_im, "
                   "drive_re, drive_im")
      ->capture_default_str();

  auto* check_cmd = app.add_subcommand(
      "check", "Cross-check the build against independent references");
  add_common_options(check_cmd, flags);

  int exit_code = 0;
  derive_cmd->callback([&] { exit_code = run_derive(flags); });
  pulse_cmd->callback([&] { exit_code = run_pulse(flags); });
  fig5_cmd->callback([&] { exit_code = run_fig5(flags); });
  fig6_cmd->callback([&] { exit_code = run_fig6(flags); });
  fig7_cmd->callback([&] { exit_code = run_fig7(flags); });
  s1_cmd->callback(
      [&] { exit_code = run_sweep(flags, DetectionScheme::kImbalance); });
  s2_cmd->callback(
      [&] { exit_code = run_sweep(flags, DetectionScheme::kSideband); });
  matrix_cmd->callback([&] { exit_code = run_matrix(flags); });
  check_cmd->callback([&] { exit_code = run_check(flags); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& parse_error) {
    const int code = app.exit(parse_error);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& config_error) {
    std::cerr << "config error: " << config_error.what() << "\n";
    return 2;
  } catch (const NumericalError& numerical_error) {
    std::cerr << "numerical failure: " << numerical_error.what() << "\n";
    return 3;
  } catch (const std::exception& other) {
    std::cerr << "failure: " << other.what() << "\n";
    return 3;
  }
  return exit_code;
}
