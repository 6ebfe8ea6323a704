#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lclock/config_file.hpp"
#include "lclock/csv.hpp"
#include "lclock/errors.hpp"
#include "lclock/experiments.hpp"
#include "lclock/manifest.hpp"
#include "lclock/params.hpp"

using namespace lclock;

namespace {

std::string error_text(const std::function<void()>& call) {
  try {
    call();
  } catch (const ConfigError& failure) {
    return failure.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config parser: full file, comments, and round trip") {
  std::istringstream in(
      "# benchmark cavity\n"
      "atom_count = 2.5e5\n"
      "atomic_mass_kg = 1.44e-25\n"
      "polarizability_over_eps0_m3 = -5.37e-28\n"
      "lattice_wavelength_m = 813e-9   # magic wavelength\n"
      "clock_wavelength_m = 698.4e-9\n"
      "\n"
      "cavity_length_m = 1e-2\n"
      "finesse = 1e6\n"
      "waist_m = 30e-6\n"
      "lattice_geometry_ratio = 2\n"
      "trap_frequency_ratio = 20\n"
      "clock_detuning_rad_per_s = 12.5\n"
      "cavity_detuning_mode = explicit\n"
      "cavity_detuning_rad_per_s = -3e4\n");
  auto config = parse_config(in, "inline");
  CHECK(config.atom_count == 2.5e5);
  CHECK(config.finesse == 1e6);
  CHECK(config.clock_detuning == 12.5);
  CHECK(config.cavity_detuning_mode == CavityDetuningMode::kExplicit);
  CHECK(config.cavity_detuning == -3e4);

  // Text -> struct -> text -> struct is lossless.
  std::istringstream again(format_config(config));
  auto reparsed = parse_config(again, "round-trip");
  CHECK(format_config(reparsed) == format_config(config));
}

TEST_CASE("config parser: an empty file keeps every default") {
  std::istringstream in("\n# nothing but commentary\n\n");
  auto config = parse_config(in, "empty");
  PhysicalConfig defaults;
  CHECK(format_config(config) == format_config(defaults));
  CHECK(config.atom_count == 1e6);
  CHECK(config.cavity_detuning_mode == CavityDetuningMode::kDressedResonance);
}

TEST_CASE("config parser: diagnostics carry file, line, and field") {
  auto parse_text = [](const char* text) {
    return [text] {
      std::istringstream in(text);
      parse_config(in, "bad.cfg");
    };
  };

  auto msg = error_text(parse_text("finesse 1e4\n"));
  CHECK(msg.find("bad.cfg:1") != std::string::npos);
  CHECK(msg.find("key = value") != std::string::npos);

  msg = error_text(parse_text("atom_count = 1e5\nfinesse = large\n"));
  CHECK(msg.find("bad.cfg:2") != std::string::npos);
  CHECK(msg.find("finesse") != std::string::npos);
  CHECK(msg.find("large") != std::string::npos);

  msg = error_text(parse_text("mirror_count = 3\n"));
  CHECK(msg.find("unknown key 'mirror_count'") != std::string::npos);

  msg = error_text(parse_text("finesse = 1e4\nfinesse = 1e5\n"));
  CHECK(msg.find("bad.cfg:2") != std::string::npos);
  CHECK(msg.find("repeated") != std::string::npos);

  msg = error_text(parse_text("cavity_detuning_mode = auto\n"));
  CHECK(msg.find("dressed") != std::string::npos);
  CHECK(msg.find("auto") != std::string::npos);

  msg = error_text(parse_text("finesse =\n"));
  CHECK(msg.find("missing value") != std::string::npos);

  CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("config parser: trailing junk after a number is rejected") {
  std::istringstream in("finesse = 1e4 units\n");
  CHECK_THROWS_AS(parse_config(in, "junk"), ConfigError);
}

TEST_CASE("full-precision formatting survives a text round trip") {
  for (double value : {1.0 / 3.0, 2.182285527602e4, 1e-300, -0.0, 487.1}) {
    const std::string text = format_full(value);
    CHECK(std::stod(text) == value);
  }
  CHECK(format_full(std::nan("")) == "nan");
}

TEST_CASE("csv table enforces its header width and prints stable bytes") {
  CsvTable table({"a", "b"});
  table.add_row({1.0, 2.0});
  table.add_row({0.5, 1.0 / 3.0});
  CHECK_THROWS_AS(table.add_row({1.0}), ConfigError);
  CHECK_THROWS_AS(CsvTable({}), ConfigError);

  const std::string text = table.str();
  CHECK(text.substr(0, 4) == "a,b\n");
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(table.str() == text);  // stable across calls

  const std::string path = "/tmp/lclock_test_table.csv";
  table.write(path);
  std::ifstream in(path);
  std::stringstream read_back;
  read_back << in.rdbuf();
  CHECK(read_back.str() == text);
  std::remove(path.c_str());
}

TEST_CASE("trajectory and phase-space tables mirror their sources") {
  ExperimentOptions opts;
  opts.n_max = 10;
  const auto params = derive(fig5_config());
  auto traj = run_pi_half_pulse(fig5_config(), params.omega_osc / 8.0, opts);
  REQUIRE(traj.ok());
  auto table = trajectory_table(traj);
  CHECK(table.row_count() == traj.samples.size());
  const std::string text = table.str();
  CHECK(text.find("t_s,n_e,n_g") == 0);
  // First sample: everything still in the ground state.
  std::istringstream lines(text);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(first.substr(0, 2) == "0,");

  auto trace = phase_space_trace(fig5_config(), params.omega_osc / 40.0, opts);
  auto ps = phase_space_table(trace, params);
  CHECK(ps.row_count() == trace.points.size());
  CHECK(ps.str().find("t_over_trap_period") == 0);
}

TEST_CASE("sweep tables carry the analytic column even for failed points") {
  const auto params = derive(fig5_config());
  SweepResult sweep;
  sweep.scheme = DetectionScheme::kImbalance;
  sweep.config = fig5_config();
  sweep.grid = {0.5 * params.omega_rec, params.omega_rec};
  SweepPoint good;
  good.omega = sweep.grid[0];
  good.ok = true;
  good.report.value = 42.0;
  SweepPoint bad;
  bad.omega = sweep.grid[1];
  bad.error = "did not converge";
  sweep.points = {good, bad};

  auto table = sweep_table(sweep);
  CHECK(table.row_count() == 2);
  std::istringstream lines(table.str());
  std::string header, row0, row1;
  std::getline(lines, header);
  std::getline(lines, row0);
  std::getline(lines, row1);
  CHECK(header == "omega_over_omega_rec,snr_imbalance,snr_imbalance_weak_drive");
  CHECK(row0.find("0.5,42,") == 0);
  CHECK(row1.find("1,nan,") == 0);

  // The sideband variant adds the ceiling column.
  SweepResult side = sweep;
  side.scheme = DetectionScheme::kSideband;
  side.window = 1.0;
  side.saturation = 123.0;
  auto side_table = sweep_table(side);
  CHECK(side_table.str().find("snr_sideband_ceiling") != std::string::npos);
  CHECK(side_table.str().find(",123\n") != std::string::npos);
}

TEST_CASE("manifest records the exact run settings as JSON") {
  ExperimentOptions opts;
  opts.n_max = 12;
  opts.tol.rel = 1e-9;
  opts.jobs = 4;
  auto manifest = make_manifest("sweep-snr1", fig5_config(), opts);
  manifest.created_utc = "2026-01-01T00:00:00Z";
  manifest.grid = {1.0, 2.0, 3.0};
  manifest.omega = 5e3;
  manifest.window = 0.25;
  manifest.outputs = {"out/fig5.csv"};
  manifest.wall_seconds = 1.25;

  const std::string text = to_json(manifest);
  CHECK(to_json(manifest) == text);  // deterministic once timestamped

  auto doc = nlohmann::json::parse(text);
  CHECK(doc["tool_version"] == kToolVersion);
  CHECK(doc["command"] == "sweep-snr1");
  CHECK(doc["config"]["finesse"] == "1000000");
  CHECK(doc["config"]["cavity_detuning_mode"] == "explicit");
  CHECK(doc["tolerances"]["rel"] == 1e-9);
  CHECK(doc["tolerances"]["abs"] ==
        opts.tol.resolve_abs(fig5_config().atom_count));
  CHECK(doc["n_max"] == 12);
  CHECK(doc["jobs"] == 4);
  CHECK(doc["grid_rad_per_s"].size() == 3);
  CHECK(doc["omega_rad_per_s"] == 5e3);
  CHECK(doc["window_s"] == 0.25);
  CHECK(doc["outputs"][0] == "out/fig5.csv");

  // Pulse-free commands omit the pulse fields entirely.
  auto bare = make_manifest("derive", fig5_config(), opts);
  bare.created_utc = "2026-01-01T00:00:00Z";
  auto bare_doc = nlohmann::json::parse(to_json(bare));
  CHECK(!bare_doc.contains("omega_rad_per_s"));
  CHECK(!bare_doc.contains("grid_rad_per_s"));
}

TEST_CASE("manifest files land next to their data") {
  CHECK(manifest_path_for("out/fig5.csv") == "out/fig5.manifest.json");
  CHECK(manifest_path_for("fig7.csv") == "fig7.manifest.json");
  CHECK(manifest_path_for("results/pulse") ==
        "results/pulse.manifest.json");
  CHECK(manifest_path_for("a.b/c") == "a.b/c.manifest.json");

  RunManifest manifest;
  manifest.command = "pulse";
  const std::string path = "/tmp/lclock_test_manifest.json";
  write_manifest(manifest, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  auto doc = nlohmann::json::parse(in);
  CHECK(doc["command"] == "pulse");
  CHECK(doc["created_utc"].get<std::string>().size() == 20);
  std::remove(path.c_str());
}
