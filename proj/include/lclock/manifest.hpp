#pragma once

#include <string>
#include <vector>

#include "lclock/experiments.hpp"
#include "lclock/params.hpp"

namespace lclock {

inline constexpr const char* kToolVersion = "1.0.0";

// Record of one tool invocation: everything needed to rerun it and get the
// same bytes back (timing aside). Written next to every data file.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string created_utc;  // stamped at write time when left empty
  PhysicalConfig config;    // resolved, defaults included
  double tol_rel = 0.0;
  double tol_abs = 0.0;     // as resolved for the configured atom count
  int n_max = 0;
  double sample_stride = -1.0;
  int jobs = 1;
  double omega = 0.0;            // pulse drive when the run has one, rad/s
  double window = 0.0;           // detection window when the run has one, s
  std::vector<double> grid;      // sweep runs only, rad/s
  std::string format = "csv";
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
};

// Seeds the reproducibility fields from the options actually used.
RunManifest make_manifest(const std::string& command,
                          const PhysicalConfig& config,
                          const ExperimentOptions& opts);

std::string to_json(const RunManifest& manifest);

// "<dir>/<stem>.csv" gets "<dir>/<stem>.manifest.json" beside it.
std::string manifest_path_for(const std::string& output_path);

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace lclock
