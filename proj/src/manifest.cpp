#include "lclock/manifest.hpp"

#include <ctime>
#include <fstream>

#include "json.hpp"
#include "lclock/config_file.hpp"
#include "lclock/errors.hpp"

namespace lclock {

namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

}  // namespace

RunManifest make_manifest(const std::string& command,
                          const PhysicalConfig& config,
                          const ExperimentOptions& opts) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config = config;
  manifest.tol_rel = opts.tol.rel;
  manifest.tol_abs = opts.tol.resolve_abs(config.atom_count);
  manifest.n_max = opts.n_max;
  manifest.sample_stride = opts.sample_stride;
  manifest.jobs = opts.jobs;
  return manifest;
}

std::string to_json(const RunManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["tool_version"] = manifest.tool_version;
  doc["command"] = manifest.command;
  doc["created_utc"] =
      manifest.created_utc.empty() ? utc_now() : manifest.created_utc;

  nlohmann::ordered_json config;
  for (const auto& [key, value] : config_entries(manifest.config)) {
    config[key] = value;
  }
  doc["config"] = std::move(config);

  doc["tolerances"] = {{"rel", manifest.tol_rel}, {"abs", manifest.tol_abs}};
  doc["n_max"] = manifest.n_max;
  doc["sample_stride_s"] = manifest.sample_stride;
  doc["jobs"] = manifest.jobs;
  if (manifest.omega > 0.0) doc["omega_rad_per_s"] = manifest.omega;
  if (manifest.window > 0.0) doc["window_s"] = manifest.window;
  if (!manifest.grid.empty()) doc["grid_rad_per_s"] = manifest.grid;
  doc["format"] = manifest.format;
  doc["outputs"] = manifest.outputs;
  doc["wall_seconds"] = manifest.wall_seconds;
  return doc.dump(2) + "\n";
}

std::string manifest_path_for(const std::string& output_path) {
  const auto slash = output_path.find_last_of('/');
  const auto dot = output_path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return output_path + ".manifest.json";
  }
  return output_path.substr(0, dot) + ".manifest.json";
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << to_json(manifest);
  if (!out) throw ConfigError(path + ": write failed");
}

}  // namespace lclock
