#include "lclock/config_file.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lclock/errors.hpp"

namespace lclock {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  return text.substr(begin, end - begin);
}

[[noreturn]] void fail(const std::string& name, int line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << name << ":" << line << ": " << what;
  throw ConfigError(msg.str());
}

double parse_number(const std::string& name, int line, const std::string& key,
                    const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    fail(name, line, key + ": cannot parse '" + value + "' as a number");
  }
  return out;
}

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

PhysicalConfig parse_config(std::istream& in, const std::string& name) {
  PhysicalConfig config;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(name, line_no, "expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(name, line_no, "missing key before '='");
    if (value.empty()) fail(name, line_no, key + ": missing value");
    if (!seen.insert(key).second) {
      fail(name, line_no, key + ": repeated key");
    }

    auto number = [&] { return parse_number(name, line_no, key, value); };
    if (key == "atom_count") {
      config.atom_count = number();
    } else if (key == "atomic_mass_kg") {
      config.atomic_mass = number();
    } else if (key == "polarizability_over_eps0_m3") {
      config.polarizability_over_eps0 = number();
    } else if (key == "lattice_wavelength_m") {
      config.lattice_wavelength = number();
    } else if (key == "clock_wavelength_m") {
      config.clock_wavelength = number();
    } else if (key == "cavity_length_m") {
      config.cavity_length = number();
    } else if (key == "finesse") {
      config.finesse = number();
    } else if (key == "waist_m") {
      config.waist = number();
    } else if (key == "lattice_geometry_ratio") {
      config.lattice_geometry_ratio = number();
    } else if (key == "trap_frequency_ratio") {
      config.trap_frequency_ratio = number();
    } else if (key == "clock_detuning_rad_per_s") {
      config.clock_detuning = number();
    } else if (key == "cavity_detuning_mode") {
      if (value == "dressed") {
        config.cavity_detuning_mode = CavityDetuningMode::kDressedResonance;
      } else if (value == "explicit") {
        config.cavity_detuning_mode = CavityDetuningMode::kExplicit;
      } else {
        fail(name, line_no,
             key + ": expected 'dressed' or 'explicit', got '" + value + "'");
      }
    } else if (key == "cavity_detuning_rad_per_s") {
      config.cavity_detuning = number();
    } else {
      fail(name, line_no, "unknown key '" + key + "'");
    }
  }
  if (in.bad()) {
    throw ConfigError(name + ": read failed");
  }
  return config;
}

PhysicalConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path + ": cannot open config file");
  }
  return parse_config(in, path);
}

std::vector<std::pair<std::string, std::string>> config_entries(
    const PhysicalConfig& config) {
  const bool dressed =
      config.cavity_detuning_mode == CavityDetuningMode::kDressedResonance;
  return {
      {"atom_count", format_number(config.atom_count)},
      {"atomic_mass_kg", format_number(config.atomic_mass)},
      {"polarizability_over_eps0_m3",
       format_number(config.polarizability_over_eps0)},
      {"lattice_wavelength_m", format_number(config.lattice_wavelength)},
      {"clock_wavelength_m", format_number(config.clock_wavelength)},
      {"cavity_length_m", format_number(config.cavity_length)},
      {"finesse", format_number(config.finesse)},
      {"waist_m", format_number(config.waist)},
      {"lattice_geometry_ratio",
       format_number(config.lattice_geometry_ratio)},
      {"trap_frequency_ratio", format_number(config.trap_frequency_ratio)},
      {"clock_detuning_rad_per_s", format_number(config.clock_detuning)},
      {"cavity_detuning_mode", dressed ? "dressed" : "explicit"},
      {"cavity_detuning_rad_per_s", format_number(config.cavity_detuning)},
  };
}

std::string format_config(const PhysicalConfig& config) {
  std::ostringstream out;
  for (const auto& [key, value] : config_entries(config)) {
    out << key << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace lclock
