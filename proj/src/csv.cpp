#include "lclock/csv.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lclock/constants.hpp"
#include "lclock/detection.hpp"
#include "lclock/errors.hpp"

namespace lclock {

CsvTable::CsvTable(std::vector<std::string> header)
    : header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("CSV table needs at least one column");
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) {
    std::ostringstream msg;
    msg << "CSV row has " << row.size() << " fields, header has "
        << header_.size();
    throw ConfigError(msg.str());
  }
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    out << (i ? "," : "") << header_[i];
  }
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_full(row[i]);
    }
    out << "\n";
  }
  return out.str();
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << str();
  if (!out) throw ConfigError(path + ": write failed");
}

std::string format_full(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable table({"t_s", "n_e", "n_g", "p_g_si", "p_e_si", "z_g_si", "z_e_si",
                  "re_d_minus", "im_d_minus", "sum_cos_sq", "sum_sin_sq",
                  "sum_sin_2kl", "sum_cos_2kl"});
  for (const auto& sample : traj.samples) {
    const auto& obs = sample.observables;
    const auto& m = sample.moments;
    table.add_row({sample.t, obs.N_e, obs.N_g, obs.p_g, obs.p_e, obs.z_g,
                   obs.z_e, sample.state.d_minus.real(),
                   sample.state.d_minus.imag(), m.C, m.S, m.S2, m.C2});
  }
  return table;
}

CsvTable sweep_table(const SweepResult& sweep) {
  const auto params = derive(sweep.config);
  const bool sideband = sweep.scheme == DetectionScheme::kSideband;
  std::vector<std::string> header{"omega_over_omega_rec"};
  if (sideband) {
    header.insert(header.end(), {"snr_sideband", "snr_sideband_weak_drive",
                                 "snr_sideband_ceiling"});
  } else {
    header.insert(header.end(),
                  {"snr_imbalance", "snr_imbalance_weak_drive"});
  }
  CsvTable table(std::move(header));

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (const auto& point : sweep.points) {
    const double value = point.ok ? point.report.value : kNaN;
    // The closed form costs nothing, so failed rows still carry the curve.
    if (sideband) {
      table.add_row({point.omega / params.omega_rec, value,
                     snr2_adiabatic(params, point.omega, sweep.window),
                     sweep.saturation});
    } else {
      table.add_row({point.omega / params.omega_rec, value,
                     snr1_adiabatic(params, point.omega)});
    }
  }
  return table;
}

CsvTable phase_space_table(const PhaseSpaceTrace& trace,
                           const DerivedParams& params) {
  CsvTable table({"t_over_trap_period", "z_g_over_a_osc",
                  "p_g_a_osc_over_hbar", "z_e_over_a_osc",
                  "p_e_a_osc_over_hbar"});
  const double period = kTwoPi / params.omega_osc;
  const double p_scale = params.a_osc / kHbar;
  for (const auto& point : trace.points) {
    table.add_row({point.t / period, point.z_g / params.a_osc,
                   point.p_g * p_scale, point.z_e / params.a_osc,
                   point.p_e * p_scale});
  }
  return table;
}

}  // namespace lclock
