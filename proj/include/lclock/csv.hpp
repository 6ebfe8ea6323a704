#pragma once

#include <string>
#include <vector>

#include "lclock/experiments.hpp"
#include "lclock/integrator.hpp"
#include "lclock/params.hpp"

namespace lclock {

// Column-checked table with full-precision number formatting, so repeated
// runs diff byte for byte.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& row);
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

// %.17g, the shortest form that survives a text round trip.
std::string format_full(double value);

// Raw integration output, one sample per row, SI units throughout.
CsvTable trajectory_table(const Trajectory& traj);

// Drive-strength sweeps: the drive in recoil units, the measured SNR, its
// weak-drive companion, and (sideband scheme) the saturation ceiling.
CsvTable sweep_table(const SweepResult& sweep);

// Centroid motion in trap units: time in trap periods, positions against
// the oscillator length, momenta against hbar over that length.
CsvTable phase_space_table(const PhaseSpaceTrace& trace,
                           const DerivedParams& params);

}  // namespace lclock
