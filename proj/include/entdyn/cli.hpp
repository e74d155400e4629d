#pragma once

#include <string>
#include <vector>

#include "entdyn/entanglement.hpp"

namespace entdyn {

// One output series of a canned study: a labeled initial-state recipe run as
// its own ensemble.
struct PresetSeries {
  std::string label;
  int n_qubits;
  std::string state;  // state spec text
  int samples;
};

// A canned study at desk scale: either a set of time-series ensembles sharing
// one grid, or a sample-size convergence ladder.
struct Preset {
  enum class Kind { timeseries, convergence };

  std::string name;
  std::string description;
  Kind kind = Kind::timeseries;
  double t_max = 100.0;
  int points = 500;
  MeasureSet measures;
  std::vector<PresetSeries> series;

  // convergence presets
  int n_qubits = 4;
  std::string state = "haar";
  double probe_time = 40.0;
  std::vector<int> sizes;
};

const std::vector<Preset>& figure_recipes();
const Preset* find_preset(const std::string& name);

// Full command-line driver. Returns the process exit code: 0 on success,
// 2 for configuration errors, 1 for runtime failures.
int run_cli(int argc, const char* const* argv);

}  // namespace entdyn
