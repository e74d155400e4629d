#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "entdyn/channel.hpp"
#include "entdyn/entanglement.hpp"
#include "entdyn/states.hpp"
#include "entdyn/types.hpp"

namespace entdyn {

// Samples are accumulated per fixed-size block and block results are folded
// in index order, so ensemble statistics are bit-identical for any worker
// count, including the serial engine.
inline constexpr int kAccumulatorBlock = 32;

struct TimeGrid {
  std::vector<double> points;

  explicit TimeGrid(std::vector<double> pts);
  // count evenly spaced points from 0 to t_max inclusive (count >= 2).
  static TimeGrid uniform(double t_max, int count);
};

// Streaming mean and second central moment (Welford update, pairwise merge).
struct MomentAccumulator {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const MomentAccumulator& other);
  // Population dispersion sqrt(<v^2> - <v>^2); exactly 0 for constant input.
  double dispersion() const;
  double std_error() const;
};

struct RunConfig {
  int n_qubits = 3;
  StateSpec state;
  std::optional<double> x;       // when set, evolve x|psi><psi| + (1-x)/2^n Id
  double lambda_ratio = 0.01;    // lambda / gamma0; gamma0 is fixed to 1
  TimeGrid grid = TimeGrid::uniform(100.0, 500);
  int samples = 500;
  std::uint64_t seed = 0;
  MeasureSet measures;
  std::filesystem::path states_dir = "states";

  void validate() const;
};

enum class Execution { serial, parallel };

// Measures along the grid for one initial state. Each grid point applies the
// channel for its own time to the t = 0 state; nothing is chained.
std::vector<MeasureVector> evolve_state(const DensityOperator& initial,
                                        const ChannelParams& params, const TimeGrid& grid,
                                        const BipartitionFamilies& families,
                                        const MeasureSet& set);

class EnsembleStats {
 public:
  EnsembleStats(std::vector<std::string> channel_names, std::vector<double> times);

  const std::vector<std::string>& channels() const { return channels_; }
  const std::vector<double>& times() const { return times_; }
  int channel_index(const std::string& name) const;

  long long count(std::size_t time_i, std::size_t channel_i) const;
  double mean(std::size_t time_i, std::size_t channel_i) const;
  double dispersion(std::size_t time_i, std::size_t channel_i) const;
  double std_error(std::size_t time_i, std::size_t channel_i) const;

  MomentAccumulator& cell(std::size_t time_i, std::size_t channel_i);
  const MomentAccumulator& cell(std::size_t time_i, std::size_t channel_i) const;

 private:
  std::vector<std::string> channels_;
  std::vector<double> times_;
  std::vector<MomentAccumulator> cells_;  // [time][channel]
};

// Haar (or fixed-state) ensemble over config.samples initial states. Every
// sample's seed is derived from the master seed and the sample index alone.
EnsembleStats run_ensemble(const RunConfig& config, Execution exec = Execution::parallel);

struct ConvergenceRow {
  int samples;
  double mean;
  double std_error;
};

// Mean global negativity at one probe time for nested sample prefixes: the
// row for size k uses exactly the first k samples of the row for k' > k.
std::vector<ConvergenceRow> convergence_study(const RunConfig& config,
                                              const std::vector<int>& sizes,
                                              double probe_time,
                                              Execution exec = Execution::parallel);

class SweepSurface {
 public:
  SweepSurface(std::vector<double> x_values, std::vector<double> times);

  const std::vector<double>& x_values() const { return x_values_; }
  const std::vector<double>& times() const { return times_; }
  long long count(std::size_t x_i, std::size_t time_i) const;
  double mean(std::size_t x_i, std::size_t time_i) const;
  double dispersion(std::size_t x_i, std::size_t time_i) const;

  MomentAccumulator& cell(std::size_t x_i, std::size_t time_i);
  const MomentAccumulator& cell(std::size_t x_i, std::size_t time_i) const;

 private:
  std::vector<double> x_values_;
  std::vector<double> times_;
  std::vector<MomentAccumulator> cells_;  // [x][time]
};

// Global negativity across a grid of mixing weights. Each sample draws its
// base state once and reuses it for every x, so the x = 1 slice reproduces
// the pure-state ensemble exactly.
SweepSurface mixed_sweep(const RunConfig& config, const std::vector<double>& x_grid,
                         Execution exec = Execution::parallel);

}  // namespace entdyn
