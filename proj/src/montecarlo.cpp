#include "entdyn/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "entdyn/rng.hpp"

namespace entdyn {
namespace {

// Runs fn(block) for every block, serially or under OpenMP. Exceptions are
// captured and the one from the lowest block index is rethrown, so failures
// are reported identically regardless of scheduling.
template <typename Fn>
void for_each_block(int n_blocks, Execution exec, Fn&& fn) {
  std::mutex guard;
  int first_block = std::numeric_limits<int>::max();
  std::string message;

  auto safe = [&](int b) {
    try {
      fn(b);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(guard);
      if (b < first_block) {
        first_block = b;
        message = e.what();
      }
    }
  };

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < n_blocks; ++b) safe(b);
  } else {
    for (int b = 0; b < n_blocks; ++b) safe(b);
  }

  if (first_block != std::numeric_limits<int>::max()) {
    throw std::runtime_error("sample block " + std::to_string(first_block) +
                             " failed: " + message);
  }
}

int block_count(int samples) {
  return (samples + kAccumulatorBlock - 1) / kAccumulatorBlock;
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> pts) : points(std::move(pts)) {
  if (points.empty()) throw std::invalid_argument("time grid is empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] >= 0.0) || !std::isfinite(points[i])) {
      throw std::invalid_argument("time grid points must be finite and nonnegative");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw std::invalid_argument("time grid points must be strictly increasing");
    }
  }
}

TimeGrid TimeGrid::uniform(double t_max, int count) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (count < 2) throw std::invalid_argument("a uniform grid needs at least 2 points");
  std::vector<double> pts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    pts[static_cast<std::size_t>(i)] =
        t_max * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return TimeGrid(std::move(pts));
}

void MomentAccumulator::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double delta = other.mean - mean;
  const double total = na + nb;
  mean += delta * (nb / total);
  m2 += other.m2 + delta * delta * (na * nb / total);
  count += other.count;
}

double MomentAccumulator::dispersion() const {
  if (count == 0) return 0.0;
  if (m2 < -1e-12) throw std::logic_error("negative second moment");
  return std::sqrt(std::max(0.0, m2) / static_cast<double>(count));
}

double MomentAccumulator::std_error() const {
  if (count == 0) return 0.0;
  return dispersion() / std::sqrt(static_cast<double>(count));
}

void RunConfig::validate() const {
  if (n_qubits < 2 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("ensembles support 2 to " + std::to_string(kMaxQubits) +
                                " qubits");
  }
  if (samples < 1) throw std::invalid_argument("sample count must be at least 1");
  if (x && !(*x >= 0.0 && *x <= 1.0)) {
    throw std::invalid_argument("mixing weight x must lie in [0, 1]");
  }
  if (!(lambda_ratio > 0.0 && lambda_ratio < 2.0)) {
    throw std::invalid_argument(
        "lambda/gamma0 must lie in (0, 2) for the oscillatory regime");
  }
  const MeasureSet& m = measures;
  if (!m.negativity && !m.e_mb && !m.linear_entropy && !m.purity) {
    throw std::invalid_argument("at least one measure must be enabled");
  }
  if (state.n_qubits != n_qubits) {
    throw std::invalid_argument("state spec qubit count differs from the run");
  }
}

std::vector<MeasureVector> evolve_state(const DensityOperator& initial,
                                        const ChannelParams& params, const TimeGrid& grid,
                                        const BipartitionFamilies& families,
                                        const MeasureSet& set) {
  std::vector<MeasureVector> out;
  out.reserve(grid.points.size());
  for (double t : grid.points) {
    const KrausPair pair = kraus_pair(params, t);
    const DensityOperator evolved = apply_channel_sequential(initial, pair);
    out.push_back(evaluate_measures(evolved, families, set));
  }
  return out;
}

EnsembleStats::EnsembleStats(std::vector<std::string> channel_names,
                             std::vector<double> times)
    : channels_(std::move(channel_names)),
      times_(std::move(times)),
      cells_(channels_.size() * times_.size()) {}

int EnsembleStats::channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i] == name) return static_cast<int>(i);
  }
  throw std::out_of_range("no measure channel named " + name);
}

MomentAccumulator& EnsembleStats::cell(std::size_t time_i, std::size_t channel_i) {
  return cells_.at(time_i * channels_.size() + channel_i);
}

const MomentAccumulator& EnsembleStats::cell(std::size_t time_i,
                                             std::size_t channel_i) const {
  return cells_.at(time_i * channels_.size() + channel_i);
}

long long EnsembleStats::count(std::size_t t, std::size_t c) const { return cell(t, c).count; }
double EnsembleStats::mean(std::size_t t, std::size_t c) const { return cell(t, c).mean; }
double EnsembleStats::dispersion(std::size_t t, std::size_t c) const {
  return cell(t, c).dispersion();
}
double EnsembleStats::std_error(std::size_t t, std::size_t c) const {
  return cell(t, c).std_error();
}

EnsembleStats run_ensemble(const RunConfig& config, Execution exec) {
  config.validate();
  const ChannelParams params(1.0, config.lambda_ratio);
  const BipartitionFamilies families = enumerate_bipartitions(config.n_qubits);
  const auto names = measure_names(config.n_qubits, config.measures);
  const std::size_t n_channels = names.size();
  const std::size_t n_times = config.grid.points.size();

  std::optional<PureState> fixed;
  if (!config.state.is_random()) {
    fixed = realize_state(config.state, 0, config.states_dir);
    if (fixed->n_qubits() != config.n_qubits) {
      throw std::invalid_argument("loaded state qubit count differs from the run");
    }
  }

  const int n_blocks = block_count(config.samples);
  std::vector<MomentAccumulator> block_cells(static_cast<std::size_t>(n_blocks) *
                                             n_times * n_channels);

  for_each_block(n_blocks, exec, [&](int b) {
    const int begin = b * kAccumulatorBlock;
    const int end = std::min(begin + kAccumulatorBlock, config.samples);
    MomentAccumulator* mine =
        block_cells.data() + static_cast<std::size_t>(b) * n_times * n_channels;
    for (int s = begin; s < end; ++s) {
      const std::uint64_t sample_seed = mix_seed(config.seed, static_cast<std::uint64_t>(s));
      const PureState psi =
          fixed ? *fixed : haar_random_state(config.n_qubits, sample_seed);
      const DensityOperator rho0 = config.x ? make_mixed(psi, *config.x) : psi.projector();
      const auto rows = evolve_state(rho0, params, config.grid, families, config.measures);
      for (std::size_t t = 0; t < n_times; ++t) {
        for (std::size_t c = 0; c < n_channels; ++c) {
          mine[t * n_channels + c].add(rows[t].values[c]);
        }
      }
    }
  });

  EnsembleStats stats(names, config.grid.points);
  for (std::size_t t = 0; t < n_times; ++t) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      MomentAccumulator& acc = stats.cell(t, c);
      for (int b = 0; b < n_blocks; ++b) {
        acc.merge(block_cells[static_cast<std::size_t>(b) * n_times * n_channels +
                              t * n_channels + c]);
      }
    }
  }
  return stats;
}

std::vector<ConvergenceRow> convergence_study(const RunConfig& config,
                                              const std::vector<int>& sizes,
                                              double probe_time, Execution exec) {
  if (sizes.empty()) throw std::invalid_argument("no ensemble sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw std::invalid_argument("ensemble sizes must be positive");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw std::invalid_argument("ensemble sizes must be strictly increasing");
    }
  }
  RunConfig probe = config;
  probe.grid = TimeGrid({probe_time});
  probe.samples = sizes.back();
  probe.measures = MeasureSet{};  // negativity only
  probe.validate();

  const ChannelParams params(1.0, probe.lambda_ratio);
  const BipartitionFamilies families = enumerate_bipartitions(probe.n_qubits);

  std::optional<PureState> fixed;
  if (!probe.state.is_random()) fixed = realize_state(probe.state, 0, probe.states_dir);

  std::vector<double> values(static_cast<std::size_t>(probe.samples));
  const int n_blocks = block_count(probe.samples);
  for_each_block(n_blocks, exec, [&](int b) {
    const int begin = b * kAccumulatorBlock;
    const int end = std::min(begin + kAccumulatorBlock, probe.samples);
    for (int s = begin; s < end; ++s) {
      const std::uint64_t sample_seed = mix_seed(probe.seed, static_cast<std::uint64_t>(s));
      const PureState psi = fixed ? *fixed : haar_random_state(probe.n_qubits, sample_seed);
      const DensityOperator rho0 = probe.x ? make_mixed(psi, *probe.x) : psi.projector();
      const auto rows = evolve_state(rho0, params, probe.grid, families, probe.measures);
      values[static_cast<std::size_t>(s)] = rows[0].values[0];
    }
  });

  // Nested prefixes, folded with the same block topology as run_ensemble.
  std::vector<ConvergenceRow> out;
  for (int size : sizes) {
    MomentAccumulator total;
    for (int b = 0; b * kAccumulatorBlock < size; ++b) {
      MomentAccumulator block;
      const int begin = b * kAccumulatorBlock;
      const int end = std::min(begin + kAccumulatorBlock, size);
      for (int s = begin; s < end; ++s) block.add(values[static_cast<std::size_t>(s)]);
      total.merge(block);
    }
    out.push_back(ConvergenceRow{size, total.mean, total.std_error()});
  }
  return out;
}

SweepSurface::SweepSurface(std::vector<double> x_values, std::vector<double> times)
    : x_values_(std::move(x_values)),
      times_(std::move(times)),
      cells_(x_values_.size() * times_.size()) {}

MomentAccumulator& SweepSurface::cell(std::size_t x_i, std::size_t time_i) {
  return cells_.at(x_i * times_.size() + time_i);
}

const MomentAccumulator& SweepSurface::cell(std::size_t x_i, std::size_t time_i) const {
  return cells_.at(x_i * times_.size() + time_i);
}

long long SweepSurface::count(std::size_t x_i, std::size_t time_i) const {
  return cells_.at(x_i * times_.size() + time_i).count;
}
double SweepSurface::mean(std::size_t x_i, std::size_t time_i) const {
  return cells_.at(x_i * times_.size() + time_i).mean;
}
double SweepSurface::dispersion(std::size_t x_i, std::size_t time_i) const {
  return cells_.at(x_i * times_.size() + time_i).dispersion();
}

SweepSurface mixed_sweep(const RunConfig& config, const std::vector<double>& x_grid,
                         Execution exec) {
  if (x_grid.empty()) throw std::invalid_argument("x grid is empty");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] >= 0.0 && x_grid[i] <= 1.0)) {
      throw std::invalid_argument("x grid values must lie in [0, 1]");
    }
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
      throw std::invalid_argument("x grid values must be strictly increasing");
    }
  }
  RunConfig base = config;
  base.x.reset();
  base.measures = MeasureSet{};  // negativity only
  base.validate();

  const ChannelParams params(1.0, base.lambda_ratio);
  const BipartitionFamilies families = enumerate_bipartitions(base.n_qubits);

  std::optional<PureState> fixed;
  if (!base.state.is_random()) fixed = realize_state(base.state, 0, base.states_dir);

  const std::size_t n_x = x_grid.size();
  const std::size_t n_times = base.grid.points.size();
  const int n_blocks = block_count(base.samples);
  std::vector<MomentAccumulator> block_cells(static_cast<std::size_t>(n_blocks) * n_x *
                                             n_times);

  for_each_block(n_blocks, exec, [&](int b) {
    const int begin = b * kAccumulatorBlock;
    const int end = std::min(begin + kAccumulatorBlock, base.samples);
    MomentAccumulator* mine = block_cells.data() + static_cast<std::size_t>(b) * n_x * n_times;
    for (int s = begin; s < end; ++s) {
      const std::uint64_t sample_seed = mix_seed(base.seed, static_cast<std::uint64_t>(s));
      const PureState psi = fixed ? *fixed : haar_random_state(base.n_qubits, sample_seed);
      for (std::size_t xi = 0; xi < n_x; ++xi) {
        const DensityOperator rho0 = make_mixed(psi, x_grid[xi]);
        const auto rows = evolve_state(rho0, params, base.grid, families, base.measures);
        for (std::size_t t = 0; t < n_times; ++t) {
          mine[xi * n_times + t].add(rows[t].values[0]);
        }
      }
    }
  });

  SweepSurface surface(x_grid, base.grid.points);
  for (std::size_t xi = 0; xi < n_x; ++xi) {
    for (std::size_t t = 0; t < n_times; ++t) {
      MomentAccumulator& acc = surface.cell(xi, t);
      for (int b = 0; b < n_blocks; ++b) {
        acc.merge(block_cells[static_cast<std::size_t>(b) * n_x * n_times + xi * n_times + t]);
      }
    }
  }
  return surface;
}

}  // namespace entdyn
