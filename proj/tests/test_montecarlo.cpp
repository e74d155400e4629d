#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "entdyn/montecarlo.hpp"
#include "entdyn/rng.hpp"
#include "oracles.hpp"

using namespace entdyn;

namespace {

RunConfig small_config(int n, const std::string& state, int samples, int points,
                       double t_max) {
  RunConfig config;
  config.n_qubits = n;
  config.state = parse_state_spec(state, n);
  config.grid = TimeGrid::uniform(t_max, points);
  config.samples = samples;
  config.seed = 4242;
  return config;
}

bool bitwise_equal(const EnsembleStats& a, const EnsembleStats& b) {
  if (a.channels() != b.channels() || a.times() != b.times()) return false;
  for (std::size_t t = 0; t < a.times().size(); ++t) {
    for (std::size_t c = 0; c < a.channels().size(); ++c) {
      if (a.count(t, c) != b.count(t, c)) return false;
      if (std::memcmp(&a.cell(t, c).mean, &b.cell(t, c).mean, sizeof(double)) != 0) {
        return false;
      }
      if (std::memcmp(&a.cell(t, c).m2, &b.cell(t, c).m2, sizeof(double)) != 0) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("time grids are validated") {
  const TimeGrid grid = TimeGrid::uniform(10.0, 5);
  REQUIRE(grid.points.size() == 5);
  CHECK(grid.points.front() == 0.0);
  CHECK(grid.points.back() == 10.0);
  CHECK_THROWS_AS(TimeGrid::uniform(10.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::uniform(-1.0, 5), std::invalid_argument);
  CHECK_NOTHROW(TimeGrid({40.0}));
  CHECK_THROWS_AS(TimeGrid({}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({-2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("seed mixing separates streams") {
  std::vector<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 2000; ++s) seen.push_back(mix_seed(7, s));
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  CHECK(mix_seed(7, 0) != mix_seed(8, 0));
}

TEST_CASE("moment accumulators match direct statistics and merge cleanly") {
  Rng rng(55);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> data(257);
  for (double& v : data) v = uni(rng);

  MomentAccumulator single;
  for (double v : data) single.add(v);

  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  double var = 0.0;
  for (double v : data) var += (v - mean) * (v - mean);
  var /= data.size();

  CHECK(single.mean == doctest::Approx(mean).epsilon(1e-13));
  CHECK(single.dispersion() == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(single.std_error() ==
        doctest::Approx(std::sqrt(var / data.size())).epsilon(1e-12));

  // Merging arbitrary chunkings agrees with the single pass.
  MomentAccumulator merged;
  std::size_t i = 0;
  for (std::size_t chunk : {7, 64, 1, 100, 85}) {
    MomentAccumulator part;
    for (std::size_t k = 0; k < chunk; ++k) part.add(data[i++]);
    merged.merge(part);
  }
  REQUIRE(i == data.size());
  CHECK(merged.count == single.count);
  CHECK(merged.mean == doctest::Approx(single.mean).epsilon(1e-14));
  CHECK(merged.m2 == doctest::Approx(single.m2).epsilon(1e-12));

  MomentAccumulator constant;
  for (int k = 0; k < 100; ++k) constant.add(0.75);
  CHECK(constant.dispersion() == 0.0);

  MomentAccumulator empty;
  CHECK(empty.dispersion() == 0.0);
  MomentAccumulator target;
  target.add(1.0);
  target.merge(empty);
  CHECK(target.count == 1);
}

TEST_CASE("evolve_state evaluates each grid point from the initial state") {
  const ChannelParams params(1.0, 0.01);
  const BipartitionFamilies families = enumerate_bipartitions(3);
  const MeasureSet set{true, true, true, true};
  const DensityOperator rho0 = make_named(parse_state_spec("ghz", 3)).projector();

  const auto rows = evolve_state(rho0, params, TimeGrid({0.0, 7.0, 23.0}), families, set);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].values[0] == doctest::Approx(1.0).epsilon(1e-10));

  const DensityOperator direct = apply_channel_sequential(rho0, kraus_pair(params, 7.0));
  const MeasureVector expected = evaluate_measures(direct, families, set);
  for (std::size_t c = 0; c < expected.values.size(); ++c) {
    CHECK(rows[1].values[c] == expected.values[c]);
  }
}

TEST_CASE("run configs are validated") {
  RunConfig config = small_config(3, "haar", 8, 3, 10.0);
  CHECK_NOTHROW(config.validate());
  config.n_qubits = 1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = small_config(3, "haar", 0, 3, 10.0);
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = small_config(3, "haar", 8, 3, 10.0);
  config.x = 1.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = small_config(3, "haar", 8, 3, 10.0);
  config.lambda_ratio = 2.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = small_config(3, "haar", 8, 3, 10.0);
  config.measures = MeasureSet{false, false, false, false};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = small_config(3, "haar", 8, 3, 10.0);
  config.state = parse_state_spec("haar", 4);
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("ensembles are bit-identical across reruns and worker counts") {
  // 48 samples spans one full and one partial accumulator block.
  const RunConfig config = small_config(3, "haar", 48, 7, 50.0);

  const EnsembleStats serial = run_ensemble(config, Execution::serial);
  const EnsembleStats serial_again = run_ensemble(config, Execution::serial);
  CHECK(bitwise_equal(serial, serial_again));

  for (int threads : {1, 2, 5}) {
    omp_set_num_threads(threads);
    const EnsembleStats parallel = run_ensemble(config, Execution::parallel);
    CHECK(bitwise_equal(serial, parallel));
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("deterministic initial states have exactly zero dispersion") {
  const RunConfig config = small_config(3, "ghz", 5, 4, 40.0);
  const EnsembleStats stats = run_ensemble(config);
  for (std::size_t t = 0; t < stats.times().size(); ++t) {
    CHECK(stats.count(t, 0) == 5);
    CHECK(stats.dispersion(t, 0) == 0.0);
  }
}

TEST_CASE("standard error shrinks like the square root of the sample count") {
  RunConfig small = small_config(2, "haar", 50, 3, 40.0);
  RunConfig large = small_config(2, "haar", 500, 3, 40.0);
  const EnsembleStats few = run_ensemble(small);
  const EnsembleStats many = run_ensemble(large);
  const std::size_t t = 1;  // mid-grid point, well away from zeros of p
  const double ratio = few.std_error(t, 0) / many.std_error(t, 0);
  CHECK(ratio > std::sqrt(10.0) / 2.0);
  CHECK(ratio < std::sqrt(10.0) * 2.0);
}

TEST_CASE("white-noise weight x = 1 reproduces the pure ensemble bitwise") {
  RunConfig pure = small_config(3, "haar", 16, 4, 30.0);
  RunConfig mixed = pure;
  mixed.x = 1.0;
  CHECK(bitwise_equal(run_ensemble(pure), run_ensemble(mixed)));

  // x = 0 is the static maximally mixed state: product form, no negativity.
  RunConfig flat = pure;
  flat.x = 0.0;
  const EnsembleStats stats = run_ensemble(flat);
  for (std::size_t t = 0; t < stats.times().size(); ++t) {
    CHECK(stats.mean(t, 0) == 0.0);
  }
}

TEST_CASE("unresolvable state specs surface as exceptions in both engines") {
  RunConfig config = small_config(4, "optimized:not-there", 8, 3, 10.0);
  config.states_dir = std::filesystem::temp_directory_path() / "entdyn_absent";
  CHECK_THROWS_AS(run_ensemble(config), std::runtime_error);
  CHECK_THROWS_AS(run_ensemble(config, Execution::serial), std::runtime_error);
}

TEST_CASE("convergence rows use nested sample prefixes") {
  const RunConfig config = small_config(4, "haar", 1, 2, 50.0);
  const auto rows = convergence_study(config, {10, 40, 160}, 40.0);
  REQUIRE(rows.size() == 3);

  // The first row equals a directly run 10-sample ensemble at the probe time.
  RunConfig direct = config;
  direct.samples = 10;
  direct.grid = TimeGrid({40.0});
  direct.measures = MeasureSet{};
  const EnsembleStats stats = run_ensemble(direct);
  CHECK(rows[0].mean == stats.mean(0, 0));
  CHECK(rows[0].std_error == stats.std_error(0, 0));
  CHECK(rows[0].samples == 10);

  // Worker count does not change the ladder.
  const auto serial_rows = convergence_study(config, {10, 40, 160}, 40.0, Execution::serial);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::memcmp(&rows[i].mean, &serial_rows[i].mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&rows[i].std_error, &serial_rows[i].std_error, sizeof(double)) == 0);
  }

  CHECK_THROWS_AS(convergence_study(config, {}, 40.0), std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(config, {10, 10}, 40.0), std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(config, {40, 10}, 40.0), std::invalid_argument);
}

TEST_CASE("mixed sweeps share the base draw across the x grid") {
  RunConfig config = small_config(3, "haar", 16, 3, 30.0);
  const std::vector<double> x_grid = {0.0, 0.5, 1.0};
  const SweepSurface surface = mixed_sweep(config, x_grid);

  REQUIRE(surface.x_values() == x_grid);
  REQUIRE(surface.times().size() == 3);

  // The x = 1 slice is bitwise the pure ensemble.
  RunConfig pure = config;
  pure.measures = MeasureSet{};
  const EnsembleStats stats = run_ensemble(pure);
  for (std::size_t t = 0; t < surface.times().size(); ++t) {
    CHECK(std::memcmp(&surface.cell(2, t).mean, &stats.cell(t, 0).mean, sizeof(double)) == 0);
    CHECK(surface.count(2, t) == 16);
    CHECK(surface.mean(0, t) == 0.0);  // x = 0 slice never entangles
  }

  // More weight on the pure state never lowers the t = 0 negativity.
  CHECK(surface.mean(0, 0) <= surface.mean(1, 0));
  CHECK(surface.mean(1, 0) <= surface.mean(2, 0));

  // Serial and parallel engines agree bitwise.
  SweepSurface serial = mixed_sweep(config, x_grid, Execution::serial);
  for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
    for (std::size_t t = 0; t < surface.times().size(); ++t) {
      CHECK(std::memcmp(&serial.cell(xi, t).mean, &surface.cell(xi, t).mean,
                        sizeof(double)) == 0);
    }
  }

  CHECK_THROWS_AS(mixed_sweep(config, {}), std::invalid_argument);
  CHECK_THROWS_AS(mixed_sweep(config, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(mixed_sweep(config, {0.5, 1.5}), std::invalid_argument);
}

}  // TEST_SUITE
