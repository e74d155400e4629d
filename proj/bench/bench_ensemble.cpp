// Times the ensemble engine serially and under OpenMP at several worker
// counts, and checks that every configuration produces bit-identical
// statistics.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <omp.h>

#include "entdyn/montecarlo.hpp"

using namespace entdyn;

namespace {

RunConfig bench_config(int n_qubits, int samples, int points) {
  RunConfig config;
  config.n_qubits = n_qubits;
  config.state = parse_state_spec("haar", n_qubits);
  config.grid = TimeGrid::uniform(100.0, points);
  config.samples = samples;
  config.seed = 12345;
  config.measures = MeasureSet{true, true, true, true};
  return config;
}

bool identical(const EnsembleStats& a, const EnsembleStats& b) {
  for (std::size_t t = 0; t < a.times().size(); ++t) {
    for (std::size_t c = 0; c < a.channels().size(); ++c) {
      if (std::memcmp(&a.cell(t, c).mean, &b.cell(t, c).mean, sizeof(double)) != 0) return false;
      if (std::memcmp(&a.cell(t, c).m2, &b.cell(t, c).m2, sizeof(double)) != 0) return false;
      if (a.cell(t, c).count != b.cell(t, c).count) return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int n_qubits = 4;
  int samples = 128;
  int points = 50;
  std::vector<int> thread_counts = {1, 2, 4};
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> const char* {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", arg.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--n") n_qubits = std::atoi(next());
    else if (arg == "--samples") samples = std::atoi(next());
    else if (arg == "--points") points = std::atoi(next());
    else if (arg == "--threads") {
      thread_counts.clear();
      std::string list = next();
      for (std::size_t pos = 0; pos < list.size();) {
        std::size_t comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        thread_counts.push_back(std::atoi(list.substr(pos, comma - pos).c_str()));
        pos = comma + 1;
      }
    } else {
      std::fprintf(stderr,
                   "usage: bench_ensemble [--n N] [--samples K] [--points P] "
                   "[--threads 1,2,4]\n");
      return 2;
    }
  }

  const RunConfig config = bench_config(n_qubits, samples, points);
  std::printf("ensemble benchmark: n=%d samples=%d points=%d hardware_threads=%d\n",
              n_qubits, samples, points, omp_get_num_procs());

  const double t0 = omp_get_wtime();
  const EnsembleStats reference = run_ensemble(config, Execution::serial);
  const double serial_seconds = omp_get_wtime() - t0;
  std::printf("%-10s %8s %10.3fs %9s %6s\n", "serial", "-", serial_seconds, "1.00x", "ref");

  bool all_identical = true;
  for (int threads : thread_counts) {
    omp_set_num_threads(threads);
    const double t1 = omp_get_wtime();
    const EnsembleStats parallel = run_ensemble(config, Execution::parallel);
    const double seconds = omp_get_wtime() - t1;
    const bool same = identical(reference, parallel);
    all_identical = all_identical && same;
    std::printf("%-10s %8d %10.3fs %8.2fx %6s\n", "parallel", threads, seconds,
                serial_seconds / seconds, same ? "same" : "DIFFERS");
  }
  if (!all_identical) {
    std::printf("FAIL: parallel results differ from the serial reference\n");
    return 1;
  }
  std::printf("all configurations bit-identical to the serial reference\n");
  return 0;
}
