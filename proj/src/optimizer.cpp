#include "entdyn/optimizer.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "entdyn/rng.hpp"
#include "entdyn/states.hpp"

namespace entdyn {
namespace {

struct ClimbResult {
  ComplexVector state;
  double value = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

ClimbResult climb(const OptimizerConfig& config, const BipartitionFamilies& families,
                  std::uint64_t restart_seed) {
  const int n = config.n_qubits;
  const auto d = static_cast<Eigen::Index>(dim_for(n));

  ClimbResult result;
  result.state = haar_random_state(n, mix_seed(restart_seed, 0)).amplitudes();
  result.value = evaluate_candidate(PureState(n, result.state), families);
  result.trace.reserve(static_cast<std::size_t>(config.max_iterations));

  Rng rng(mix_seed(restart_seed, 1));
  std::normal_distribution<double> gauss(0.0, 1.0);

  double step = config.initial_step;
  int stall = 0;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (step < config.min_step) break;
    ComplexVector candidate(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      candidate(i) = result.state(i) + step * Complex(re, im);
    }
    candidate /= candidate.norm();
    const double value = evaluate_candidate(PureState(n, candidate), families);
    if (value > result.value) {
      if (value - result.value >= config.improvement_tol) {
        stall = 0;
      } else {
        ++stall;
      }
      result.state = std::move(candidate);
      result.value = value;
    } else {
      ++stall;
    }
    if (stall >= config.stall_window) {
      step *= config.step_shrink;
      stall = 0;
    }
    result.trace.push_back(result.value);
    result.iterations = iter + 1;
  }
  return result;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (n_qubits < 2 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("optimizer supports 2 to " + std::to_string(kMaxQubits) +
                                " qubits");
  }
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (max_iterations < 1) throw std::invalid_argument("iteration budget must be positive");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial step must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    throw std::invalid_argument("step shrink factor must lie in (0, 1)");
  }
  if (!(improvement_tol >= 0.0)) {
    throw std::invalid_argument("improvement tolerance must be nonnegative");
  }
  if (stall_window < 1) throw std::invalid_argument("stall window must be positive");
  if (!(min_step > 0.0 && min_step <= initial_step)) {
    throw std::invalid_argument("min step must be positive and at most the initial step");
  }
}

double evaluate_candidate(const PureState& psi, const BipartitionFamilies& families) {
  return global_entanglement(psi.projector(), families).global;
}

OptimizationResult maximize_global_entanglement(const OptimizerConfig& config,
                                                Execution exec) {
  config.validate();
  const BipartitionFamilies families = enumerate_bipartitions(config.n_qubits);

  std::vector<ClimbResult> climbs(static_cast<std::size_t>(config.restarts));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config.restarts));
  for (int r = 0; r < config.restarts; ++r) {
    seeds[static_cast<std::size_t>(r)] = mix_seed(config.seed, static_cast<std::uint64_t>(r));
  }

  std::mutex guard;
  std::string failure;
  bool failed = false;
  auto run_one = [&](int r) {
    try {
      climbs[static_cast<std::size_t>(r)] =
          climb(config, families, seeds[static_cast<std::size_t>(r)]);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(guard);
      failed = true;
      failure = e.what();
    }
  };

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < config.restarts; ++r) run_one(r);
  } else {
    for (int r = 0; r < config.restarts; ++r) run_one(r);
  }
  if (failed) throw std::runtime_error("optimizer restart failed: " + failure);

  // Winner by value; ties go to the lowest restart index so the outcome is
  // independent of scheduling.
  int best = 0;
  for (int r = 1; r < config.restarts; ++r) {
    if (climbs[static_cast<std::size_t>(r)].value > climbs[static_cast<std::size_t>(best)].value) {
      best = r;
    }
  }

  const ClimbResult& winner = climbs[static_cast<std::size_t>(best)];
  OptimizationResult result{PureState(config.n_qubits, winner.state),
                            winner.value,
                            best,
                            winner.trace,
                            {}};
  result.restarts.reserve(climbs.size());
  for (int r = 0; r < config.restarts; ++r) {
    const auto& c = climbs[static_cast<std::size_t>(r)];
    result.restarts.push_back(RestartSummary{r, seeds[static_cast<std::size_t>(r)], c.value,
                                             c.iterations});
  }
  return result;
}

}  // namespace entdyn
