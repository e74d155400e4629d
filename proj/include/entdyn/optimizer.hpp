#pragma once

#include <cstdint>
#include <vector>

#include "entdyn/entanglement.hpp"
#include "entdyn/montecarlo.hpp"
#include "entdyn/types.hpp"

namespace entdyn {

// Stochastic hill climb on the unit sphere with step-size annealing:
// candidates are normalize(psi + step * eta) for a fresh complex Gaussian
// eta, accepted only on strict improvement. After stall_window consecutive
// proposals with no improvement of at least improvement_tol the step shrinks
// by step_shrink; the climb stops when the step falls below min_step or the
// iteration budget runs out. Restarts are independent and seeded from the
// master seed and the restart index.
struct OptimizerConfig {
  int n_qubits = 4;
  int restarts = 16;
  int max_iterations = 6000;
  double initial_step = 0.5;
  double step_shrink = 0.5;
  double improvement_tol = 1e-9;
  int stall_window = 200;
  double min_step = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RestartSummary {
  int restart_index;
  std::uint64_t seed;
  double best_value;
  int iterations;
};

struct OptimizationResult {
  PureState best_state;
  double best_value;
  int best_restart;
  // Best-so-far objective after each iteration of the winning restart.
  std::vector<double> trace;
  std::vector<RestartSummary> restarts;
};

// The objective: exactly the global entanglement of the candidate's
// projector, shared with every other consumer of that measure.
double evaluate_candidate(const PureState& psi, const BipartitionFamilies& families);

OptimizationResult maximize_global_entanglement(const OptimizerConfig& config,
                                                Execution exec = Execution::parallel);

}  // namespace entdyn
