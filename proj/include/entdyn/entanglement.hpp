#pragma once

#include <string>
#include <vector>

#include "entdyn/types.hpp"

namespace entdyn {

// Eigenvalues of a partial transpose above this magnitude count as negative;
// smaller excursions are eigensolver noise on separable states.
inline constexpr double kNegativityFloor = 1e-12;

// Every bipartition of n qubits, grouped by the size m of the smaller block,
// m = 1 .. floor(n/2). Each cut appears exactly once: for even n and m = n/2
// only the block containing qubit 0 is kept. Built once per run and shared
// read-only by all workers.
struct BipartitionFamilies {
  int n_qubits = 0;
  std::vector<std::vector<Bipartition>> families;  // families[m - 1]

  int family_count() const { return static_cast<int>(families.size()); }
  const std::vector<Bipartition>& family(int m) const { return families.at(m - 1); }
};

BipartitionFamilies enumerate_bipartitions(int n_qubits);

// Negativity across one cut, normalized so the maximally entangled state of
// the 2^m x 2^m cut scores 1: N = 2 / (2^m - 1) * sum of |eig| over the
// negative eigenvalues of the partial transpose.
double negativity(const DensityOperator& rho, const Bipartition& cut);

struct GlobalEntanglement {
  double global = 0.0;                // mean of the family means
  std::vector<double> per_family;     // per_family[m - 1] = mean negativity at block size m
};

// Two-level average: negativity is averaged within each family of equal
// block size, then the family means are averaged.
GlobalEntanglement global_entanglement(const DensityOperator& rho,
                                       const BipartitionFamilies& families);

// Purity-based correlation measure for one cut:
// 2 Tr rho^2 - Tr rho_A^2 - Tr rho_B^2. Negative values are meaningful for
// mixed states. On pure states it equals the squared concurrence of the cut.
double e_mb(const DensityOperator& rho, const Bipartition& cut);

// e_mb aggregated with the same two-level average as the negativity.
double e_mb_global(const DensityOperator& rho, const BipartitionFamilies& families);

// sqrt(2 (1 - Tr rho_A^2)) for a pure state across one cut.
double concurrence_pure(const PureState& psi, const Bipartition& cut);

// (D / (D - 1)) (1 - Tr rho^2), D = 2^n; 0 for pure states, 1 for maximally mixed.
double linear_entropy(const DensityOperator& rho);

// Which observables an evolution records. Negativity is always the backbone;
// the rest are optional columns.
struct MeasureSet {
  bool negativity = true;
  bool e_mb = false;
  bool linear_entropy = false;
  bool purity = false;
};

// One state's worth of recorded observables, flattened in the canonical
// channel order produced by measure_names().
struct MeasureVector {
  std::vector<double> values;
};

// Canonical channel names for a given qubit count and measure selection:
// N_global, N_m1 .. N_m<floor(n/2)>, E_MB, S_L, purity (enabled ones only,
// in this order).
std::vector<std::string> measure_names(int n_qubits, const MeasureSet& set);

MeasureVector evaluate_measures(const DensityOperator& rho,
                                const BipartitionFamilies& families,
                                const MeasureSet& set);

}  // namespace entdyn
