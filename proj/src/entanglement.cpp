#include "entdyn/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entdyn/linalg.hpp"

namespace entdyn {
namespace {

void append_subsets(int n_qubits, int m, int first, std::vector<int>& current,
                    std::vector<Bipartition>& out) {
  if (static_cast<int>(current.size()) == m) {
    // For an even split only blocks containing qubit 0 are canonical; the
    // recursion below never produces the others because it starts at 0.
    out.emplace_back(n_qubits, current);
    return;
  }
  for (int q = first; q < n_qubits; ++q) {
    current.push_back(q);
    append_subsets(n_qubits, m, q + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

BipartitionFamilies enumerate_bipartitions(int n_qubits) {
  if (n_qubits < 2 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("bipartitions need 2 to " + std::to_string(kMaxQubits) +
                                " qubits");
  }
  BipartitionFamilies result;
  result.n_qubits = n_qubits;
  for (int m = 1; 2 * m <= n_qubits; ++m) {
    std::vector<Bipartition> family;
    std::vector<int> scratch;
    if (2 * m == n_qubits) {
      // Fix qubit 0 in the block and choose the remaining m - 1 labels.
      scratch.push_back(0);
      append_subsets(n_qubits, m, 1, scratch, family);
    } else {
      append_subsets(n_qubits, m, 0, scratch, family);
    }
    result.families.push_back(std::move(family));
  }
  return result;
}

double negativity(const DensityOperator& rho, const Bipartition& cut) {
  const RealVector eigs = hermitian_eigenvalues(partial_transpose(rho, cut));
  double total = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs(i) < -kNegativityFloor) total -= eigs(i);
  }
  const double scale = 2.0 / (std::pow(2.0, cut.block_size()) - 1.0);
  return scale * total;
}

GlobalEntanglement global_entanglement(const DensityOperator& rho,
                                       const BipartitionFamilies& families) {
  if (families.n_qubits != rho.n_qubits()) {
    throw std::invalid_argument("families were enumerated for a different qubit count");
  }
  GlobalEntanglement result;
  for (const auto& family : families.families) {
    double acc = 0.0;
    for (const Bipartition& cut : family) acc += negativity(rho, cut);
    result.per_family.push_back(acc / static_cast<double>(family.size()));
  }
  double acc = 0.0;
  for (double v : result.per_family) acc += v;
  result.global = acc / static_cast<double>(result.per_family.size());
  return result;
}

double e_mb(const DensityOperator& rho, const Bipartition& cut) {
  if (cut.n_qubits() != rho.n_qubits()) {
    throw std::invalid_argument("cut and state have different qubit counts");
  }
  const double total = purity(rho);
  const double part_a = purity(partial_trace(rho, cut.block_a()));
  const double part_b = purity(partial_trace(rho, cut.block_b()));
  return 2.0 * total - part_a - part_b;
}

double e_mb_global(const DensityOperator& rho, const BipartitionFamilies& families) {
  if (families.n_qubits != rho.n_qubits()) {
    throw std::invalid_argument("families were enumerated for a different qubit count");
  }
  double family_acc = 0.0;
  for (const auto& family : families.families) {
    double acc = 0.0;
    for (const Bipartition& cut : family) acc += e_mb(rho, cut);
    family_acc += acc / static_cast<double>(family.size());
  }
  return family_acc / static_cast<double>(families.families.size());
}

double concurrence_pure(const PureState& psi, const Bipartition& cut) {
  if (cut.n_qubits() != psi.n_qubits()) {
    throw std::invalid_argument("cut and state have different qubit counts");
  }
  const double part = purity(partial_trace(psi.projector(), cut.block_a()));
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - part)));
}

double linear_entropy(const DensityOperator& rho) {
  const double dim = static_cast<double>(dim_for(rho.n_qubits()));
  const double value = dim / (dim - 1.0) * (1.0 - purity(rho));
  return std::clamp(value, 0.0, 1.0);
}

std::vector<std::string> measure_names(int n_qubits, const MeasureSet& set) {
  std::vector<std::string> names;
  if (set.negativity) {
    names.push_back("N_global");
    for (int m = 1; 2 * m <= n_qubits; ++m) names.push_back("N_m" + std::to_string(m));
  }
  if (set.e_mb) names.push_back("E_MB");
  if (set.linear_entropy) names.push_back("S_L");
  if (set.purity) names.push_back("purity");
  return names;
}

MeasureVector evaluate_measures(const DensityOperator& rho,
                                const BipartitionFamilies& families,
                                const MeasureSet& set) {
  MeasureVector out;
  if (set.negativity) {
    const GlobalEntanglement ge = global_entanglement(rho, families);
    out.values.push_back(ge.global);
    out.values.insert(out.values.end(), ge.per_family.begin(), ge.per_family.end());
  }
  if (set.e_mb) out.values.push_back(e_mb_global(rho, families));
  if (set.linear_entropy) out.values.push_back(linear_entropy(rho));
  if (set.purity) out.values.push_back(purity(rho));
  return out;
}

}  // namespace entdyn
