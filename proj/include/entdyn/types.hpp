#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace entdyn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Dense simulation is capped at 8 qubits (complex double, 256x256 operators).
inline constexpr int kMaxQubits = 8;

constexpr std::uint64_t dim_for(int n_qubits) { return 1ULL << n_qubits; }

// Qubit 0 occupies the most significant bit of a computational-basis index:
// for n = 3 the basis state |q0 q1 q2> = |110> has index 6.
constexpr std::uint64_t qubit_bit(int n_qubits, int qubit) {
  return 1ULL << (n_qubits - 1 - qubit);
}

class DensityOperator;

// Normalized n-qubit state vector in the computational basis.
class PureState {
 public:
  PureState(int n_qubits, ComplexVector amplitudes);

  static PureState basis_state(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

  DensityOperator projector() const;

 private:
  int n_qubits_;
  ComplexVector amplitudes_;
};

// Density matrix with validated invariants. The constructor performs the
// cheap checks (Hermiticity, unit trace); `from_matrix` additionally runs an
// eigensolve to confirm positivity and is meant for matrices of unknown
// provenance. Hot paths construct from operations that preserve the
// invariants by design.
class DensityOperator {
 public:
  DensityOperator(int n_qubits, ComplexMatrix matrix);

  // Full validation including positive semidefiniteness (eigenvalues above
  // the -1e-9 numerical floor).
  static DensityOperator from_matrix(int n_qubits, ComplexMatrix matrix);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  int n_qubits_;
  ComplexMatrix matrix_;
};

// An unordered cut of the n qubits into block A and its complement. Only the
// smaller block is stored; |A| <= n - |A| always holds, and when the blocks
// have equal size the block containing qubit 0 is the canonical
// representative, so each cut appears exactly once in enumerations.
class Bipartition {
 public:
  Bipartition(int n_qubits, std::vector<int> block_a);

  int n_qubits() const { return n_qubits_; }
  int block_size() const { return static_cast<int>(block_a_.size()); }
  const std::vector<int>& block_a() const { return block_a_; }
  std::vector<int> block_b() const;

  // OR of the basis-index bits of block A's qubits.
  std::uint64_t mask_a() const { return mask_a_; }

 private:
  int n_qubits_;
  std::vector<int> block_a_;
  std::uint64_t mask_a_;
};

}  // namespace entdyn
