#include "entdyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entdyn {
namespace {

void check_qubit_count(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count must be between 1 and " +
                                std::to_string(kMaxQubits) + ", got " +
                                std::to_string(n_qubits));
  }
}

double max_hermiticity_defect(const ComplexMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

// Index contribution of each compressed sub-index once scattered onto the
// given qubit positions. table[c] = OR of qubit_bit(n, qubits[k]) over the
// set bits k of c, with qubits[0] taken as the most significant position.
std::vector<std::uint64_t> scatter_table(int n_qubits, const std::vector<int>& qubits) {
  const std::size_t k = qubits.size();
  std::vector<std::uint64_t> table(std::size_t{1} << k, 0);
  for (std::uint64_t c = 0; c < table.size(); ++c) {
    std::uint64_t full = 0;
    for (std::size_t b = 0; b < k; ++b) {
      if (c & (std::uint64_t{1} << (k - 1 - b))) full |= qubit_bit(n_qubits, qubits[b]);
    }
    table[c] = full;
  }
  return table;
}

}  // namespace

PureState::PureState(int n_qubits, ComplexVector amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  check_qubit_count(n_qubits_);
  if (amplitudes_.size() != static_cast<Eigen::Index>(dim_for(n_qubits_))) {
    throw std::invalid_argument("amplitude vector has dimension " +
                                std::to_string(amplitudes_.size()) + ", expected " +
                                std::to_string(dim_for(n_qubits_)));
  }
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-12) {
    throw std::invalid_argument("state vector is not normalized");
  }
}

PureState PureState::basis_state(int n_qubits, std::uint64_t index) {
  check_qubit_count(n_qubits);
  if (index >= dim_for(n_qubits)) {
    throw std::invalid_argument("basis index out of range");
  }
  ComplexVector amp = ComplexVector::Zero(static_cast<Eigen::Index>(dim_for(n_qubits)));
  amp(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(n_qubits, std::move(amp));
}

DensityOperator PureState::projector() const {
  return DensityOperator(n_qubits_, amplitudes_ * amplitudes_.adjoint());
}

DensityOperator::DensityOperator(int n_qubits, ComplexMatrix matrix)
    : n_qubits_(n_qubits), matrix_(std::move(matrix)) {
  check_qubit_count(n_qubits_);
  const auto d = static_cast<Eigen::Index>(dim_for(n_qubits_));
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw std::invalid_argument("density matrix must be " + std::to_string(d) + "x" +
                                std::to_string(d));
  }
  if (max_hermiticity_defect(matrix_) > 1e-10) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace().real() - 1.0) > 1e-10 ||
      std::abs(matrix_.trace().imag()) > 1e-10) {
    throw std::invalid_argument("density matrix trace differs from 1");
  }
}

DensityOperator DensityOperator::from_matrix(int n_qubits, ComplexMatrix matrix) {
  DensityOperator rho(n_qubits, std::move(matrix));
  const RealVector eigs = hermitian_eigenvalues(rho.matrix());
  if (eigs(0) < -1e-9) {
    throw std::invalid_argument("density matrix has eigenvalue " +
                                std::to_string(eigs(0)) + " below the positivity floor");
  }
  return rho;
}

Bipartition::Bipartition(int n_qubits, std::vector<int> block_a)
    : n_qubits_(n_qubits), block_a_(std::move(block_a)), mask_a_(0) {
  check_qubit_count(n_qubits_);
  if (block_a_.empty()) throw std::invalid_argument("block A is empty");
  std::sort(block_a_.begin(), block_a_.end());
  for (std::size_t i = 0; i < block_a_.size(); ++i) {
    if (block_a_[i] < 0 || block_a_[i] >= n_qubits_) {
      throw std::invalid_argument("block A contains a qubit label out of range");
    }
    if (i > 0 && block_a_[i] == block_a_[i - 1]) {
      throw std::invalid_argument("block A contains a duplicate qubit label");
    }
  }
  const int m = static_cast<int>(block_a_.size());
  if (2 * m > n_qubits_) {
    throw std::invalid_argument("block A must be the smaller side of the cut");
  }
  if (2 * m == n_qubits_ && block_a_.front() != 0) {
    throw std::invalid_argument(
        "for an even split the canonical block is the one containing qubit 0");
  }
  for (int q : block_a_) mask_a_ |= qubit_bit(n_qubits_, q);
}

std::vector<int> Bipartition::block_b() const {
  std::vector<int> rest;
  rest.reserve(n_qubits_ - block_a_.size());
  for (int q = 0; q < n_qubits_; ++q) {
    if (!std::binary_search(block_a_.begin(), block_a_.end(), q)) rest.push_back(q);
  }
  return rest;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
  const int n = rho.n_qubits();
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  if (kept.empty()) throw std::invalid_argument("keep set is empty");
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] < 0 || kept[i] >= n) {
      throw std::invalid_argument("keep set contains a qubit label out of range");
    }
    if (i > 0 && kept[i] == kept[i - 1]) {
      throw std::invalid_argument("keep set contains a duplicate qubit label");
    }
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  }

  const auto kept_part = scatter_table(n, kept);
  const auto traced_part = scatter_table(n, traced);
  const auto d_out = static_cast<Eigen::Index>(kept_part.size());
  const ComplexMatrix& m = rho.matrix();

  ComplexMatrix out = ComplexMatrix::Zero(d_out, d_out);
  for (Eigen::Index r = 0; r < d_out; ++r) {
    for (Eigen::Index c = 0; c < d_out; ++c) {
      Complex acc = 0.0;
      for (std::uint64_t e : traced_part) {
        acc += m(static_cast<Eigen::Index>(kept_part[r] | e),
                 static_cast<Eigen::Index>(kept_part[c] | e));
      }
      out(r, c) = acc;
    }
  }
  return DensityOperator(static_cast<int>(kept.size()), std::move(out));
}

ComplexMatrix partial_transpose(const DensityOperator& rho, const Bipartition& cut) {
  if (cut.n_qubits() != rho.n_qubits()) {
    throw std::invalid_argument("cut and state have different qubit counts");
  }
  const ComplexMatrix& m = rho.matrix();
  const auto d = m.rows();
  const std::uint64_t mask = cut.mask_a();
  ComplexMatrix out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto ui = static_cast<std::uint64_t>(i);
      const auto uj = static_cast<std::uint64_t>(j);
      out(i, j) = m(static_cast<Eigen::Index>((ui & ~mask) | (uj & mask)),
                    static_cast<Eigen::Index>((uj & ~mask) | (ui & mask)));
    }
  }
  return out;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  if (max_hermiticity_defect(m) > 1e-8) {
    throw std::invalid_argument("matrix is too far from Hermitian to symmetrize");
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue solve failed to converge");
  }
  return solver.eigenvalues();
}

double purity(const DensityOperator& rho) { return rho.matrix().squaredNorm(); }

double fidelity_with_basis_state(const DensityOperator& rho, const std::string& bits) {
  if (static_cast<int>(bits.size()) != rho.n_qubits()) {
    throw std::invalid_argument("bitstring length differs from the qubit count");
  }
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring must be over {0,1}");
    index = (index << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return rho.matrix()(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)).real();
}

}  // namespace entdyn
