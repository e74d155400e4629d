#pragma once

#include <string>
#include <vector>

#include "entdyn/types.hpp"

namespace entdyn {

// Kronecker product, row-major block layout: out((i1,i2),(j1,j2)) = a(i1,j1) * b(i2,j2).
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Reduced state on `keep` (ascending qubit labels); the remaining qubits are
// traced out. Keeping every qubit returns a copy.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep);

// Transpose of the indices of block A only. The result is Hermitian but in
// general not positive, so it is returned as a plain matrix.
ComplexMatrix partial_transpose(const DensityOperator& rho, const Bipartition& cut);

// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
// before the solve; deviations from Hermiticity beyond 1e-8 throw.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

// Tr rho^2 via the squared Frobenius norm (valid for Hermitian rho).
double purity(const DensityOperator& rho);

// <b|rho|b> for the basis state written as a bitstring, qubit 0 first.
double fidelity_with_basis_state(const DensityOperator& rho, const std::string& bits);

}  // namespace entdyn
