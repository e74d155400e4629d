#pragma once

#include <vector>

#include "entdyn/types.hpp"

namespace entdyn {

// Amplitude damping of a two-level system coupled to a lossy cavity mode in
// the strong-coupling regime (spectral width lambda below twice the vacuum
// decay rate gamma0). Time is the dimensionless product gamma0 * t; the code
// fixes gamma0 = 1 and exposes only the ratio lambda / gamma0.
struct ChannelParams {
  double gamma0;
  double lambda;
  // Oscillation rate of the excited-state amplitude, sqrt(2*gamma0*lambda - lambda^2).
  double d;

  ChannelParams(double gamma0_in, double lambda_in);
};

// The two Kraus operators of the single-qubit channel at a fixed time,
// parameterized by the excited-population survival factor p in [0, 1]:
// E0 = diag(1, sqrt(p)), E1 = sqrt(1 - p) |0><1|.
struct KrausPair {
  Eigen::Matrix2cd e0;
  Eigen::Matrix2cd e1;
  double p;
};

// Survival factor p(t) = exp(-lambda t) [cos(d t / 2) + (lambda / d) sin(d t / 2)]^2.
double survival_probability(const ChannelParams& params, double t);

// All zeros of p(t) in (0, t_max], ascending, located by bracketed bisection
// on a grid fine enough to isolate each sign change of the oscillating
// amplitude factor.
std::vector<double> survival_roots(const ChannelParams& params, double t_max);

KrausPair kraus_pair(const ChannelParams& params, double t);
KrausPair kraus_pair_for(double p);

// One qubit: rho -> E0 rho E0^dag + E1 rho E1^dag.
DensityOperator apply_single_qubit(const DensityOperator& rho, const KrausPair& kraus);

// n qubits, each coupled to its own reservoir: the product channel applied
// qubit by qubit with in-place 2x2 block updates, O(n 4^n) total. Always call
// this on the t = 0 state with the pair for the target time; the family of
// maps is not divisible, so composing two applications is not the map for the
// summed time.
DensityOperator apply_channel_sequential(const DensityOperator& rho, const KrausPair& kraus);

// Same channel as a literal sum over all 2^n tensor-product Kraus strings.
// Exponential cost; reference implementation, capped at 4 qubits.
DensityOperator apply_channel_full_kraus(const DensityOperator& rho, const KrausPair& kraus);

}  // namespace entdyn
