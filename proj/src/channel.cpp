#include "entdyn/channel.hpp"

#include "entdyn/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace entdyn {
namespace {

// Signed amplitude whose square (times the decay envelope) is p(t). Roots of
// p are exactly the roots of this factor, which crosses zero transversally,
// so bisection on its sign changes finds every root.
double amplitude_factor(const ChannelParams& params, double t) {
  const double half = 0.5 * params.d * t;
  return std::cos(half) + (params.lambda / params.d) * std::sin(half);
}

void apply_damping_on_qubit(ComplexMatrix& m, int n_qubits, int qubit, double p) {
  const double sqrt_p = std::sqrt(p);
  const double loss = 1.0 - p;
  const std::uint64_t bit = qubit_bit(n_qubits, qubit);
  const std::uint64_t dim = dim_for(n_qubits);
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(i);
    const auto i1 = static_cast<Eigen::Index>(i | bit);
    for (std::uint64_t j = 0; j < dim; ++j) {
      if (j & bit) continue;
      const auto j0 = static_cast<Eigen::Index>(j);
      const auto j1 = static_cast<Eigen::Index>(j | bit);
      const Complex r11 = m(i1, j1);
      m(i0, j0) += loss * r11;
      m(i1, j0) *= sqrt_p;
      m(i0, j1) *= sqrt_p;
      m(i1, j1) = p * r11;
    }
  }
}

}  // namespace

ChannelParams::ChannelParams(double gamma0_in, double lambda_in)
    : gamma0(gamma0_in), lambda(lambda_in), d(0.0) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(lambda < 2.0 * gamma0)) {
    throw std::invalid_argument(
        "lambda = " + std::to_string(lambda) + " is not below 2*gamma0 = " +
        std::to_string(2.0 * gamma0) +
        "; only the oscillatory strong-coupling regime is supported");
  }
  d = std::sqrt(2.0 * gamma0 * lambda - lambda * lambda);
}

double survival_probability(const ChannelParams& params, double t) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const double a = amplitude_factor(params, t);
  return std::exp(-params.lambda * t) * a * a;
}

std::vector<double> survival_roots(const ChannelParams& params, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  std::vector<double> roots;
  // The amplitude factor has period 4*pi/d with two zero crossings per
  // period; 16 probes per period cannot skip one.
  const double step = (4.0 * M_PI / params.d) / 16.0;
  double lo = 0.0;
  double f_lo = amplitude_factor(params, lo);
  while (lo < t_max) {
    double hi = std::min(lo + step, t_max);
    double f_hi = amplitude_factor(params, hi);
    if ((f_lo < 0.0) != (f_hi < 0.0)) {
      double a = lo, b = hi, f_a = f_lo;
      for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
        const double mid = 0.5 * (a + b);
        const double f_mid = amplitude_factor(params, mid);
        if ((f_a < 0.0) != (f_mid < 0.0)) {
          b = mid;
        } else {
          a = mid;
          f_a = f_mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    lo = hi;
    f_lo = f_hi;
  }
  return roots;
}

KrausPair kraus_pair_for(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("survival factor must lie in [0, 1]");
  }
  KrausPair pair;
  pair.p = p;
  pair.e0 = Eigen::Matrix2cd::Zero();
  pair.e0(0, 0) = 1.0;
  pair.e0(1, 1) = std::sqrt(p);
  pair.e1 = Eigen::Matrix2cd::Zero();
  pair.e1(0, 1) = std::sqrt(1.0 - p);
  return pair;
}

KrausPair kraus_pair(const ChannelParams& params, double t) {
  // p is a square times a positive envelope; clamp the roundoff excursion
  // above 1 at t = 0.
  return kraus_pair_for(std::min(1.0, survival_probability(params, t)));
}

DensityOperator apply_single_qubit(const DensityOperator& rho, const KrausPair& kraus) {
  if (rho.n_qubits() != 1) throw std::invalid_argument("state must be a single qubit");
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = kraus.e0 * m * kraus.e0.adjoint() + kraus.e1 * m * kraus.e1.adjoint();
  return DensityOperator(1, std::move(out));
}

DensityOperator apply_channel_sequential(const DensityOperator& rho, const KrausPair& kraus) {
  ComplexMatrix m = rho.matrix();
  for (int q = 0; q < rho.n_qubits(); ++q) {
    apply_damping_on_qubit(m, rho.n_qubits(), q, kraus.p);
  }
  return DensityOperator(rho.n_qubits(), std::move(m));
}

DensityOperator apply_channel_full_kraus(const DensityOperator& rho, const KrausPair& kraus) {
  const int n = rho.n_qubits();
  if (n > 4) {
    throw std::invalid_argument(
        "the full Kraus-string sum is a reference path capped at 4 qubits");
  }
  const auto d = static_cast<Eigen::Index>(dim_for(n));
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::uint64_t s = 0; s < dim_for(n); ++s) {
    ComplexMatrix op = ComplexMatrix::Ones(1, 1);
    for (int q = 0; q < n; ++q) {
      const bool jump = (s & qubit_bit(n, q)) != 0;
      op = tensor_product(op, jump ? kraus.e1 : kraus.e0);
    }
    out += op * rho.matrix() * op.adjoint();
  }
  return DensityOperator(n, std::move(out));
}

}  // namespace entdyn
