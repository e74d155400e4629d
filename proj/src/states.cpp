#include "entdyn/states.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "entdyn/io.hpp"
#include "entdyn/rng.hpp"

namespace entdyn {
namespace {

bool valid_tag(const std::string& tag) {
  if (tag.empty()) return false;
  for (char c : tag) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::string StateSpec::text() const {
  switch (kind) {
    case Kind::ghz: return "ghz";
    case Kind::w: return "w";
    case Kind::hs: return "hs";
    case Kind::basis: return "basis:" + detail;
    case Kind::haar_random: return "haar";
    case Kind::file: return "file:" + detail;
    case Kind::optimized: return "optimized:" + detail;
  }
  throw std::logic_error("unreachable");
}

StateSpec parse_state_spec(const std::string& text, int n_qubits) {
  StateSpec spec;
  spec.n_qubits = n_qubits;
  if (text == "ghz") {
    spec.kind = StateSpec::Kind::ghz;
  } else if (text == "w") {
    spec.kind = StateSpec::Kind::w;
  } else if (text == "hs") {
    spec.kind = StateSpec::Kind::hs;
  } else if (text == "haar") {
    spec.kind = StateSpec::Kind::haar_random;
  } else if (text.rfind("basis:", 0) == 0) {
    spec.kind = StateSpec::Kind::basis;
    spec.detail = text.substr(6);
    if (spec.detail.empty()) throw std::invalid_argument("basis spec needs a bitstring");
  } else if (text.rfind("file:", 0) == 0) {
    spec.kind = StateSpec::Kind::file;
    spec.detail = text.substr(5);
    if (spec.detail.empty()) throw std::invalid_argument("file spec needs a path");
  } else if (text.rfind("optimized:", 0) == 0) {
    spec.kind = StateSpec::Kind::optimized;
    spec.detail = text.substr(10);
    if (!valid_tag(spec.detail)) {
      throw std::invalid_argument("optimized spec needs a tag over [A-Za-z0-9_-]");
    }
  } else {
    throw std::invalid_argument(
        "unknown state spec '" + text +
        "'; expected ghz | w | hs | basis:BITS | haar | file:PATH | optimized:TAG");
  }
  return spec;
}

PureState make_named(const StateSpec& spec) {
  const int n = spec.n_qubits;
  const auto d = static_cast<Eigen::Index>(dim_for(n));
  switch (spec.kind) {
    case StateSpec::Kind::ghz: {
      if (n < 2) throw std::invalid_argument("ghz needs at least 2 qubits");
      ComplexVector amp = ComplexVector::Zero(d);
      amp(0) = amp(d - 1) = 1.0 / std::sqrt(2.0);
      return PureState(n, std::move(amp));
    }
    case StateSpec::Kind::w: {
      if (n < 2) throw std::invalid_argument("w needs at least 2 qubits");
      ComplexVector amp = ComplexVector::Zero(d);
      const double a = 1.0 / std::sqrt(static_cast<double>(n));
      for (int q = 0; q < n; ++q) amp(static_cast<Eigen::Index>(qubit_bit(n, q))) = a;
      return PureState(n, std::move(amp));
    }
    case StateSpec::Kind::hs: {
      // Four-qubit state built from the pair states |0011> and permutations
      // weighted by cube roots of unity; every one- and two-qubit marginal is
      // maximally mixed.
      if (n != 4) throw std::invalid_argument("hs is a 4-qubit state");
      const double s = 1.0 / std::sqrt(6.0);
      const Complex w3 = std::polar(1.0, 2.0 * M_PI / 3.0);
      ComplexVector amp = ComplexVector::Zero(d);
      amp(0b0011) = amp(0b1100) = s;
      amp(0b1010) = amp(0b0101) = s * w3;
      amp(0b1001) = amp(0b0110) = s * w3 * w3;
      return PureState(n, std::move(amp));
    }
    case StateSpec::Kind::basis: {
      if (static_cast<int>(spec.detail.size()) != n) {
        throw std::invalid_argument("basis bitstring length differs from the qubit count");
      }
      std::uint64_t index = 0;
      for (char c : spec.detail) {
        if (c != '0' && c != '1') {
          throw std::invalid_argument("basis bitstring must be over {0,1}");
        }
        index = (index << 1) | static_cast<std::uint64_t>(c - '0');
      }
      return PureState::basis_state(n, index);
    }
    default:
      throw std::invalid_argument("state spec '" + spec.text() +
                                  "' is not a closed-form state");
  }
}

PureState haar_random_state(int n_qubits, std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("haar draws need 1 to " + std::to_string(kMaxQubits) +
                                " qubits");
  }
  const auto d = static_cast<Eigen::Index>(dim_for(n_qubits));
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im) * M_SQRT1_2;
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexVector psi = qr.householderQ() * ComplexVector::Unit(d, 0);
  const Complex r00 = qr.matrixQR()(0, 0);
  if (std::abs(r00) > 0.0) psi *= r00 / std::abs(r00);
  psi /= psi.norm();
  return PureState(n_qubits, std::move(psi));
}

PureState realize_state(const StateSpec& spec, std::uint64_t seed,
                        const std::filesystem::path& states_dir) {
  switch (spec.kind) {
    case StateSpec::Kind::haar_random:
      return haar_random_state(spec.n_qubits, seed);
    case StateSpec::Kind::file:
      return load_state(spec.detail);
    case StateSpec::Kind::optimized:
      return load_state(optimized_state_path(states_dir, spec.detail));
    default:
      return make_named(spec);
  }
}

DensityOperator make_mixed(const PureState& base, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("mixing weight x must lie in [0, 1]");
  }
  // The x = 1 endpoint is the projector itself, bit for bit.
  if (x == 1.0) return base.projector();
  const auto d = base.dim();
  ComplexMatrix m = x * (base.amplitudes() * base.amplitudes().adjoint());
  m += ((1.0 - x) / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
  return DensityOperator(base.n_qubits(), std::move(m));
}

void save_state(const PureState& psi, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["n"] = psi.n_qubits();
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < psi.dim(); ++i) {
    amps.push_back({psi.amplitudes()(i).real(), psi.amplitudes()(i).imag()});
  }
  doc["amplitudes"] = std::move(amps);
  atomic_write_file(path, doc.dump(2) + "\n");
}

PureState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open state file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("state file " + path.string() + " is not valid JSON: " +
                             e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("amplitudes") ||
      !doc["n"].is_number_integer() || !doc["amplitudes"].is_array()) {
    throw std::runtime_error("state file " + path.string() +
                             " must be {\"n\": int, \"amplitudes\": [[re, im], ...]}");
  }
  const int n = doc["n"].get<int>();
  if (n < 1 || n > kMaxQubits) {
    throw std::runtime_error("state file qubit count out of range");
  }
  const auto& amps = doc["amplitudes"];
  if (amps.size() != dim_for(n)) {
    throw std::runtime_error("state file amplitude count differs from 2^n");
  }
  ComplexVector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto& entry = amps[i];
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number()) {
      throw std::runtime_error("state file amplitudes must be [re, im] pairs");
    }
    v(static_cast<Eigen::Index>(i)) = Complex(entry[0].get<double>(), entry[1].get<double>());
  }
  const double norm2 = v.squaredNorm();
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
    throw std::runtime_error("state file vector norm deviates from 1 beyond 1e-9");
  }
  // Within the window between the hard bound and the constructor tolerance,
  // renormalize; exactly stored states pass through bit identical.
  if (std::abs(norm2 - 1.0) > 1e-12) v /= std::sqrt(norm2);
  return PureState(n, std::move(v));
}

std::filesystem::path optimized_state_path(const std::filesystem::path& states_dir,
                                           const std::string& tag) {
  if (!valid_tag(tag)) {
    throw std::invalid_argument("optimized state tag must be over [A-Za-z0-9_-]");
  }
  return states_dir / (tag + ".state.json");
}

}  // namespace entdyn
