#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "entdyn/types.hpp"

namespace entdyn {

// Recipe for an initial pure state. Parsed from the textual forms
//   ghz | w | hs | basis:BITS | haar | file:PATH | optimized:TAG
// where BITS is a bitstring with qubit 0 first, PATH a state file and TAG the
// name under which an optimizer run stored its result.
struct StateSpec {
  enum class Kind { ghz, w, hs, basis, haar_random, file, optimized };

  Kind kind = Kind::haar_random;
  int n_qubits = 0;
  std::string detail;  // basis: bitstring; file: path; optimized: tag

  // True when realization consumes randomness, i.e. each ensemble sample
  // gets a fresh draw.
  bool is_random() const { return kind == Kind::haar_random; }

  std::string text() const;
};

StateSpec parse_state_spec(const std::string& text, int n_qubits);

// Mixture of a pure-state recipe with white noise: x |psi><psi| + (1 - x) / 2^n * Id.
struct MixedFamilySpec {
  StateSpec base;
  double x = 1.0;
};

// Closed-form specs only (ghz, w, hs, basis); hs requires exactly 4 qubits.
PureState make_named(const StateSpec& spec);

// One draw from the unitarily invariant distribution on the sphere: a complex
// Ginibre matrix is QR-factorized and the Q column phases are fixed by the
// R diagonal, which makes Q the first column block of a uniformly random
// unitary; the state is that first column applied to |0...0>.
PureState haar_random_state(int n_qubits, std::uint64_t seed);

// Realize any spec. The seed is consumed only by haar draws; file and
// optimized specs read from disk (optimized ones from states_dir).
PureState realize_state(const StateSpec& spec, std::uint64_t seed,
                        const std::filesystem::path& states_dir);

DensityOperator make_mixed(const PureState& base, double x);

// UTF-8 JSON, {"n": ..., "amplitudes": [[re, im], ...]} with 2^n entries in
// ascending basis order. Amplitudes round-trip bit exactly.
void save_state(const PureState& psi, const std::filesystem::path& path);
PureState load_state(const std::filesystem::path& path);

// Where an optimizer run stores and a spec "optimized:TAG" finds a state.
std::filesystem::path optimized_state_path(const std::filesystem::path& states_dir,
                                           const std::string& tag);

}  // namespace entdyn
