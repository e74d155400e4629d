#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "entdyn/entanglement.hpp"
#include "entdyn/linalg.hpp"
#include "entdyn/rng.hpp"
#include "entdyn/states.hpp"
#include "oracles.hpp"

using namespace entdyn;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("entdyn_states_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("states") {

TEST_CASE("state specs parse and print all forms") {
  CHECK(parse_state_spec("ghz", 3).kind == StateSpec::Kind::ghz);
  CHECK(parse_state_spec("w", 4).kind == StateSpec::Kind::w);
  CHECK(parse_state_spec("hs", 4).kind == StateSpec::Kind::hs);
  CHECK(parse_state_spec("haar", 5).is_random());
  const StateSpec basis = parse_state_spec("basis:0110", 4);
  CHECK(basis.kind == StateSpec::Kind::basis);
  CHECK(basis.detail == "0110");
  CHECK(basis.text() == "basis:0110");
  CHECK(parse_state_spec("file:/tmp/a.json", 3).detail == "/tmp/a.json");
  CHECK(parse_state_spec("optimized:me5", 5).detail == "me5");

  CHECK_THROWS_AS(parse_state_spec("bell", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_state_spec("basis:", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_state_spec("optimized:../evil", 4), std::invalid_argument);
  CHECK_THROWS_AS(parse_state_spec("", 2), std::invalid_argument);
}

TEST_CASE("named states have the advertised amplitudes") {
  const PureState ghz = make_named(parse_state_spec("ghz", 3));
  CHECK(ghz.amplitudes()(0).real() == doctest::Approx(M_SQRT1_2));
  CHECK(ghz.amplitudes()(7).real() == doctest::Approx(M_SQRT1_2));
  CHECK(ghz.amplitudes().cwiseAbs().sum() == doctest::Approx(2.0 * M_SQRT1_2));

  const PureState w = make_named(parse_state_spec("w", 3));
  for (int q = 0; q < 3; ++q) {
    CHECK(w.amplitudes()(static_cast<Eigen::Index>(qubit_bit(3, q))).real() ==
          doctest::Approx(1.0 / std::sqrt(3.0)));
  }

  const PureState basis = make_named(parse_state_spec("basis:110", 3));
  CHECK(fidelity_with_basis_state(basis.projector(), "110") == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_named(parse_state_spec("hs", 3)), std::invalid_argument);
  CHECK_THROWS_AS(make_named(parse_state_spec("basis:12", 2)), std::invalid_argument);
  CHECK_THROWS_AS(make_named(parse_state_spec("basis:01", 3)), std::invalid_argument);
  CHECK_THROWS_AS(make_named(parse_state_spec("haar", 3)), std::invalid_argument);
}

TEST_CASE("the 4-qubit hs state has maximally mixed marginals") {
  const PureState hs = make_named(parse_state_spec("hs", 4));
  const DensityOperator rho = hs.projector();
  for (int q = 0; q < 4; ++q) {
    const ComplexMatrix marginal = partial_trace(rho, {q}).matrix();
    CHECK((marginal - 0.5 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("haar draws are deterministic per seed and distinct across seeds") {
  const PureState a = haar_random_state(4, 7);
  const PureState b = haar_random_state(4, 7);
  CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
  const PureState c = haar_random_state(4, 8);
  CHECK((a.amplitudes() - c.amplitudes()).cwiseAbs().maxCoeff() > 1e-3);
  CHECK(a.amplitudes().squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(haar_random_state(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(haar_random_state(9, 0), std::invalid_argument);
  CHECK(haar_random_state(1, 0).amplitudes().squaredNorm() ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("haar moments: single-qubit marginal purity averages 2/3 at 3 qubits") {
  // Unitary-invariance landmark: the mean marginal purity of a Haar state is
  // (D/2 + 2) / (D + 1) with D = 8, i.e. 2/3.
  const int samples = 2000;
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    const PureState psi = haar_random_state(3, mix_seed(909, static_cast<std::uint64_t>(s)));
    const DensityOperator rho = psi.projector();
    double per_state = 0.0;
    for (int q = 0; q < 3; ++q) per_state += purity(partial_trace(rho, {q}));
    acc += per_state / 3.0;
  }
  CHECK(acc / samples == doctest::Approx(2.0 / 3.0).epsilon(0.015));
}

TEST_CASE("haar overlaps match the reference sampler's moments") {
  // |<0|psi>|^2 has mean 1/D and variance (D-1)/(D^2 (D+1)); both samplers
  // must land in the same band.
  const int n = 4;
  const Eigen::Index dim = 16;
  const int samples = 4000;
  double lib_mean = 0.0, ref_mean = 0.0, lib_sq = 0.0, ref_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t seed = mix_seed(1234, static_cast<std::uint64_t>(s));
    const double lib = std::norm(haar_random_state(n, seed).amplitudes()(0));
    const double ref = std::norm(oracles::gaussian_unit_vector(dim, seed)(0));
    lib_mean += lib;
    ref_mean += ref;
    lib_sq += lib * lib;
    ref_sq += ref * ref;
  }
  lib_mean /= samples;
  ref_mean /= samples;
  const double expected_mean = 1.0 / static_cast<double>(dim);
  const double expected_var =
      (dim - 1.0) / (static_cast<double>(dim) * dim * (dim + 1.0));
  // Standard error of the mean is about 9e-4 at this sample count.
  CHECK(std::abs(lib_mean - expected_mean) < 4e-3);
  CHECK(std::abs(ref_mean - expected_mean) < 4e-3);
  const double lib_var = lib_sq / samples - lib_mean * lib_mean;
  const double ref_var = ref_sq / samples - ref_mean * ref_mean;
  CHECK(lib_var == doctest::Approx(expected_var).epsilon(0.25));
  CHECK(ref_var == doctest::Approx(expected_var).epsilon(0.25));
}

TEST_CASE("state files round-trip bit exactly") {
  const auto dir = scratch_dir("roundtrip");
  const PureState psi = haar_random_state(3, 31337);
  const auto path = dir / "psi.state.json";
  save_state(psi, path);
  const PureState back = load_state(path);
  REQUIRE(back.n_qubits() == 3);
  CHECK((back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("state files are validated on load") {
  const auto dir = scratch_dir("validation");

  const auto bad_json = dir / "bad.json";
  std::ofstream(bad_json) << "{ not json";
  CHECK_THROWS_WITH_AS(load_state(bad_json),
                       doctest::Contains(bad_json.string().c_str()), std::runtime_error);

  const auto missing = dir / "missing.json";
  CHECK_THROWS_AS(load_state(missing), std::runtime_error);

  const auto short_file = dir / "short.json";
  std::ofstream(short_file) << R"({"n": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]})";
  CHECK_THROWS_AS(load_state(short_file), std::runtime_error);

  // Slightly denormalized inputs are renormalized, grossly wrong ones rejected.
  const auto near = dir / "near.json";
  std::ofstream(near) << R"({"n": 1, "amplitudes": [[1.0000000001, 0.0], [0.0, 0.0]]})";
  const PureState fixed = load_state(near);
  CHECK(fixed.amplitudes().squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));

  const auto far = dir / "far.json";
  std::ofstream(far) << R"({"n": 1, "amplitudes": [[1.1, 0.0], [0.0, 0.0]]})";
  CHECK_THROWS_AS(load_state(far), std::runtime_error);

  const auto bad_entry = dir / "entry.json";
  std::ofstream(bad_entry) << R"({"n": 1, "amplitudes": [[1.0, 0.0], "x"]})";
  CHECK_THROWS_AS(load_state(bad_entry), std::runtime_error);
}

TEST_CASE("white-noise mixing interpolates between projector and identity") {
  const PureState bell = make_named(parse_state_spec("ghz", 2));
  const DensityOperator pure = make_mixed(bell, 1.0);
  CHECK((pure.matrix() - bell.projector().matrix()).cwiseAbs().maxCoeff() < 1e-15);
  const DensityOperator flat = make_mixed(bell, 0.0);
  CHECK((flat.matrix() - ComplexMatrix::Identity(4, 4) * 0.25).cwiseAbs().maxCoeff() <
        1e-15);

  // Closed-form purity of the x = 0.5 Bell mixture: 1/4 + 1/8 + 1/16 = 7/16.
  const DensityOperator half = make_mixed(bell, 0.5);
  CHECK(purity(half) == doctest::Approx(0.4375).epsilon(1e-13));
  CHECK(hermitian_eigenvalues(half.matrix())(0) > 0.0);

  CHECK_THROWS_AS(make_mixed(bell, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_mixed(bell, 1.1), std::invalid_argument);
}

TEST_CASE("realize_state covers every spec kind") {
  const auto dir = scratch_dir("realize");
  const PureState stored = haar_random_state(4, 99);
  save_state(stored, optimized_state_path(dir, "metag"));

  const PureState via_opt = realize_state(parse_state_spec("optimized:metag", 4), 0, dir);
  CHECK((via_opt.amplitudes() - stored.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

  save_state(stored, dir / "direct.json");
  const PureState via_file =
      realize_state(parse_state_spec("file:" + (dir / "direct.json").string(), 4), 0, dir);
  CHECK((via_file.amplitudes() - stored.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

  const PureState ghz = realize_state(parse_state_spec("ghz", 3), 1, dir);
  CHECK(ghz.amplitudes()(0).real() == doctest::Approx(M_SQRT1_2));

  const PureState haar = realize_state(parse_state_spec("haar", 3), 17, dir);
  CHECK((haar.amplitudes() - haar_random_state(3, 17).amplitudes()).cwiseAbs().maxCoeff() ==
        0.0);

  CHECK_THROWS_AS(realize_state(parse_state_spec("optimized:absent", 4), 0, dir),
                  std::runtime_error);
  CHECK_THROWS_AS(optimized_state_path(dir, "has space"), std::invalid_argument);
}

}  // TEST_SUITE
