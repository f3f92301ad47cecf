#include <doctest.h>

#include "nqsim/qcore.hpp"
#include "nqsim/rng.hpp"
#include "oracles.hpp"

using namespace nqsim;

TEST_CASE("wrap_phase lands in (-pi, pi]") {
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - 2 * kPi));
  CHECK(phase_distance(kPi - 0.01, -kPi + 0.01) == doctest::Approx(0.02));
}

TEST_CASE("rotation matrix equals the exponential of n.sigma") {
  CounterRng rng(stream_key(11, {}));
  for (int k = 0; k < 50; ++k) {
    Vec3 n(rng.normal(), rng.normal(), rng.normal());
    n.normalize();
    const double a = 8 * (rng.uniform() - 0.5);
    const oracle::M2 ref = oracle::expm<oracle::M2>(oracle::cd(0, -a / 2) * oracle::n_sigma(n.x(), n.y(), n.z()));
    CHECK((rotation_matrix(n, a) - ref).norm() < 1e-12);
    CHECK((spin_rotation(n, a).matrix() - ref).norm() < 1e-12);
  }
}

TEST_CASE("2 pi rotation flips the sign, 4 pi restores") {
  const Vec3 n(0.6, 0, 0.8);
  CHECK((rotation_matrix(n, 2 * kPi) + Mat2::Identity()).norm() < 1e-12);
  CHECK((rotation_matrix(n, 4 * kPi) - Mat2::Identity()).norm() < 1e-12);
}

TEST_CASE("constant-field propagator matches exp(i mu sigma.B t / hbar)") {
  const Vec3 B(1e-3, -2e-3, 0.5e-3);
  const double t = 3e-6;
  const double mu = -1.91 * 5.051e-27, hbar = 1.054571817e-34;
  const oracle::M2 ref = oracle::expm<oracle::M2>(oracle::cd(0, mu * t / hbar) * oracle::n_sigma(B.x(), B.y(), B.z()));
  const LinearOperator U = time_propagate([&](double) { return B; }, 0, t, 7);
  CHECK((U.matrix() - ref).norm() < 1e-10);
}

TEST_CASE("tensor order: first dof slowest") {
  const PureState s = tensor(basis_state({DofLabel::path()}, {1}), spin_up());
  CHECK(std::abs(s.amplitudes()(2) - 1.0) < 1e-15);
  const LinearOperator op = tensor(pauli(0, DofLabel::path()), pauli(2));
  CHECK((op.matrix() - oracle::kron(oracle::sx(), oracle::sz())).norm() < 1e-15);
}

TEST_CASE("Bloch vector of qubit_state") {
  for (double th : {0.0, 0.4, 1.3, kPi})
    for (double ph : {0.0, 1.0, -2.5}) {
      const BlochVector b = bloch_vector(qubit_state(th, ph));
      CHECK(b.px == doctest::Approx(std::sin(th) * std::cos(ph)).epsilon(1e-12));
      CHECK(b.py == doctest::Approx(std::sin(th) * std::sin(ph)).epsilon(1e-12));
      CHECK(b.pz == doctest::Approx(std::cos(th)).epsilon(1e-12));
    }
}

TEST_CASE("Bell state: maximally mixed marginal, Schmidt rank 2") {
  Vec v(4);
  v << 1, 0, 0, 1;
  const PureState bell({DofLabel::path(), DofLabel::spin()}, v / std::sqrt(2.0));
  const MixedState r = reduced(bell, {DofLabel::spin()});
  CHECK((r.matrix() - 0.5 * Mat::Identity(2, 2)).norm() < 1e-15);
  CHECK(schmidt_rank(bell, {DofLabel::path()}) == 2);
  CHECK(schmidt_rank(tensor(basis_state({DofLabel::path()}, {0}), qubit_state(1, 2)), {DofLabel::path()}) == 1);
}

TEST_CASE("mixed_from_bloch: Bloch length r") {
  for (double r : {0.0, 0.3, 1.0}) {
    const MixedState m = mixed_from_bloch(r, Vec3(0, 1, 0));
    CHECK(purity(m) == doctest::Approx(r));
    CHECK(m.trace() == doctest::Approx(1.0));
    CHECK(bloch_vector(m).py == doctest::Approx(r));
  }
}

TEST_CASE("pair projector and observable") {
  const DofLabel e = DofLabel::energy(0, 1);
  const LinearOperator P = pair_projector(e, 0, 2, 0.7, +1);
  CHECK((P.matrix() * P.matrix() - P.matrix()).norm() < 1e-14);
  const LinearOperator O = pair_observable(e, 0, 2, 0.7);
  CHECK(std::abs(O.matrix()(0, 2) - std::exp(cplx(0, -0.7))) < 1e-14);
}

TEST_CASE("shape and label errors") {
  CHECK_THROWS_AS(PureState({DofLabel::spin()}, Vec::Zero(3)), DimensionError);
  CHECK_THROWS_AS(tensor(spin_up(), spin_up()), DimensionError);
  CHECK_THROWS_AS(spin_rotation(Vec3(1, 1, 0), 1.0), ArgumentError);
}
