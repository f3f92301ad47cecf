#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nqsim/analysis.hpp"
#include "nqsim/rng.hpp"
#include "oracles.hpp"

using namespace nqsim;

TEST_CASE("sinusoid fit recovers synthetic parameters") {
  std::vector<double> xs, ys, var;
  for (int i = 0; i < 40; ++i) {
    const double x = 2 * kPi * i / 40;
    xs.push_back(x);
    ys.push_back(1000 * (1 + 0.6 * std::cos(x - kPi / 3)));
    var.push_back(1.0);
  }
  const FitResult f = fit_sinusoid(xs, ys, var);
  CHECK(f.offset == doctest::Approx(1000));
  CHECK(f.contrast == doctest::Approx(0.6));
  CHECK(f.phase == doctest::Approx(-kPi / 3));
}

TEST_CASE("period fit recovers a 4 pi period") {
  std::vector<double> xs, ys, var;
  for (int i = 0; i < 161; ++i) {
    const double x = 8 * kPi * i / 160;
    xs.push_back(x);
    ys.push_back(0.5 + 0.5 * std::cos(x / 2 + 0.3));
    var.push_back(1e-6);
  }
  const PeriodFit f = fit_period(xs, ys, var, 2 * kPi, 8 * kPi);
  CHECK(f.period == doctest::Approx(4 * kPi).epsilon(1e-9));
}

TEST_CASE("Poisson counts: deterministic per (seed, index), correct mean") {
  CHECK(sample_counts(0.4, 1e4, 5, 17) == sample_counts(0.4, 1e4, 5, 17));
  const int n = 4000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += double(sample_counts(0.3, 100, 9, i));
  const double mean = sum / n;
  CHECK(std::abs(mean - 30.0) < 5 * std::sqrt(30.0 / n));
  CHECK(sample_counts(0.0, 100, 1, 1) == 0);
}

TEST_CASE("CHSH: product states never exceed 2, Bell state reaches 2 sqrt2") {
  using namespace oracle;
  CounterRng rng(stream_key(3, {}));
  auto unit = [&] {
    Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
    return v.normalized();
  };
  auto obs = [](const Eigen::Vector3d& n) { return n_sigma(n.x(), n.y(), n.z()); };
  auto E = [&](const Eigen::Vector4cd& psi, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return (psi.adjoint() * kron(obs(a), obs(b)) * psi)(0, 0).real();
  };
  double worst = 0;
  for (int k = 0; k < 500; ++k) {
    Eigen::Vector2cd u(cd(rng.normal(), rng.normal()), cd(rng.normal(), rng.normal()));
    Eigen::Vector2cd w(cd(rng.normal(), rng.normal()), cd(rng.normal(), rng.normal()));
    u.normalize();
    w.normalize();
    Eigen::Vector4cd psi;
    psi << u(0) * w(0), u(0) * w(1), u(1) * w(0), u(1) * w(1);
    const auto a = unit(), a2 = unit(), b = unit(), b2 = unit();
    const auto r = chsh(E(psi, a, b), E(psi, a, b2), E(psi, a2, b), E(psi, a2, b2));
    worst = std::max(worst, std::abs(r.value));
    CHECK_FALSE(r.violated);
  }
  CHECK(worst <= 2.0 + 1e-12);

  Eigen::Vector4cd bell;
  bell << 1, 0, 0, 1;
  bell /= std::sqrt(2.0);
  const Eigen::Vector3d x(1, 0, 0), z(0, 0, 1);
  // Ordered for E11 + E12 - E21 + E22.
  const Eigen::Vector3d b1 = (z - x).normalized(), b2 = (x + z).normalized();
  const auto r = chsh(E(bell, z, b1), E(bell, z, b2), E(bell, x, b1), E(bell, x, b2));
  CHECK(std::abs(r.value) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.violated);
}

TEST_CASE("Mermin: GHZ state gives 4") {
  using namespace oracle;
  Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(8);
  ghz(0) = ghz(7) = 1 / std::sqrt(2.0);
  auto E3 = [&](const M2& a, const M2& b, const M2& c) {
    Eigen::MatrixXcd m(8, 8);
    const M4 ab = kron(a, b);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m.block<2, 2>(2 * i, 2 * j) = ab(i, j) * c;
    return (ghz.adjoint() * m * ghz)(0, 0).real();
  };
  const auto r = mermin(E3(sx(), sx(), sx()), E3(sx(), sy(), sy()), E3(sy(), sx(), sy()), E3(sy(), sy(), sx()));
  CHECK(r.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.bound == 2.0);
}

TEST_CASE("Leggett: QM minus bound peaks near 0.1 pi") {
  double best = -1e9, arg = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double phi = 0.5 * kPi * i / 100000;
    const double d = 2 * std::abs(1 + std::cos(phi)) - (4 - 4 / kPi * std::abs(std::sin(phi / 2)));
    if (d > best) best = d, arg = phi;
  }
  CHECK(leggett_qm(arg) - leggett_bound(arg) == doctest::Approx(best).epsilon(1e-12));
  CHECK(arg / kPi == doctest::Approx(0.101).epsilon(0.05));
}

TEST_CASE("spherical polygon: octant encloses pi/2") {
  const std::vector<Vec3> oct{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(spherical_polygon_solid_angle(oct) == doctest::Approx(kPi / 2));
  const std::vector<Vec3> rev{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  CHECK(spherical_polygon_solid_angle(rev) == doctest::Approx(-kPi / 2));
}

TEST_CASE("Berry solid angle of a cone") {
  for (double th : {0.3, kPi / 2, 2.0}) {
    CHECK(berry_solid_angle(th).omega == doctest::Approx(2 * kPi * (1 - std::cos(th))));
    CHECK(phase_distance(berry_solid_angle(th).phase, -kPi * (1 - std::cos(th))) < 1e-12);
  }
}

TEST_CASE("Pancharatnam phase for a z rotation of a tilted state") {
  for (double th : {0.3, 1.0, 2.5})
    for (double a : {0.5, 1.7, -2.2}) {
      const auto r = pancharatnam(qubit_state(th, 0.4), spin_rotation(Vec3(0, 0, 1), a));
      CHECK(r.phase == doctest::Approx(-std::atan(std::cos(th) * std::tan(a / 2))).epsilon(1e-12));
    }
  const auto u = pancharatnam(qubit_state(kPi / 2, 0), spin_rotation(Vec3(0, 0, 1), kPi));
  CHECK_FALSE(u.defined);
}

TEST_CASE("Ozawa: random projective configurations satisfy the inequality, eps/eta match the probe") {
  CounterRng rng(stream_key(21, {}));
  auto unit = [&] { return Vec3(rng.normal(), rng.normal(), rng.normal()).normalized(); };
  auto sig = [](const Vec3& n) { return Mat2(oracle::n_sigma(n.x(), n.y(), n.z())); };
  int heis = 0;
  for (int k = 0; k < 2000; ++k) {
    Eigen::Vector2cd v(cplx(rng.normal(), rng.normal()), cplx(rng.normal(), rng.normal()));
    v.normalize();
    const Mat2 A = sig(unit()), B = sig(unit()), OA = sig(unit());
    const auto r = ozawa(PureState({DofLabel::spin()}, Vec(v)), LinearOperator({DofLabel::spin()}, Mat(A)),
                         LinearOperator({DofLabel::spin()}, Mat(B)), LinearOperator({DofLabel::spin()}, Mat(OA)));
    const auto o = oracle::probe(v, A, B, OA);
    CHECK(std::abs(r.epsilon - o.eps) < 1e-10);
    CHECK(std::abs(r.eta - o.eta) < 1e-10);
    const double lhs = o.eps * o.eta + o.eps * r.sigma_B + r.sigma_A * o.eta;
    CHECK(lhs >= r.bound - 1e-10);
    if (o.eps * o.eta < r.bound - 1e-9) ++heis;
  }
  CHECK(heis > 0);
}

TEST_CASE("non-commutation closed forms") {
  for (double b : {0.0, 0.3, 1.2, -0.8}) {
    const auto [ab, ba] = noncommutation_polarizations(b);
    // Oracle: U = -i n.sigma for pi rotations.
    using namespace oracle;
    const M2 A = -cd(0, 1) * sx(), B = -cd(0, 1) * n_sigma(std::cos(b), 0, std::sin(b));
    Eigen::Vector2cd up(1, 0);
    auto pol = [](const Eigen::Vector2cd& s) {
      return Vec3((s.adjoint() * sx() * s)(0, 0).real(), (s.adjoint() * sy() * s)(0, 0).real(),
                  (s.adjoint() * sz() * s)(0, 0).real());
    };
    CHECK((ab - pol(A * B * up)).norm() < 1e-12);
    CHECK((ba - pol(B * A * up)).norm() < 1e-12);
    CHECK(std::abs(std::abs(ab.x()) - std::abs(std::sin(2 * b))) < 1e-12);
    CHECK(ab.z() == doctest::Approx(std::cos(2 * b)));
  }
}
