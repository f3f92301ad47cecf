#include <doctest.h>

#include <cmath>

#include "nqsim/analysis.hpp"
#include "nqsim/beamline.hpp"
#include "oracles.hpp"

using namespace nqsim;

namespace {

BeamlineTopology lll_topo(double R) {
  BeamlineTopology t;
  t.splitter = t.mirror = t.analyzer = BeamSplitterSpec::symmetric(R);
  return t;
}

double contrast_of(const BeamlineTopology& topo, const MixedState& in) {
  double mx = 0, mn = 1e9;
  for (int i = 0; i < 360; ++i) {
    const double io = propagate(topo, in, "delta_chi", 2 * kPi * i / 360).intensities.I_O;
    mx = std::max(mx, io);
    mn = std::min(mn, io);
  }
  return (mx - mn) / (mx + mn);
}

}  // namespace

TEST_CASE("LLL intensities vs blade-by-blade amplitudes") {
  for (double R : {0.5, 0.3, 0.8})
    for (double chi : {0.0, 0.9, 2.0, kPi, -1.3}) {
      const auto p = propagate(lll_topo(R), MixedState(spin_up()), "delta_chi", chi);
      CHECK(p.intensities.I_O == doctest::Approx(oracle::lll_O(R, chi)).epsilon(1e-12));
      CHECK(p.intensities.I_H == doctest::Approx(oracle::lll_H(R, chi)).epsilon(1e-12));
      CHECK(p.intensities.I_O + p.intensities.I_H == doctest::Approx(R).epsilon(1e-12));
    }
}

TEST_CASE("absorber contrasts: sqrt law and linear law") {
  for (double T : {0.1, 0.25, 0.7}) {
    auto topo = lll_topo(0.5);
    topo.paths[1].push_back({"abs", AbsorberSpec{AbsorberKind::stochastic, T}});
    CHECK(contrast_of(topo, MixedState(spin_up())) == doctest::Approx(2 * std::sqrt(T) / (1 + T)).epsilon(1e-4));
    topo.paths[1].back().spec = AbsorberSpec{AbsorberKind::deterministic, T};
    CHECK(contrast_of(topo, MixedState(spin_up())) == doctest::Approx(2 * T / (1 + T)).epsilon(1e-4));
  }
}

TEST_CASE("spin rotation in one path: I_O follows 1 + cos(alpha/2)") {
  // Rotation about x acting on |up>: <up|U(alpha)|up> = cos(alpha/2).
  for (double a : {0.0, 1.0, 2 * kPi, 3 * kPi, 4 * kPi}) {
    auto topo = lll_topo(0.5);
    topo.paths[1].push_back({"coil", DcCoilSpec{Vec3(1, 0, 0), a}});
    const double io = propagate(topo, MixedState(spin_up())).intensities.I_O;
    CHECK(io == doctest::Approx((1 + std::cos(a / 2)) / 4).epsilon(1e-12));
  }
}

TEST_CASE("unpolarized input gives the same scalar fringe") {
  const auto p = propagate(lll_topo(0.5), mixed_from_bloch(0, Vec3(0, 0, 1)), "delta_chi", 1.1);
  CHECK(p.intensities.I_O == doctest::Approx(oracle::lll_O(0.5, 1.1)));
}

TEST_CASE("non-unit coil axis and bad transmissivity are rejected") {
  auto topo = lll_topo(0.5);
  topo.paths[1].push_back({"coil", DcCoilSpec{Vec3(1, 1, 0), 1.0}});
  CHECK_THROWS(propagate(topo, MixedState(spin_up())));
  CHECK_THROWS_AS((AbsorberSpec{AbsorberKind::stochastic, 1.5}.validate()), ArgumentError);
}

TEST_CASE("polarimeter Ramsey sequence: P = (1 +- sin alpha)/2") {
  const auto seq = PolarimeterSequence::canonical_ramsey();
  for (double a : {0.0, 0.7, 2.0, -1.0}) {
    const auto [pu, pd] = run_polarimeter(seq, a);
    CHECK(pu + pd == doctest::Approx(1.0));
    CHECK(std::abs(pu - (1 + std::sin(a)) / 2) < 1e-12);
  }
}
