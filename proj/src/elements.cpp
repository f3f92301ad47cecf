#include "nqsim/elements.hpp"

#include <cmath>
#include <sstream>

namespace nqsim {

using PC = PhysicalConstants;

BeamSpec BeamSpec::from_wavelength(double lambda, double spread) {
  BeamSpec b;
  b.wavelength = lambda;
  b.spread = spread;
  b.velocity = PC::h / (PC::mass * lambda);
  b.validate();
  return b;
}

BeamSpec BeamSpec::from_velocity(double v, double spread) {
  if (!(v > 0)) throw ArgumentError("velocity must be positive");
  return from_wavelength(PC::h / (PC::mass * v), spread);
}

void BeamSpec::validate() const {
  if (!(wavelength > 0)) throw ArgumentError("wavelength must be positive");
  if (!(spread >= 0)) throw ArgumentError("wavelength spread must be nonnegative");
  if (std::abs(velocity * wavelength * PC::mass / PC::h - 1.0) > 1e-9)
    throw ArgumentError("velocity inconsistent with wavelength");
  if (initial_spin.norm() > 1.0 + 1e-10) throw ArgumentError("initial polarization longer than 1");
  if (mean_counts < 0) throw ArgumentError("mean counts must be nonnegative");
}

BeamSplitterSpec BeamSplitterSpec::symmetric(double reflectivity) {
  if (!(reflectivity >= 0 && reflectivity <= 1)) throw ArgumentError("reflectivity must lie in [0, 1]");
  BeamSplitterSpec s;
  s.t = cplx(std::sqrt(1.0 - reflectivity), 0.0);
  s.r = cplx(0.0, std::sqrt(reflectivity));
  return s;
}

void BeamSplitterSpec::validate() const {
  if (std::abs(std::norm(r) + std::norm(t) - 1.0) > 1e-10)
    throw ArgumentError("blade amplitudes violate |r|^2 + |t|^2 = 1");
  if (std::abs((std::conj(r) * t).real()) > 1e-10)
    throw ArgumentError("blade amplitudes violate the lossless relation Re(r* t) = 0");
}

PhaseShifterSpec PhaseShifterSpec::material(double N, double b_c, double lambda, double D) {
  return {phase_shifter_chi(N, b_c, lambda, D)};
}

DcCoilSpec DcCoilSpec::from_field(const Vec3& axis, double B, double L, double v) {
  return {axis, larmor_angle(B, L, v)};
}

LinearOperator DcCoilSpec::op(DofLabel spin) const { return spin_rotation(axis, angle, spin); }

RfFlipperSpec RfFlipperSpec::resonant(double B0, double tau, RfMode mode) {
  RfFlipperSpec s;
  s.B0 = B0;
  s.tau = tau;
  s.mode = mode;
  s.B1 = rf_amplitude_resonance(tau, mode);
  s.omega = rf_resonance(B0, s.B1);
  return s;
}

void AbsorberSpec::validate() const {
  if (!(transmissivity >= 0 && transmissivity <= 1))
    throw ArgumentError("transmissivity must lie in [0, 1]");
}

double GravityTiltSpec::deltaH() const { return deltaH_max * std::sin(phi); }

void GravityTiltSpec::validate() const {
  if (!(L > 0) || !(deltaH_max > 0)) throw ArgumentError("COW geometry lengths must be positive");
}

double phase_shifter_chi(double N, double b_c, double lambda, double D) {
  if (!std::isfinite(N) || !std::isfinite(b_c) || !std::isfinite(lambda) || !std::isfinite(D))
    throw ArgumentError("phase shifter parameters must be finite");
  if (N < 0 || D < 0) throw ArgumentError("density and thickness must be nonnegative");
  return -N * b_c * lambda * D;
}

double larmor_angle(double B, double L, double v) {
  if (!(v > 0)) throw ArgumentError("velocity must be positive");
  return -PC::gyromagnetic * B * L / v;
}

double rf_resonance(double B0, double B1) {
  if (!(B0 > 0)) throw ArgumentError("guide field B0 must be positive");
  return 2.0 * std::abs(PC::mu) * B0 / PC::hbar * (1.0 + B1 * B1 / (16.0 * B0 * B0));
}

double rf_amplitude_resonance(double tau, RfMode mode) {
  if (!(tau > 0)) throw ArgumentError("flight time must be positive");
  double b = kPi * PC::hbar / (2.0 * tau * std::abs(PC::mu));
  return mode == RfMode::full_flip ? b : 0.5 * b;
}

double zero_field_phase(double omega, double distance, double v) {
  if (!(v > 0)) throw ArgumentError("velocity must be positive");
  return omega * distance / v;
}

double gravity_phase(double lambda, double L, double deltaH) {
  if (lambda < 0 || L < 0) throw ArgumentError("gravity phase inputs must be nonnegative");
  return -2.0 * kPi * lambda * PC::mass * PC::mass * PC::g * L * deltaH / (PC::h * PC::h);
}

double zeeman_split(double k0, double B0) {
  if (!(k0 > 0)) throw ArgumentError("k0 must be positive");
  return PC::mass * std::abs(PC::mu) * std::abs(B0) / (PC::hbar * PC::hbar * k0);
}

double ac_phase(double E_field, double path_length) {
  return 2.0 * std::abs(PC::mu) * E_field * path_length / (PC::hbar * PC::c * PC::c);
}

std::vector<std::string> rf_resonance_issues(const RfFlipperSpec& spec, double rel_tolerance) {
  std::vector<std::string> out;
  double w = rf_resonance(spec.B0, spec.B1);
  if (std::abs(spec.omega - w) > rel_tolerance * w) {
    std::ostringstream os;
    os << "RF flipper off frequency resonance: omega=" << spec.omega << " rad/s, resonance=" << w;
    out.push_back(os.str());
  }
  if (spec.tau > 0) {
    double b1 = rf_amplitude_resonance(spec.tau, spec.mode);
    if (std::abs(spec.B1 - b1) > rel_tolerance * b1) {
      std::ostringstream os;
      os << "RF flipper off amplitude resonance: B1=" << spec.B1 << " T, resonance=" << b1;
      out.push_back(os.str());
    }
  }
  return out;
}

LinearOperator rf_flip_operator(const RfFlipperSpec& spec, double t, DofLabel spin, DofLabel energy) {
  if (energy.kind != DofKind::energy) throw ArgumentError("rf flip needs an energy dof");
  const int ne = energy.dim;
  const int n = 2 * ne;
  const cplx e = std::polar(1.0, spec.phase_at(t));
  Mat m = Mat::Zero(n, n);
  auto idx = [ne](int s, int level) { return s * ne + level; };
  const double h = spec.mode == RfMode::full_flip ? 0.0 : 1.0 / std::sqrt(2.0);
  for (int lv = 0; lv < ne; ++lv) {
    // |up, E> -> e^{i phi}|down, E - hbar w>
    if (lv - 1 >= 0) m(idx(1, lv - 1), idx(0, lv)) = (h == 0.0 ? 1.0 : h) * e;
    // |down, E> -> e^{-i phi}|up, E + hbar w>
    if (lv + 1 < ne) m(idx(0, lv + 1), idx(1, lv)) = (h == 0.0 ? 1.0 : -h) * std::conj(e);
    if (h != 0.0) {
      m(idx(0, lv), idx(0, lv)) = h;
      m(idx(1, lv), idx(1, lv)) = h;
    }
  }
  return LinearOperator({spin, energy}, m);
}

namespace {

void check_policy(const RfFlipperSpec& spec, const RfPolicy& policy) {
  if (!(spec.B0 > 0)) return;  // resonance not specified; nothing to check
  auto issues = rf_resonance_issues(spec, policy.rel_tolerance);
  if (issues.empty()) return;
  if (policy.strict) throw ArgumentError(issues.front());
  if (policy.warnings)
    for (auto& s : issues) policy.warnings->push_back(s);
}

// Weight of the state on basis vectors the flip would push off the ladder.
void check_ladder(const Mat& rho_diag_source, const Dofs& dofs, DofLabel spin, DofLabel energy) {
  int ps = dof_position(dofs, spin), pe = dof_position(dofs, energy);
  if (ps < 0 || pe < 0) throw DimensionError("rf flip needs spin and energy dofs in the state");
  std::vector<int> dims;
  for (auto& d : dofs) dims.push_back(d.dim);
  int n = total_dim(dofs);
  int top = dofs[pe].dim - 1;
  for (int i = 0; i < n; ++i) {
    int rem = i;
    std::vector<int> dig(dofs.size());
    for (int k = static_cast<int>(dofs.size()) - 1; k >= 0; --k) {
      dig[k] = rem % dims[k];
      rem /= dims[k];
    }
    bool edge = (dig[ps] == 0 && dig[pe] == 0) || (dig[ps] == 1 && dig[pe] == top);
    if (edge && std::abs(rho_diag_source(i, 0)) > 1e-14)
      throw LadderOverflow("rf flip would leave the truncated energy ladder");
  }
}

}  // namespace

PureState rf_flip(const PureState& s, const RfFlipperSpec& spec, double t, const RfPolicy& policy,
                  DofLabel spin, DofLabel energy) {
  check_policy(spec, policy);
  int pe = dof_position(s.dofs(), energy);
  if (pe < 0) throw DimensionError("rf flip needs an energy dof in the state");
  energy = s.dofs()[pe];
  check_ladder(s.amplitudes().cwiseAbs2().cast<cplx>(), s.dofs(), spin, energy);
  return apply(rf_flip_operator(spec, t, spin, energy), s);
}

MixedState rf_flip(const MixedState& s, const RfFlipperSpec& spec, double t, const RfPolicy& policy,
                   DofLabel spin, DofLabel energy) {
  check_policy(spec, policy);
  int pe = dof_position(s.dofs(), energy);
  if (pe < 0) throw DimensionError("rf flip needs an energy dof in the state");
  energy = s.dofs()[pe];
  check_ladder(s.matrix().diagonal(), s.dofs(), spin, energy);
  return apply(rf_flip_operator(spec, t, spin, energy), s);
}

LinearOperator rf_spin_flip(const RfFlipperSpec& spec, double t, DofLabel spin) {
  const cplx e = std::polar(1.0, spec.phase_at(t));
  Mat m(2, 2);
  if (spec.mode == RfMode::full_flip) {
    m << 0, std::conj(e), e, 0;
  } else {
    double h = 1.0 / std::sqrt(2.0);
    m << h, -h * std::conj(e), h * e, h;
  }
  return LinearOperator({spin}, m, {true, false, false});
}

std::vector<LinearOperator> absorber_kraus(const AbsorberSpec& spec, DofLabel path, int which) {
  spec.validate();
  if (which != 0 && which != 1) throw ArgumentError("absorber path index must be 0 or 1");
  const double T = spec.transmissivity;
  Mat open = Mat::Identity(2, 2);
  if (spec.kind == AbsorberKind::stochastic) {
    open(which, which) = std::sqrt(T);
    return {LinearOperator({path}, open)};
  }
  Mat blocked = Mat::Zero(2, 2);
  blocked(1 - which, 1 - which) = std::sqrt(1.0 - T);
  return {LinearOperator({path}, std::sqrt(T) * open), LinearOperator({path}, blocked)};
}

MixedState absorber_channel(const MixedState& rho, const AbsorberSpec& spec, DofLabel path, int which) {
  if (dof_position(rho.dofs(), path) < 0) throw DimensionError("absorber needs a path dof");
  return apply_kraus(absorber_kraus(spec, path, which), rho);
}

LinearOperator path_phase(double chi, DofLabel path, int which) {
  if (which != 0 && which != 1) throw ArgumentError("path index must be 0 or 1");
  Mat m = Mat::Identity(2, 2);
  m(which, which) = std::polar(1.0, chi);
  return LinearOperator({path}, m, {true, false, false});
}

std::array<DcCoilSpec, 2> mu_metal_turner() {
  return {DcCoilSpec{Vec3(0, 0, 1), kPi / 4}, DcCoilSpec{Vec3(0, 0, 1), -kPi / 4}};
}

}  // namespace nqsim
