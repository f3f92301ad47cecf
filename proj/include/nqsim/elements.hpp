#pragma once

// Neutron-optical devices as parameter records, the formulas that connect
// them to SI quantities, and their lowering to operators or channels.

#include <array>
#include <string>
#include <vector>

#include "nqsim/qcore.hpp"

namespace nqsim {

struct BeamSpec {
  double wavelength = 1.8e-10;  // m
  double spread = 0.0;          // relative d(lambda)/lambda
  double velocity = 0.0;        // m/s, h/(m lambda)
  BlochVector initial_spin{0, 0, 1};
  double mean_counts = 0.0;     // expected counts at unit intensity

  static BeamSpec from_wavelength(double lambda, double spread = 0.0);
  static BeamSpec from_velocity(double v, double spread = 0.0);
  double k0() const { return 2.0 * kPi / wavelength; }
  void validate() const;
};

struct BeamSplitterSpec {
  cplx r{0.0, 1.0 / 1.4142135623730951};
  cplx t{1.0 / 1.4142135623730951, 0.0};

  // Lossless symmetric blade: t = sqrt(1-R), r = i sqrt(R).
  static BeamSplitterSpec symmetric(double reflectivity);
  void validate() const;
};

struct PhaseShifterSpec {
  double chi = 0.0;  // rad

  static PhaseShifterSpec direct(double chi) { return {chi}; }
  static PhaseShifterSpec material(double N, double b_c, double lambda, double D);
};

struct DcCoilSpec {
  Vec3 axis{0, 0, 1};
  double angle = 0.0;  // rad

  static DcCoilSpec from_field(const Vec3& axis, double B, double L, double v);
  LinearOperator op(DofLabel spin = DofLabel::spin()) const;
};

enum class RfMode { full_flip, half_flip };

struct RfFlipperSpec {
  double omega = 0.0;      // rad/s
  double phi_omega = 0.0;  // rad, photon-exchange phase at t = 0
  double B0 = 0.0;         // T
  double B1 = 0.0;         // T
  double tau = 0.0;        // s, time of flight through the flipper
  RfMode mode = RfMode::full_flip;

  // Resonant flipper for the given guide field and flight time.
  static RfFlipperSpec resonant(double B0, double tau, RfMode mode = RfMode::full_flip);
  double phase_at(double t) const { return phi_omega + omega * t; }
};

struct RfPolicy {
  bool strict = false;
  double rel_tolerance = 1e-3;
  std::vector<std::string>* warnings = nullptr;
};

enum class AbsorberKind { stochastic, deterministic };

struct AbsorberSpec {
  AbsorberKind kind = AbsorberKind::stochastic;
  double transmissivity = 1.0;
  void validate() const;
};

struct GravityTiltSpec {
  double L = 0.04;           // m
  double deltaH_max = 0.03;  // m
  double phi = 0.0;          // rad
  double deltaH() const;
  void validate() const;
};

double phase_shifter_chi(double N, double b_c, double lambda, double D);
double larmor_angle(double B, double L, double v);
double rf_resonance(double B0, double B1);
// B1 satisfying the amplitude resonance for a pi (full) or pi/2 (half) flip.
double rf_amplitude_resonance(double tau, RfMode mode);
double zero_field_phase(double omega, double distance, double v);
double gravity_phase(double lambda, double L, double deltaH);
double zeeman_split(double k0, double B0);
double ac_phase(double E_field, double path_length);

// Checks the frequency and amplitude resonance conditions; returns messages.
std::vector<std::string> rf_resonance_issues(const RfFlipperSpec& spec, double rel_tolerance);

// Spin-energy map of the flipper at time t on the given dofs (a partial
// isometry on the truncated ladder).
LinearOperator rf_flip_operator(const RfFlipperSpec& spec, double t, DofLabel spin, DofLabel energy);
PureState rf_flip(const PureState& s, const RfFlipperSpec& spec, double t, const RfPolicy& policy = {},
                  DofLabel spin = DofLabel::spin(), DofLabel energy = DofLabel::energy());
MixedState rf_flip(const MixedState& s, const RfFlipperSpec& spec, double t, const RfPolicy& policy = {},
                   DofLabel spin = DofLabel::spin(), DofLabel energy = DofLabel::energy());
// The flip restricted to spin when the energy ladder is not tracked.
LinearOperator rf_spin_flip(const RfFlipperSpec& spec, double t, DofLabel spin = DofLabel::spin());

// Kraus operators of an absorber placed in path `which` (0 = I, 1 = II).
std::vector<LinearOperator> absorber_kraus(const AbsorberSpec& spec, DofLabel path, int which = 1);
MixedState absorber_channel(const MixedState& rho, const AbsorberSpec& spec, DofLabel path, int which = 1);

// Phase factor e^{i chi} on one path.
LinearOperator path_phase(double chi, DofLabel path, int which = 1);

// Two DC rotations about z by +pi/4 and -pi/4 (path I, path II).
std::array<DcCoilSpec, 2> mu_metal_turner();

}  // namespace nqsim
