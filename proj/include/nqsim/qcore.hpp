#pragma once

// Small tensor-product Hilbert spaces: labelled degrees of freedom, pure and
// mixed states, operators, and the spin propagator.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "nqsim/errors.hpp"

namespace nqsim {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

struct PhysicalConstants {
  static constexpr double mu_nuc = 5.051e-27;        // J/T
  static constexpr double mu = -1.91 * mu_nuc;       // J/T
  static constexpr double mass = 1.674e-27;          // kg
  static constexpr double hbar = 1.054571817e-34;    // J s
  static constexpr double h = 6.62607015e-34;        // J s
  static constexpr double g = 9.80665;               // m/s^2
  static constexpr double c = 299792458.0;           // m/s
  static constexpr double gyromagnetic = 2.0 * mu / hbar;  // rad/(s T)
};

struct Tolerances {
  double structural = 1e-10;
  double propagator = 1e-9;
};
const Tolerances& tolerances();
void set_tolerances(const Tolerances& t);

// Wrap into (-pi, pi].
double wrap_phase(double phi);
// Smallest |a - b| modulo 2 pi.
double phase_distance(double a, double b);

enum class DofKind { spin, path, energy, momentum };

struct DofLabel {
  DofKind kind = DofKind::spin;
  int id = 0;
  int dim = 2;

  static DofLabel spin(int id = 0) { return {DofKind::spin, id, 2}; }
  static DofLabel path(int id = 0) { return {DofKind::path, id, 2}; }
  static DofLabel momentum(int id = 0) { return {DofKind::momentum, id, 2}; }
  // Ladder E0 + k hbar w, k in [-kmax, kmax]; index of level k is k + kmax.
  static DofLabel energy(int id = 0, int kmax = 2) { return {DofKind::energy, id, 2 * kmax + 1}; }

  int kmax() const { return (dim - 1) / 2; }
  bool same(const DofLabel& o) const { return kind == o.kind && id == o.id; }
  std::string name() const;
};

using Dofs = std::vector<DofLabel>;

int total_dim(const Dofs& dofs);
int dof_position(const Dofs& dofs, const DofLabel& l);  // -1 when absent
void require_unique(const Dofs& dofs);

class PureState {
 public:
  PureState(Dofs dofs, Vec amplitudes);

  const Dofs& dofs() const { return dofs_; }
  const Vec& amplitudes() const { return amp_; }
  int dim() const { return static_cast<int>(amp_.size()); }
  double norm2() const { return amp_.squaredNorm(); }
  PureState normalized() const;
  PureState scaled(cplx factor) const;

 private:
  Dofs dofs_;
  Vec amp_;
};

class MixedState {
 public:
  MixedState(Dofs dofs, Mat rho);
  explicit MixedState(const PureState& psi);

  const Dofs& dofs() const { return dofs_; }
  const Mat& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }
  double trace() const { return rho_.trace().real(); }
  MixedState normalized() const;
  MixedState scaled(double factor) const;

 private:
  Dofs dofs_;
  Mat rho_;
};

struct OpFlags {
  bool unitary = false;
  bool hermitian = false;
  bool projector = false;
};

class LinearOperator {
 public:
  LinearOperator(Dofs dofs, Mat m, OpFlags flags = {});

  const Dofs& dofs() const { return dofs_; }
  const Mat& matrix() const { return m_; }
  const OpFlags& flags() const { return flags_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  LinearOperator adjoint() const;
  // Product this * other on the same dofs; flags: unitary if both are.
  LinearOperator operator*(const LinearOperator& other) const;

 private:
  Dofs dofs_;
  Mat m_;
  OpFlags flags_;
};

struct BlochVector {
  double px = 0, py = 0, pz = 0;
  double norm() const;
  Vec3 vec() const { return {px, py, pz}; }
};

// --- construction ---------------------------------------------------------

PureState basis_state(const Dofs& dofs, const std::vector<int>& indices);
PureState spin_up(DofLabel l = DofLabel::spin());
PureState spin_down(DofLabel l = DofLabel::spin());
// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> on a two-level dof.
PureState qubit_state(double theta, double phi, DofLabel l = DofLabel::spin());
PureState energy_level(int k, DofLabel l = DofLabel::energy());

LinearOperator identity(const Dofs& dofs);
// i = 0,1,2 for x,y,z on any two-level dof.
LinearOperator pauli(int i, DofLabel l = DofLabel::spin());
LinearOperator spin_rotation(const Vec3& axis, double angle, DofLabel l = DofLabel::spin());
Mat2 rotation_matrix(const Vec3& unit_axis, double angle);

// Projectors onto cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
LinearOperator projector_bloch(double theta, double phi, DofLabel l = DofLabel::spin());
// Projector onto (|I> + sign e^{i chi}|II>)/sqrt2.
LinearOperator path_projector(double chi, int sign, DofLabel l = DofLabel::path());
// (|a> + sign e^{i phase}|b>)/sqrt2 for any pair of levels of one dof.
LinearOperator pair_projector(DofLabel l, int a, int b, double phase, int sign);
// Observable P(+) - P(-) for pair_projector; an equatorial Pauli on {a,b}.
LinearOperator pair_observable(DofLabel l, int a, int b, double phase);
// n.sigma on a two-level dof.
LinearOperator bloch_observable(const Vec3& n, DofLabel l = DofLabel::spin());

// --- algebra ---------------------------------------------------------------

PureState tensor(const PureState& a, const PureState& b);
MixedState tensor(const MixedState& a, const MixedState& b);
LinearOperator tensor(const LinearOperator& a, const LinearOperator& b);

// Full-space matrix of op with identity on the remaining dofs of `dofs`.
Mat embed(const LinearOperator& op, const Dofs& dofs);

PureState apply(const LinearOperator& op, const PureState& s);
MixedState apply(const LinearOperator& op, const MixedState& s);
MixedState apply_kraus(const std::vector<LinearOperator>& kraus, const MixedState& s);

MixedState partial_trace(const MixedState& s, const Dofs& keep);
MixedState reduced(const PureState& s, const Dofs& keep);

cplx inner(const PureState& a, const PureState& b);
BlochVector bloch_vector(const PureState& s, DofLabel l = DofLabel::spin());
BlochVector bloch_vector(const MixedState& s, DofLabel l = DofLabel::spin());
double expectation(const PureState& s, const LinearOperator& obs);
double expectation(const MixedState& s, const LinearOperator& obs);
// <psi|op|psi> for any op (no hermiticity requirement).
cplx matrix_element(const PureState& s, const LinearOperator& op);

MixedState mixed_from_bloch(double r, const Vec3& n, DofLabel l = DofLabel::spin());
MixedState mix(const std::vector<MixedState>& states, const std::vector<double>& weights);
double purity(const MixedState& s, DofLabel l = DofLabel::spin());

// Schmidt rank across the split (part, rest).
int schmidt_rank(const PureState& s, const Dofs& part, double tol = 1e-10);

// --- dynamics --------------------------------------------------------------

using FieldFn = std::function<Vec3(double)>;

// One step of exp(+i mu sigma.B dt / hbar).
Mat2 spin_step(const Vec3& B, double dt);
LinearOperator time_propagate(const FieldFn& field, double t0, double t1, int steps,
                              DofLabel l = DofLabel::spin());

}  // namespace nqsim
