#include "nqsim/qcore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>

namespace nqsim {

namespace {

std::mutex g_tol_mutex;
Tolerances g_tol;

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::vector<int> dims_of(const Dofs& dofs) {
  std::vector<int> d;
  d.reserve(dofs.size());
  for (const auto& l : dofs) d.push_back(l.dim);
  return d;
}

// Digits of a flat index, last dof fastest.
std::vector<int> digits(int index, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    out[k] = index % dims[k];
    index /= dims[k];
  }
  return out;
}

std::vector<int> positions_in(const Dofs& sub, const Dofs& full) {
  std::vector<int> pos;
  for (const auto& l : sub) {
    int p = dof_position(full, l);
    if (p < 0) throw DimensionError("dof " + l.name() + " not present in state");
    if (full[p].dim != l.dim) throw DimensionError("dof " + l.name() + " dimension mismatch");
    pos.push_back(p);
  }
  return pos;
}

// Index maps splitting each full index into (sub index over `pos`, rest index).
void split_indices(const Dofs& full, const std::vector<int>& pos, std::vector<int>& sub,
                   std::vector<int>& rest) {
  auto dims = dims_of(full);
  int n = total_dim(full);
  sub.assign(n, 0);
  rest.assign(n, 0);
  std::vector<bool> in_sub(full.size(), false);
  for (int p : pos) in_sub[p] = true;
  for (int i = 0; i < n; ++i) {
    auto d = digits(i, dims);
    int s = 0;
    for (int p : pos) s = s * dims[p] + d[p];
    int r = 0;
    for (size_t k = 0; k < full.size(); ++k)
      if (!in_sub[k]) r = r * dims[k] + d[k];
    sub[i] = s;
    rest[i] = r;
  }
}

void check_two_level(const DofLabel& l) {
  if (l.dim != 2) throw DimensionError("dof " + l.name() + " is not a two-level system");
}

}  // namespace

const Tolerances& tolerances() { return g_tol; }

void set_tolerances(const Tolerances& t) {
  std::lock_guard<std::mutex> lock(g_tol_mutex);
  g_tol = t;
}

double wrap_phase(double phi) {
  double w = std::atan2(std::sin(phi), std::cos(phi));
  if (w <= -kPi) w = kPi;
  return w;
}

double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

std::string DofLabel::name() const {
  const char* k = "spin";
  switch (kind) {
    case DofKind::spin: k = "spin"; break;
    case DofKind::path: k = "path"; break;
    case DofKind::energy: k = "energy"; break;
    case DofKind::momentum: k = "momentum"; break;
  }
  return std::string(k) + "#" + std::to_string(id);
}

int total_dim(const Dofs& dofs) {
  int n = 1;
  for (const auto& l : dofs) n *= l.dim;
  return n;
}

int dof_position(const Dofs& dofs, const DofLabel& l) {
  for (size_t i = 0; i < dofs.size(); ++i)
    if (dofs[i].same(l)) return static_cast<int>(i);
  return -1;
}

void require_unique(const Dofs& dofs) {
  for (size_t i = 0; i < dofs.size(); ++i) {
    if (dofs[i].dim < 1) throw DimensionError("dof " + dofs[i].name() + " has no levels");
    if ((dofs[i].kind == DofKind::spin || dofs[i].kind == DofKind::path ||
         dofs[i].kind == DofKind::momentum) && dofs[i].dim != 2)
      throw DimensionError("dof " + dofs[i].name() + " must be two-level");
    for (size_t j = i + 1; j < dofs.size(); ++j)
      if (dofs[i].same(dofs[j])) throw DimensionError("duplicate dof label " + dofs[i].name());
  }
}

// --- PureState -------------------------------------------------------------

PureState::PureState(Dofs dofs, Vec amplitudes) : dofs_(std::move(dofs)), amp_(std::move(amplitudes)) {
  require_unique(dofs_);
  if (amp_.size() != total_dim(dofs_)) throw DimensionError("amplitude vector length mismatch");
  if (!amp_.allFinite()) throw ArgumentError("non-finite amplitude");
  if (amp_.squaredNorm() > 1.0 + 1e-12) throw ArgumentError("state norm exceeds 1");
}

PureState PureState::normalized() const {
  double n = amp_.norm();
  if (n == 0.0) throw AbsorbedBeam();
  return PureState(dofs_, amp_ / n);
}

PureState PureState::scaled(cplx factor) const { return PureState(dofs_, amp_ * factor); }

// --- MixedState ------------------------------------------------------------

MixedState::MixedState(Dofs dofs, Mat rho) : dofs_(std::move(dofs)), rho_(std::move(rho)) {
  require_unique(dofs_);
  int n = total_dim(dofs_);
  if (rho_.rows() != n || rho_.cols() != n) throw DimensionError("density matrix shape mismatch");
  if (!rho_.allFinite()) throw ArgumentError("non-finite density matrix");
  if (max_abs(rho_ - rho_.adjoint()) > 1e-12) throw ArgumentError("density matrix not Hermitian");
  rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  if (trace() > 1.0 + 1e-12) throw ArgumentError("density matrix trace exceeds 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw ArgumentError("density matrix not positive");
}

MixedState::MixedState(const PureState& psi)
    : MixedState(psi.dofs(), psi.amplitudes() * psi.amplitudes().adjoint()) {}

MixedState MixedState::normalized() const {
  double t = trace();
  if (t <= 0.0) throw AbsorbedBeam();
  return MixedState(dofs_, rho_ / t);
}

MixedState MixedState::scaled(double factor) const { return MixedState(dofs_, rho_ * factor); }

// --- LinearOperator --------------------------------------------------------

LinearOperator::LinearOperator(Dofs dofs, Mat m, OpFlags flags)
    : dofs_(std::move(dofs)), m_(std::move(m)), flags_(flags) {
  require_unique(dofs_);
  int n = total_dim(dofs_);
  if (m_.rows() != n || m_.cols() != n) throw DimensionError("operator shape mismatch");
  double tol = tolerances().structural;
  if (flags_.unitary && max_abs(m_.adjoint() * m_ - Mat::Identity(n, n)) > tol)
    throw ArgumentError("operator flagged unitary is not unitary");
  if (flags_.hermitian && max_abs(m_ - m_.adjoint()) > tol)
    throw ArgumentError("operator flagged hermitian is not hermitian");
  if (flags_.projector && max_abs(m_ * m_ - m_) > tol)
    throw ArgumentError("operator flagged projector is not idempotent");
}

LinearOperator LinearOperator::adjoint() const {
  return LinearOperator(dofs_, m_.adjoint(), flags_);
}

LinearOperator LinearOperator::operator*(const LinearOperator& other) const {
  if (dofs_.size() != other.dofs_.size())
    throw DimensionError("operator product over different dofs");
  for (size_t i = 0; i < dofs_.size(); ++i)
    if (!dofs_[i].same(other.dofs_[i]) || dofs_[i].dim != other.dofs_[i].dim)
      throw DimensionError("operator product over different dofs");
  OpFlags f;
  f.unitary = flags_.unitary && other.flags_.unitary;
  return LinearOperator(dofs_, m_ * other.m_, f);
}

double BlochVector::norm() const { return std::sqrt(px * px + py * py + pz * pz); }

// --- construction ----------------------------------------------------------

PureState basis_state(const Dofs& dofs, const std::vector<int>& indices) {
  if (indices.size() != dofs.size()) throw DimensionError("basis index count mismatch");
  int flat = 0;
  for (size_t k = 0; k < dofs.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= dofs[k].dim) throw ArgumentError("basis index out of range");
    flat = flat * dofs[k].dim + indices[k];
  }
  Vec v = Vec::Zero(total_dim(dofs));
  v(flat) = 1.0;
  return PureState(dofs, v);
}

PureState spin_up(DofLabel l) { return basis_state({l}, {0}); }
PureState spin_down(DofLabel l) { return basis_state({l}, {1}); }

PureState qubit_state(double theta, double phi, DofLabel l) {
  check_two_level(l);
  Vec v(2);
  v << std::cos(theta / 2), std::polar(1.0, phi) * std::sin(theta / 2);
  return PureState({l}, v);
}

PureState energy_level(int k, DofLabel l) {
  if (l.kind != DofKind::energy) throw ArgumentError("energy_level needs an energy dof");
  if (std::abs(k) > l.kmax()) throw LadderOverflow("energy level outside ladder");
  return basis_state({l}, {k + l.kmax()});
}

LinearOperator identity(const Dofs& dofs) {
  int n = total_dim(dofs);
  return LinearOperator(dofs, Mat::Identity(n, n), {true, true, true});
}

LinearOperator pauli(int i, DofLabel l) {
  check_two_level(l);
  Mat m(2, 2);
  switch (i) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, -kI, kI, 0; break;
    case 2: m << 1, 0, 0, -1; break;
    default: throw ArgumentError("pauli index must be 0, 1 or 2");
  }
  return LinearOperator({l}, m, {true, true, false});
}

Mat2 rotation_matrix(const Vec3& n, double angle) {
  double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Mat2 u;
  u(0, 0) = cplx(c, -s * n.z());
  u(1, 1) = cplx(c, s * n.z());
  u(0, 1) = -kI * s * cplx(n.x(), -n.y());
  u(1, 0) = -kI * s * cplx(n.x(), n.y());
  return u;
}

LinearOperator spin_rotation(const Vec3& axis, double angle, DofLabel l) {
  check_two_level(l);
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9)
    throw ArgumentError("rotation axis must be a unit vector");
  return LinearOperator({l}, Mat(rotation_matrix(axis, angle)), {true, false, false});
}

LinearOperator projector_bloch(double theta, double phi, DofLabel l) {
  auto s = qubit_state(theta, phi, l);
  return LinearOperator({l}, s.amplitudes() * s.amplitudes().adjoint(), {false, true, true});
}

LinearOperator pair_projector(DofLabel l, int a, int b, double phase, int sign) {
  if (sign != 1 && sign != -1) throw ArgumentError("projector sign must be +1 or -1");
  if (a < 0 || b < 0 || a >= l.dim || b >= l.dim || a == b) throw ArgumentError("invalid level pair");
  Vec v = Vec::Zero(l.dim);
  v(a) = 1.0 / std::sqrt(2.0);
  v(b) = double(sign) * std::polar(1.0, phase) / std::sqrt(2.0);
  return LinearOperator({l}, v * v.adjoint(), {false, true, true});
}

LinearOperator path_projector(double chi, int sign, DofLabel l) {
  check_two_level(l);
  return pair_projector(l, 0, 1, chi, sign);
}

LinearOperator pair_observable(DofLabel l, int a, int b, double phase) {
  Mat m = pair_projector(l, a, b, phase, 1).matrix() - pair_projector(l, a, b, phase, -1).matrix();
  return LinearOperator({l}, m, {false, true, false});
}

LinearOperator bloch_observable(const Vec3& n, DofLabel l) {
  Mat m = n.x() * pauli(0, l).matrix() + n.y() * pauli(1, l).matrix() + n.z() * pauli(2, l).matrix();
  return LinearOperator({l}, m, {false, true, false});
}

// --- algebra ---------------------------------------------------------------

namespace {
Dofs concat(const Dofs& a, const Dofs& b) {
  Dofs out = a;
  out.insert(out.end(), b.begin(), b.end());
  for (const auto& l : b)
    if (dof_position(a, l) >= 0) throw DimensionError("tensor of overlapping dof " + l.name());
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}
}  // namespace

PureState tensor(const PureState& a, const PureState& b) {
  Dofs d = concat(a.dofs(), b.dofs());
  Vec v = kron(a.amplitudes(), b.amplitudes());
  return PureState(d, v);
}

MixedState tensor(const MixedState& a, const MixedState& b) {
  Dofs d = concat(a.dofs(), b.dofs());
  return MixedState(d, kron(a.matrix(), b.matrix()));
}

LinearOperator tensor(const LinearOperator& a, const LinearOperator& b) {
  Dofs d = concat(a.dofs(), b.dofs());
  OpFlags f;
  f.unitary = a.flags().unitary && b.flags().unitary;
  f.hermitian = a.flags().hermitian && b.flags().hermitian;
  f.projector = a.flags().projector && b.flags().projector;
  return LinearOperator(d, kron(a.matrix(), b.matrix()), f);
}

Mat embed(const LinearOperator& op, const Dofs& dofs) {
  auto pos = positions_in(op.dofs(), dofs);
  std::vector<int> sub, rest;
  split_indices(dofs, pos, sub, rest);
  int n = total_dim(dofs);
  Mat out = Mat::Zero(n, n);
  const Mat& m = op.matrix();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rest[i] == rest[j]) out(i, j) = m(sub[i], sub[j]);
  return out;
}

PureState apply(const LinearOperator& op, const PureState& s) {
  return PureState(s.dofs(), embed(op, s.dofs()) * s.amplitudes());
}

MixedState apply(const LinearOperator& op, const MixedState& s) {
  Mat u = embed(op, s.dofs());
  return MixedState(s.dofs(), u * s.matrix() * u.adjoint());
}

MixedState apply_kraus(const std::vector<LinearOperator>& kraus, const MixedState& s) {
  Mat out = Mat::Zero(s.dim(), s.dim());
  for (const auto& k : kraus) {
    Mat u = embed(k, s.dofs());
    out += u * s.matrix() * u.adjoint();
  }
  return MixedState(s.dofs(), out);
}

MixedState partial_trace(const MixedState& s, const Dofs& keep) {
  auto pos = positions_in(keep, s.dofs());
  std::vector<int> sub, rest;
  split_indices(s.dofs(), pos, sub, rest);
  Dofs kept;
  for (int p : pos) kept.push_back(s.dofs()[p]);
  int m = total_dim(kept);
  Mat out = Mat::Zero(m, m);
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j)
      if (rest[i] == rest[j]) out(sub[i], sub[j]) += s.matrix()(i, j);
  return MixedState(kept, out);
}

MixedState reduced(const PureState& s, const Dofs& keep) { return partial_trace(MixedState(s), keep); }

cplx inner(const PureState& a, const PureState& b) {
  if (a.dofs().size() != b.dofs().size()) throw DimensionError("inner product over different dofs");
  for (size_t i = 0; i < a.dofs().size(); ++i)
    if (!a.dofs()[i].same(b.dofs()[i])) throw DimensionError("inner product over different dofs");
  return a.amplitudes().dot(b.amplitudes());
}

BlochVector bloch_vector(const MixedState& s, DofLabel l) {
  int p = dof_position(s.dofs(), l);
  if (p < 0) throw DimensionError("state has no dof " + l.name());
  check_two_level(s.dofs()[p]);
  l = s.dofs()[p];
  Mat r = partial_trace(s, {l}).matrix();
  double t = r.trace().real();
  if (t <= 1e-300) throw AbsorbedBeam();
  r /= t;
  BlochVector b;
  b.px = 2.0 * r(1, 0).real();
  b.py = 2.0 * r(1, 0).imag();
  b.pz = (r(0, 0) - r(1, 1)).real();
  return b;
}

BlochVector bloch_vector(const PureState& s, DofLabel l) { return bloch_vector(MixedState(s), l); }

double expectation(const MixedState& s, const LinearOperator& obs) {
  if (!obs.flags().hermitian && !obs.flags().projector &&
      max_abs(obs.matrix() - obs.matrix().adjoint()) > tolerances().structural)
    throw ArgumentError("observable is not Hermitian");
  double t = s.trace();
  if (t <= 1e-300) throw AbsorbedBeam();
  cplx v = (embed(obs, s.dofs()) * s.matrix()).trace();
  return v.real() / t;
}

double expectation(const PureState& s, const LinearOperator& obs) {
  if (!obs.flags().hermitian && !obs.flags().projector &&
      max_abs(obs.matrix() - obs.matrix().adjoint()) > tolerances().structural)
    throw ArgumentError("observable is not Hermitian");
  double n = s.norm2();
  if (n <= 1e-300) throw AbsorbedBeam();
  cplx v = s.amplitudes().dot(embed(obs, s.dofs()) * s.amplitudes());
  return v.real() / n;
}

cplx matrix_element(const PureState& s, const LinearOperator& op) {
  return s.amplitudes().dot(embed(op, s.dofs()) * s.amplitudes());
}

MixedState mixed_from_bloch(double r, const Vec3& n, DofLabel l) {
  check_two_level(l);
  if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("purity must lie in [0, 1]");
  if (std::abs(n.norm() - 1.0) > 1e-9) throw ArgumentError("Bloch direction must be a unit vector");
  Mat m = 0.5 * (Mat::Identity(2, 2) + r * bloch_observable(n, l).matrix());
  return MixedState({l}, m);
}

MixedState mix(const std::vector<MixedState>& states, const std::vector<double>& weights) {
  if (states.empty() || states.size() != weights.size()) throw ArgumentError("mix needs one weight per state");
  double sum = 0;
  for (double w : weights) {
    if (w < 0) throw ArgumentError("mixture weights must be nonnegative");
    sum += w;
  }
  if (sum > 1.0 + 1e-12) throw ArgumentError("mixture weights sum above 1");
  Mat out = Mat::Zero(states[0].dim(), states[0].dim());
  for (size_t i = 0; i < states.size(); ++i) {
    const auto& d = states[i].dofs();
    if (d.size() != states[0].dofs().size()) throw DimensionError("mixing states over different dofs");
    for (size_t k = 0; k < d.size(); ++k)
      if (!d[k].same(states[0].dofs()[k])) throw DimensionError("mixing states over different dofs");
    out += weights[i] * states[i].matrix();
  }
  return MixedState(states[0].dofs(), out);
}

double purity(const MixedState& s, DofLabel l) { return bloch_vector(s, l).norm(); }

int schmidt_rank(const PureState& s, const Dofs& part, double tol) {
  auto pos = positions_in(part, s.dofs());
  std::vector<int> sub, rest;
  split_indices(s.dofs(), pos, sub, rest);
  int na = 1;
  for (int p : pos) na *= s.dofs()[p].dim;
  int nb = s.dim() / na;
  Mat m = Mat::Zero(na, nb);
  for (int i = 0; i < s.dim(); ++i) m(sub[i], rest[i]) = s.amplitudes()(i);
  Eigen::JacobiSVD<Mat> svd(m);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  return rank;
}

// --- dynamics --------------------------------------------------------------

Mat2 spin_step(const Vec3& B, double dt) {
  double b = B.norm();
  if (b == 0.0 || dt == 0.0) return Mat2::Identity();
  // exp(+i mu sigma.B dt/hbar) = U(alpha n) with alpha = -(2 mu/hbar)|B| dt.
  double alpha = -PhysicalConstants::gyromagnetic * b * dt;
  return rotation_matrix(B / b, alpha);
}

LinearOperator time_propagate(const FieldFn& field, double t0, double t1, int steps, DofLabel l) {
  check_two_level(l);
  if (steps < 1) throw ArgumentError("time_propagate needs at least one step");
  double dt = (t1 - t0) / steps;
  Mat2 u = Mat2::Identity();
  for (int k = 0; k < steps; ++k) {
    Vec3 b = field(t0 + (k + 0.5) * dt);
    if (!b.allFinite()) throw ArgumentError("field not finite");
    u = spin_step(b, dt) * u;
  }
  Mat m = u;
  if (max_abs(m.adjoint() * m - Mat::Identity(2, 2)) > tolerances().propagator)
    throw Error("propagator lost unitarity");
  return LinearOperator({l}, m, {true, false, false});
}

}  // namespace nqsim
