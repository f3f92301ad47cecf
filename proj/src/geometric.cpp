#include <cmath>

#include "nqsim/analysis.hpp"

namespace nqsim {

namespace {

constexpr double kUndefined = 1e-12;

PhaseResult from_complex(cplx z) {
  PhaseResult r;
  r.visibility = std::abs(z);
  if (r.visibility < kUndefined) {
    r.defined = false;
    r.phase = 0.0;
  } else {
    r.phase = wrap_phase(std::arg(z));
  }
  return r;
}

void require_normalized(const PureState& psi) {
  if (std::abs(psi.norm2() - 1.0) > 1e-9) throw ArgumentError("state must be normalized");
}

}  // namespace

PhaseResult pancharatnam(const PureState& psi, const LinearOperator& U) {
  require_normalized(psi);
  return from_complex(matrix_element(psi, U));
}

PhaseResult off_diagonal_phase(const PureState& psi_plus, const PureState& psi_minus, const LinearOperator& U) {
  require_normalized(psi_plus);
  require_normalized(psi_minus);
  if (std::abs(inner(psi_plus, psi_minus)) > 1e-9) throw ArgumentError("off-diagonal states must be orthogonal");
  cplx pm = inner(psi_plus, apply(U, psi_minus));
  cplx mp = inner(psi_minus, apply(U, psi_plus));
  return from_complex(pm * mp);
}

PhaseResult mixed_state_phase(const MixedState& rho, const LinearOperator& U) {
  if (std::abs(rho.trace() - 1.0) > 1e-9) throw ArgumentError("mixed-state phase needs a unit-trace state");
  Mat u = embed(U, rho.dofs());
  return from_complex((u * rho.matrix()).trace());
}

SolidAngle berry_solid_angle(double theta_cone) {
  if (!(theta_cone >= 0 && theta_cone <= kPi)) throw ArgumentError("cone angle must lie in [0, pi]");
  SolidAngle s;
  s.omega = 2.0 * kPi * (1.0 - std::cos(theta_cone));
  s.phase = -s.omega / 2.0;
  return s;
}

double berry_cone_angle(double bz_over_b1) { return std::atan2(1.0, bz_over_b1); }

double spherical_polygon_solid_angle(const std::vector<Vec3>& vertices) {
  if (vertices.size() < 3) throw ArgumentError("polygon needs at least three vertices");
  std::vector<Vec3> v;
  for (const auto& p : vertices) {
    double n = p.norm();
    if (!(n > 0)) throw ArgumentError("polygon vertex must be nonzero");
    v.push_back(p / n);
  }
  // Fan of signed triangles from a reference point away from every vertex's antipode.
  Vec3 ref = Vec3::Zero();
  for (const auto& p : v) ref += p;
  ref = ref.norm() > 1e-6 ? Vec3(ref.normalized()) : Vec3(0, 0, 1);
  auto near_antipode = [&](const Vec3& r) {
    for (const auto& p : v)
      if (r.dot(p) < -1.0 + 1e-9) return true;
    return false;
  };
  for (int k = 0; near_antipode(ref) && k < 8; ++k) ref = Vec3(ref + Vec3(0.3, 0.2, 0.1)).normalized();
  double omega = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec3& a = v[i];
    const Vec3& b = v[(i + 1) % v.size()];
    double num = ref.dot(a.cross(b));
    double den = 1.0 + ref.dot(a) + a.dot(b) + b.dot(ref);
    omega += 2.0 * std::atan2(num, den);
  }
  return omega;
}

ErrorDisturbanceResult ozawa(const PureState& psi, const LinearOperator& A, const LinearOperator& B,
                             const LinearOperator& OA) {
  require_normalized(psi);
  const Dofs& d = psi.dofs();
  const int n = psi.dim();
  const Mat I = Mat::Identity(n, n);
  auto pm_one = [&](const LinearOperator& op, const char* what) {
    Mat m = embed(op, d);
    if ((m - m.adjoint()).norm() > 1e-9 || (m * m - I).norm() > 1e-9)
      throw ArgumentError(std::string(what) + " must be Hermitian with spectrum {-1, +1}");
    return m;
  };
  const Mat a = pm_one(A, "A"), b = pm_one(B, "B"), o = pm_one(OA, "O_A");
  const Vec& v = psi.amplitudes();
  auto ev = [&](const Mat& m) { return v.dot(m * v); };

  // Error: expectation values of O_A on psi, A psi and (A+1) psi.
  Mat a1 = a + I;
  double eps2 = 2.0 + ev(o).real() + ev(a * o * a).real() - ev(a1 * o * a1).real();
  // Disturbance: the same combination with B and the measurement-dephased X_B.
  Mat p_plus = 0.5 * (I + o), p_minus = 0.5 * (I - o);
  Mat xb = p_plus * b * p_plus + p_minus * b * p_minus;
  Mat b1 = b + I;
  double eta2 = 2.0 + ev(xb).real() + ev(b * xb * b).real() - ev(b1 * xb * b1).real();

  ErrorDisturbanceResult r;
  r.epsilon = std::sqrt(std::max(0.0, eps2));
  r.eta = std::sqrt(std::max(0.0, eta2));
  r.sigma_A = std::sqrt(std::max(0.0, 1.0 - std::norm(ev(a))));
  r.sigma_B = std::sqrt(std::max(0.0, 1.0 - std::norm(ev(b))));
  r.bound = 0.5 * std::abs(ev(a * b - b * a));
  r.heisenberg_lhs = r.epsilon * r.eta;
  r.ozawa_lhs = r.epsilon * r.eta + r.epsilon * r.sigma_B + r.sigma_A * r.eta;
  return r;
}

std::pair<Vec3, Vec3> noncommutation_polarizations(double beta) {
  const LinearOperator A = spin_rotation(Vec3(1, 0, 0), kPi);
  const LinearOperator B = spin_rotation(Vec3(std::cos(beta), 0, std::sin(beta)), kPi);
  const PureState up = spin_up();
  return {bloch_vector(apply(A, apply(B, up))).vec(), bloch_vector(apply(B, apply(A, up))).vec()};
}

}  // namespace nqsim
