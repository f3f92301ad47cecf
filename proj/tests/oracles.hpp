#pragma once

// Independent reference computations for the tests. Plain Eigen only; nothing
// here calls into the library.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace oracle {

using cd = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

inline M2 sx() { M2 m; m << 0, 1, 1, 0; return m; }
inline M2 sy() { M2 m; m << 0, cd(0, -1), cd(0, 1), 0; return m; }
inline M2 sz() { M2 m; m << 1, 0, 0, -1; return m; }
inline M2 n_sigma(double x, double y, double z) { return x * sx() + y * sy() + z * sz(); }

// exp(M) by Taylor series with scaling and squaring.
template <class M>
M expm(const M& a) {
  int s = 0;
  double n = a.norm();
  while (n > 0.5) { n /= 2; ++s; }
  const M b = a / std::pow(2.0, s);
  M term = M::Identity(a.rows(), a.cols()), sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline M4 kron(const M2& a, const M2& b) {
  M4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

// Ideal LLL interferometer with lossless symmetric blades of reflectivity R
// (r = i sqrt R, t = sqrt(1-R)); forward (O) and deviated (H) beams.
inline double lll_O(double R, double chi) { return 2.0 * (1.0 - R) * R * R * (1.0 + std::cos(chi)); }
inline double lll_H(double R, double chi) {
  return R * std::norm(cd(1.0 - R) - R * std::exp(cd(0, chi)));
}

// Probe-qubit indirect measurement of O_A: error and disturbance on |psi>|0>.
struct ProbeED {
  double eps, eta;
};
inline ProbeED probe(const Eigen::Vector2cd& psi, const M2& A, const M2& B, const M2& OA) {
  Eigen::SelfAdjointEigenSolver<M2> es(OA);
  const Eigen::Vector2cd vm = es.eigenvectors().col(0), vp = es.eigenvectors().col(1);
  const M2 I = M2::Identity();
  const M4 U = kron(vp * vp.adjoint(), I) + kron(vm * vm.adjoint(), sx());
  Eigen::Vector4cd in;
  in << psi(0), 0, psi(1), 0;
  const M4 meter = U.adjoint() * kron(I, sz()) * U;
  const M4 bo = U.adjoint() * kron(B, I) * U;
  return {((meter - kron(A, I)) * in).norm(), ((bo - kron(B, I)) * in).norm()};
}

}  // namespace oracle
