#include <cmath>

#include "nqsim/analysis.hpp"

namespace nqsim {

Correlation expectation_from_counts(double n_pp, double n_mm, double n_pm, double n_mp) {
  if (n_pp < 0 || n_mm < 0 || n_pm < 0 || n_mp < 0) throw ArgumentError("counts must be nonnegative");
  const double N = n_pp + n_mm + n_pm + n_mp;
  if (!(N > 0)) throw ArgumentError("zero total counts");
  const double E = (n_pp + n_mm - n_pm - n_mp) / N;
  const double var = ((1 - E) * (1 - E) * (n_pp + n_mm) + (1 + E) * (1 + E) * (n_pm + n_mp)) / (N * N);
  return {E, std::sqrt(var)};
}

namespace {

InequalityResult make(std::string name, double value, double bound, double sigma, bool two_sided) {
  InequalityResult r;
  r.name = std::move(name);
  r.value = value;
  r.bound = bound;
  r.sigma = sigma;
  r.violated = (two_sided ? std::abs(value) : value) - bound > 0;
  return r;
}

}  // namespace

InequalityResult chsh(double E11, double E12, double E21, double E22, double sigma) {
  return make("CHSH", E11 + E12 - E21 + E22, 2.0, sigma, true);
}

InequalityResult ks_witness(double E_xx, double E_yy, double E_prod, double sigma) {
  return make("Kochen-Specker", -E_xx - E_yy - E_prod, 1.0, sigma, false);
}

double leggett_bound(double phi) { return 4.0 - 4.0 / kPi * std::abs(std::sin(phi / 2)); }

double leggett_qm(double phi) { return 2.0 * std::abs(1.0 + std::cos(phi)); }

InequalityResult leggett(double E1_phi, double E1_0, double E2_phi, double E2_0, double phi, double sigma) {
  return make("Leggett", std::abs(E1_phi + E1_0) + std::abs(E2_phi + E2_0), leggett_bound(phi), sigma, false);
}

InequalityResult mermin(double E_xxx, double E_xyy, double E_yxy, double E_yyx, double sigma) {
  return make("Mermin", E_xxx - E_xyy - E_yxy - E_yyx, 2.0, sigma, true);
}

}  // namespace nqsim
