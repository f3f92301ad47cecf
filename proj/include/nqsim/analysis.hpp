#pragma once

// Count statistics, fringe fitting, inequality evaluators, geometric phases
// and the error-disturbance quantities.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nqsim/qcore.hpp"

namespace nqsim {

// --- counts and fringes ----------------------------------------------------

std::int64_t sample_counts(double intensity, double mean_counts, std::uint64_t seed, std::uint64_t index);

struct FringeScan {
  std::string param;
  std::vector<double> xs;
  std::vector<double> intensity_O, intensity_H;  // expected fractions
  std::vector<std::int64_t> counts_O, counts_H;  // empty when noiseless
  double mean_counts = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return xs.size(); }
  bool noisy() const { return mean_counts > 0; }
  void validate() const;
};

// Draws Poisson counts for both ports (stream index = 2*point + port) when
// mean_counts > 0; otherwise leaves the count arrays empty.
FringeScan make_scan(std::string param, std::vector<double> xs, std::vector<double> intensity_O,
                     std::vector<double> intensity_H, double mean_counts, std::uint64_t seed);

enum class Port { O, H };

struct FitResult {
  double offset = 0, amplitude = 0, phase = 0, contrast = 0;
  double offset_err = 0, amplitude_err = 0, phase_err = 0, contrast_err = 0;
  double chi2 = 0;
  int dof = 0;
};

// Model y = a0 + a_c cos x + a_s sin x = a0 (1 + C cos(x + phase)).
FitResult fit_sinusoid(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<double>& variances);
FitResult fit_fringe(const FringeScan& scan, Port port = Port::O);

struct PeriodFit {
  double period = 0, period_err = 0;
  double offset = 0, amplitude = 0, phase = 0;
  double chi2 = 0;
  int dof = 0;
};

// Nonlinear least squares with free frequency; the search starts from a
// grid of trial periods in [min_period, max_period].
PeriodFit fit_period(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& variances, double min_period, double max_period);
PeriodFit fit_period(const FringeScan& scan, double min_period, double max_period, Port port = Port::O);

// Ordinary least-squares slope and intercept.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// --- correlations and inequalities -----------------------------------------

struct Correlation {
  double E = 0;
  double sigma = 0;
};

using CorrelationSet = std::map<std::string, Correlation>;

// Correlation from four coincidence-like counts:
// E = (N++ + N-- - N+- - N-+) / sum.
Correlation expectation_from_counts(double n_pp, double n_mm, double n_pm, double n_mp);

struct InequalityResult {
  std::string name;
  double value = 0;
  double bound = 0;
  double sigma = 0;
  bool violated = false;
};

InequalityResult chsh(double E11, double E12, double E21, double E22, double sigma = 0);
InequalityResult ks_witness(double E_xx, double E_yy, double E_prod, double sigma = 0);
InequalityResult leggett(double E1_phi, double E1_0, double E2_phi, double E2_0, double phi, double sigma = 0);
double leggett_bound(double phi);
double leggett_qm(double phi);
InequalityResult mermin(double E_xxx, double E_xyy, double E_yxy, double E_yyx, double sigma = 0);

// --- geometric phases ------------------------------------------------------

struct PhaseResult {
  double phase = 0;       // (-pi, pi]; 0 when undefined
  double visibility = 0;  // modulus of the underlying complex number
  bool defined = true;
};

PhaseResult pancharatnam(const PureState& psi, const LinearOperator& U);
PhaseResult off_diagonal_phase(const PureState& psi_plus, const PureState& psi_minus, const LinearOperator& U);
PhaseResult mixed_state_phase(const MixedState& rho, const LinearOperator& U);

struct SolidAngle {
  double omega = 0;
  double phase = 0;
};

SolidAngle berry_solid_angle(double theta_cone);
// Cone angle for a static field B_z with a rotating transverse field B1.
double berry_cone_angle(double bz_over_b1);

// Signed solid angle enclosed by a closed polygon of unit vectors joined by
// geodesics (positive for counter-clockwise as seen from outside).
double spherical_polygon_solid_angle(const std::vector<Vec3>& vertices);

// --- error-disturbance -----------------------------------------------------

struct ErrorDisturbanceResult {
  double epsilon = 0, eta = 0;
  double sigma_A = 0, sigma_B = 0;
  double bound = 0;
  double heisenberg_lhs = 0;
  double ozawa_lhs = 0;
};

ErrorDisturbanceResult ozawa(const PureState& psi, const LinearOperator& A, const LinearOperator& B,
                             const LinearOperator& OA);

// Final polarizations for the sequences A-after-B and B-after-A with
// A = U(pi x), B = U(pi (cos beta, 0, sin beta)) acting on |up>.
std::pair<Vec3, Vec3> noncommutation_polarizations(double beta);

}  // namespace nqsim
