#pragma once

// Parameterized reproductions of the surveyed experiments. Each runner turns
// a parameter map (SI values) and a seed into an ExperimentReport.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nqsim/report.hpp"
#include "nqsim/units.hpp"

namespace nqsim {

enum class ExperimentId {
  fourpi,
  cow,
  spin_superposition_dc,
  spin_superposition_rf,
  double_resonance_ifm,
  double_resonance_polarimeter,
  absorption,
  ac_phase,
  sab_dispersion,
  berry_adiabatic,
  wagh_geometric,
  pancharatnam_noncyclic,
  coupled_loop_geometric,
  off_diagonal,
  mixed_phase,
  geo_bell,
  berry_robustness,
  bell_chsh_path,
  bell_chsh_energy,
  kochen_specker,
  leggett,
  ghz_ifm,
  ghz_polarimeter,
  ozawa_uncertainty,
  noncommutation,
  four_blade,
};

const std::vector<ExperimentId>& experiment_ids();
std::string to_string(ExperimentId id);
std::optional<ExperimentId> parse_experiment_id(const std::string& name);

struct ParamSpec {
  std::string name;
  Dimension dim = Dimension::none;
  double default_value = 0.0;  // SI
  std::string help;
};

using Params = std::map<std::string, double>;

struct ExperimentInfo {
  ExperimentId id;
  std::string title;
  std::vector<ParamSpec> params;
  std::function<ExperimentReport(const Params&, std::uint64_t)> run;

  const ParamSpec* find(const std::string& name) const;
  Params defaults() const;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo& experiment_info(ExperimentId id);

// Overrides must name declared parameters (ConfigError otherwise).
Params resolve_params(ExperimentId id, const Params& overrides);
ExperimentReport run_experiment(ExperimentId id, const Params& overrides = {}, std::uint64_t seed = 1);

// --- standalone operations ---------------------------------------------------

struct BerryAdiabaticResult {
  double total = 0, dynamical = 0, geometric = 0;
  double adiabaticity = 0;  // sweep rate / Larmor rate
  std::vector<std::string> warnings;
};

// Spin aligned with a field of Larmor rate `larmor_rate` whose direction
// circles once around a cone of half-angle theta_cone in `sweep_time`.
BerryAdiabaticResult berry_adiabatic(double theta_cone, double sweep_time, double larmor_rate, int steps);

struct BerryNoise {
  double amplitude = 0.0;         // rad, rms of the cone-angle fluctuation
  double correlation_time = 0.0;  // s
};

struct BerryRobustnessOptions {
  double larmor_rate = 2.0 * 3.14159265358979323846 * 1e3;  // rad/s
  int steps_per_period = 12;
  double ramp_time = 0.0;       // s; 0 selects 10 Larmor periods
  double bz_offset_rate = 0.0;  // rad/s, extra z precession during the holds
  double hold_time = 0.0;       // s; 0 selects 2 Larmor periods
};

struct BerryRobustnessResult {
  std::vector<double> times;
  std::vector<double> mean_phase;
  std::vector<double> variance;
  double noise_free_phase = 0.0;
  double slope = 0.0;  // log-log slope of variance vs time (nan if undefined)
  std::vector<std::string> warnings;
};

// Spin-echo Berry sequence: ramp, circle, ramp, hold, pi pulse, hold, ramp,
// reversed circle, ramp. The geometric phase is a quarter of the final
// relative phase between the spin components.
BerryRobustnessResult berry_robustness(double theta_cone, const std::vector<double>& evolution_times,
                                       const BerryNoise& noise, int n_runs, std::uint64_t seed,
                                       const BerryRobustnessOptions& opt = {});
// Geometric phase of a single echo run for a given noise realization.
double berry_echo_phase(double theta_cone, double evolution_time, const BerryNoise& noise, std::uint64_t key,
                        const BerryRobustnessOptions& opt = {});

enum class GeoBellMode { polar_adjusted, azimuthal_adjusted, uncorrected };
std::string to_string(GeoBellMode m);

struct GeoBellResult {
  double S = 0;
  std::array<double, 4> E{};  // E(a,b'), E(a,b), E(a',b), E(a',b')
};

GeoBellResult geo_bell_scan(double gamma, GeoBellMode mode);

struct BellDiscrimination {
  // Probabilities of phi+, phi-, varphi+, varphi- (the latter written
  // (|up>|I> +- i|dn>|II>)/sqrt2).
  std::array<double, 4> p{};
  double product_value = 0;  // -1 weight on phi+-, +1 on varphi+-
};

// Runs the discrimination circuit (spin flip in path II, phase chi on path I,
// optional DC pi flip) on `input` (dofs: path(0), spin). Throws if the
// setting does not separate the four Bell states.
BellDiscrimination ks_bell_discrimination(const PureState& input, double chi, bool dc_flipper_on);

enum class SabMode { static_field, pulsed };
std::string to_string(SabMode m);

// Contrast of a Larmor-phase shift `phase_at_center` applied to a Gaussian
// wavelength band of relative width `spread`.
double sab_dispersion(SabMode mode, double phase_at_center, double spread);

}  // namespace nqsim
