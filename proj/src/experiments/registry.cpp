#include <algorithm>
#include <numeric>

#include "common.hpp"

namespace nqsim {

using namespace exp;

namespace {

constexpr double kPiD = kPi;
constexpr double kDeg = kPi / 180.0;

struct Row {
  ExperimentId id;
  const char* name;
  const char* title;
  ExperimentReport (*run)(const Params&, std::uint64_t);
  std::vector<ParamSpec> params;
};

std::vector<Row> rows() {
  using D = Dimension;
  return {
      {ExperimentId::fourpi, "fourpi", "4pi spinor symmetry in the interferometer", run_fourpi,
       {{"field_integral", D::field_integral, 1.44e-4, "DC coil field integral in path I"},
        {"velocity", D::velocity, fourpi_default_velocity(), "neutron velocity"},
        {"alpha_max", D::angle, 8 * kPiD, "upper end of the Larmor-angle scan"},
        {"points", D::none, 161, "scan points"},
        {"mean_counts", D::none, 1e4, "mean counts per point at unit intensity"},
        {"reflectivity", D::none, 0.5, "blade reflectivity"}}},
      {ExperimentId::cow, "cow", "gravitationally induced phase (tilt scan)", run_cow,
       {{"wavelength", D::length, 1.445e-10, "neutron wavelength"},
        {"path_length", D::length, 0.04, "interferometer path length L"},
        {"height", D::length, 0.03, "height difference at 90 deg tilt"},
        {"tilt_max", D::angle, 15 * kDeg, "scan range +-tilt_max"},
        {"points", D::none, 121, "scan points"}}},
      {ExperimentId::spin_superposition_dc, "spin_superposition_dc",
       "coherent spin superposition from a DC flip in one path", run_spin_superposition_dc,
       {{"points", D::none, 73, "phase-shifter points"}}},
      {ExperimentId::spin_superposition_rf, "spin_superposition_rf",
       "spin superposition with an RF flip: stroboscopic polarization", run_spin_superposition_rf,
       {{"rf_frequency", D::frequency, 32e3, "RF frequency"},
        {"guide_field", D::field, 1.1e-3, "guide field B0"},
        {"chi", D::angle, kPiD / 3, "phase shifter"},
        {"points", D::none, 64, "detection times per RF period"}}},
      {ExperimentId::double_resonance_ifm, "double_resonance_ifm",
       "double-resonance flippers in both interferometer paths", run_double_resonance_ifm,
       {{"nu1", D::frequency, 71899.80, "flipper frequency in path I"},
        {"nu2", D::frequency, 71899.78, "flipper frequency in path II"},
        {"periods", D::none, 4, "beat periods scanned"},
        {"points", D::none, 200, "time points"}}},
      {ExperimentId::double_resonance_polarimeter, "double_resonance_polarimeter",
       "double resonance in a polarimeter: slow spin beat", run_double_resonance_polarimeter,
       {{"delta_nu", D::frequency, 20e-6, "frequency difference of the two flippers"},
        {"periods", D::none, 3, "beat periods scanned"},
        {"points", D::none, 150, "time points"}}},
      {ExperimentId::absorption, "absorption", "stochastic versus deterministic absorption", run_absorption,
       {{"t_min", D::none, 0.05, "smallest transmissivity"},
        {"t_points", D::none, 12, "transmissivities (log spaced up to 1)"},
        {"points", D::none, 24, "phase-shifter points per fringe"}}},
      {ExperimentId::ac_phase, "ac_phase", "Aharonov-Casher phase of the electrode system", run_ac_phase,
       {{"voltage", D::voltage, 45e3, "electrode voltage"},
        {"gap", D::length, 0.154e-2, "electrode distance"},
        {"path_length", D::length, 2.53e-2, "electrode path length"},
        {"velocity", D::velocity, 2198.0, "neutron velocity"}}},
      {ExperimentId::sab_dispersion, "sab_dispersion", "static versus pulsed field dispersion", run_sab_dispersion,
       {{"spread", D::none, 0.02, "relative wavelength spread"},
        {"phase_max", D::angle, 40 * kPiD, "largest Larmor phase at the band centre"},
        {"wavelength", D::length, 1.8e-10, "band centre"},
        {"points", D::none, 41, "phase points"}}},
      {ExperimentId::berry_adiabatic, "berry_adiabatic", "Berry phase of an adiabatic circuit", run_berry_adiabatic,
       {{"theta_cone", D::angle, kPiD / 2, "cone half-angle"},
        {"ratio", D::none, 1e-3, "sweep rate over Larmor rate"},
        {"larmor_frequency", D::frequency, 1e3, "Larmor frequency"},
        {"steps_per_period", D::none, 32, "propagator steps per Larmor period"}}},
      {ExperimentId::wagh_geometric, "wagh_geometric", "geometric phase from pi flips about tilted axes",
       run_wagh_geometric,
       {{"beta1", D::angle, 0.0, "flip axis azimuth in path I"},
        {"dynamical_angle", D::angle, 0.7, "extra z precession in path II"},
        {"points", D::none, 25, "axis offsets"}}},
      {ExperimentId::pancharatnam_noncyclic, "pancharatnam_noncyclic", "noncyclic Pancharatnam phase",
       run_pancharatnam_noncyclic,
       {{"theta", D::angle, kPiD / 3, "polar angle of the spin"},
        {"points", D::none, 37, "precession angles"}}},
      {ExperimentId::coupled_loop_geometric, "coupled_loop_geometric", "geometric phase in a coupled double loop",
       run_coupled_loop_geometric,
       {{"transmissivity", D::none, 0.5, "absorber transmissivity in loop A"},
        {"points", D::none, 25, "loop phases"}}},
      {ExperimentId::off_diagonal, "off_diagonal", "off-diagonal geometric phase", run_off_diagonal,
       {{"theta", D::angle, kPiD / 2, "polar angle of psi+"},
        {"alpha", D::angle, kPiD / 2, "rotation angle of U about z"},
        {"points", D::none, 32, "phase-shifter points"}}},
      {ExperimentId::mixed_phase, "mixed_phase", "geometric phase of mixed spin states", run_mixed_phase,
       {{"r_points", D::none, 6, "purities"},
        {"delta_points", D::none, 12, "half-rotation angles"},
        {"points", D::none, 24, "phase-shifter points"}}},
      {ExperimentId::geo_bell, "geo_bell", "Bell inequality with a geometric phase", run_geo_bell,
       {{"points", D::none, 33, "gamma points in [0, pi]"}}},
      {ExperimentId::berry_robustness, "berry_robustness", "robustness of the Berry phase against field noise",
       run_berry_robustness,
       {{"theta_cone", D::angle, 0.6, "cone half-angle"},
        {"noise_amplitude", D::angle, 0.05, "rms fluctuation of the cone angle"},
        {"correlation_periods", D::none, 5, "noise correlation time in Larmor periods"},
        {"t_min_periods", D::none, 50, "shortest circuit time in Larmor periods"},
        {"t_max_periods", D::none, 500, "longest circuit time in Larmor periods"},
        {"t_points", D::none, 4, "circuit times (log spaced)"},
        {"runs", D::none, 500, "noise realizations per time"},
        {"steps_per_period", D::none, 12, "propagator steps per Larmor period"},
        {"offset_fraction", D::none, 0.02, "B_z offset for the echo check, in Larmor rates"}}},
      {ExperimentId::bell_chsh_path, "bell_chsh_path", "CHSH test with spin-path entanglement", run_bell_chsh_path,
       {{"purity", D::none, 0.836, "depolarization purity emulating the measured value"},
        {"mean_counts", D::none, 2e4, "mean counts per correlation setting"}}},
      {ExperimentId::bell_chsh_energy, "bell_chsh_energy", "CHSH test with spin-energy entanglement",
       run_bell_chsh_energy,
       {{"purity", D::none, 0.8249, "depolarization purity emulating the measured value"},
        {"mean_counts", D::none, 2e4, "mean counts per correlation setting"},
        {"rf_frequency", D::frequency, 32e3, "RF frequency"},
        {"guide_field", D::field, 1.1e-3, "guide field B0"}}},
      {ExperimentId::kochen_specker, "kochen_specker", "contextuality witness with spin-path observables",
       run_kochen_specker, {{"purity", D::none, 2.291 / 3.0, "depolarization purity emulating the measured value"}}},
      {ExperimentId::leggett, "leggett", "Leggett-type inequality", run_leggett,
       {{"points", D::none, 401, "phi grid over [0, 0.5 pi]"}}},
      {ExperimentId::ghz_ifm, "ghz_ifm", "GHZ-type spin-path-energy entanglement", run_ghz_ifm,
       {{"visibility", D::none, 2.558 / 4.0, "correlation visibility emulating the measured value"},
        {"points", D::none, 101, "visibility sweep points"}}},
      {ExperimentId::ghz_polarimeter, "ghz_polarimeter", "GHZ-type spin-momentum-energy entanglement",
       run_ghz_polarimeter,
       {{"visibility", D::none, 3.936 / 4.0, "correlation visibility emulating the measured value"},
        {"guide_field", D::field, 1.1e-3, "guide field B0"},
        {"wavelength", D::length, 1.92e-10, "neutron wavelength"}}},
      {ExperimentId::ozawa_uncertainty, "ozawa_uncertainty", "error-disturbance uncertainty relation",
       run_ozawa_uncertainty,
       {{"configs", D::none, 1e4, "random projective configurations"},
        {"points", D::none, 181, "phi points in the canonical scan"}}},
      {ExperimentId::noncommutation, "noncommutation", "non-commutation of pi rotations", run_noncommutation,
       {{"draws", D::none, 100, "random beta values"}}},
      {ExperimentId::four_blade, "four_blade", "vibration resilience of a four-blade interferometer",
       run_four_blade,
       {{"transit_time", D::time, 5e-5, "neutron transit time"},
        {"period_factor", D::none, 100, "vibration period over transit time"},
        {"kick", D::angle, kPiD / 2, "phase kick amplitude"},
        {"runs", D::none, 400, "vibration phases per point"},
        {"points", D::none, 16, "phase points per fringe"}}},
  };
}

struct Table {
  std::vector<ExperimentInfo> infos;
  std::vector<ExperimentId> ids;
  std::vector<std::string> names;
};

const Table& table() {
  static const Table t = [] {
    Table t;
    for (auto& r : rows()) {
      t.infos.push_back({r.id, r.title, r.params, r.run});
      t.ids.push_back(r.id);
      t.names.push_back(r.name);
    }
    return t;
  }();
  return t;
}

}  // namespace

const std::vector<ExperimentId>& experiment_ids() { return table().ids; }

std::string to_string(ExperimentId id) {
  const auto& t = table();
  for (std::size_t i = 0; i < t.ids.size(); ++i)
    if (t.ids[i] == id) return t.names[i];
  throw ArgumentError("unknown experiment id");
}

std::optional<ExperimentId> parse_experiment_id(const std::string& name) {
  const auto& t = table();
  for (std::size_t i = 0; i < t.names.size(); ++i)
    if (t.names[i] == name) return t.ids[i];
  return std::nullopt;
}

const ParamSpec* ExperimentInfo::find(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

Params ExperimentInfo::defaults() const {
  Params out;
  for (const auto& p : params) out[p.name] = p.default_value;
  return out;
}

const std::vector<ExperimentInfo>& registry() { return table().infos; }

const ExperimentInfo& experiment_info(ExperimentId id) {
  for (const auto& i : registry())
    if (i.id == id) return i;
  throw ArgumentError("unknown experiment id");
}

Params resolve_params(ExperimentId id, const Params& overrides) {
  const auto& info = experiment_info(id);
  Params p = info.defaults();
  for (const auto& [k, v] : overrides) {
    if (!info.find(k)) throw ConfigError("/" + k, "unknown parameter for experiment " + to_string(id));
    if (!std::isfinite(v)) throw ConfigError("/" + k, "parameter must be finite");
    p[k] = v;
  }
  return p;
}

ExperimentReport run_experiment(ExperimentId id, const Params& overrides, std::uint64_t seed) {
  Params p = resolve_params(id, overrides);
  return experiment_info(id).run(p, seed);
}

namespace exp {

ExperimentReport new_report(ExperimentId id, const Params& p, std::uint64_t seed) {
  ExperimentReport r;
  r.id = to_string(id);
  r.seed = seed;
  const auto& info = experiment_info(id);
  for (const auto& spec : info.params) {
    auto it = p.find(spec.name);
    double v = it == p.end() ? spec.default_value : it->second;
    r.inputs[spec.name] = format_double(v) + si_suffix(spec.dim);
  }
  return r;
}

double get(const Params& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw ArgumentError("missing parameter '" + name + "'");
  return it->second;
}

int get_int(const Params& p, const std::string& name, int lo) {
  double v = get(p, name);
  if (!(v >= lo) || v > 1e8 || std::floor(v) != v)
    throw ConfigError("/" + name, "expected an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out = linspace(std::log(a), std::log(b), n);
  for (auto& x : out) x = std::exp(x);
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly).first;
}

BeamlineTopology lll(double reflectivity) {
  BeamlineTopology t;
  t.kind = TopologyKind::LLL;
  t.splitter = t.mirror = t.analyzer = BeamSplitterSpec::symmetric(reflectivity);
  return t;
}

namespace {
template <class S>
FringeScan scan_impl(const BeamlineTopology& topo, const S& in, const std::string& param,
                     const std::vector<double>& xs, double mean_counts, std::uint64_t seed) {
  std::vector<double> io(xs.size()), ih(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    auto pr = propagate(topo, in, param, xs[i]);
    io[i] = pr.intensities.I_O;
    ih[i] = pr.intensities.I_H;
  });
  return make_scan(param, xs, io, ih, mean_counts, seed);
}
}  // namespace

FringeScan scan_topology(const BeamlineTopology& topo, const MixedState& in, const std::string& param,
                         const std::vector<double>& xs, double mean_counts, std::uint64_t seed) {
  return scan_impl(topo, in, param, xs, mean_counts, seed);
}

FringeScan scan_topology(const BeamlineTopology& topo, const PureState& in, const std::string& param,
                         const std::vector<double>& xs, double mean_counts, std::uint64_t seed) {
  return scan_impl(topo, in, param, xs, mean_counts, seed);
}

MixedState unpolarized() { return mixed_from_bloch(0.0, Vec3(0, 0, 1)); }

double fourpi_default_velocity() {
  return std::abs(PC::gyromagnetic) * 1.44e-4 / (704.0 * kDeg);
}

}  // namespace exp

}  // namespace nqsim
