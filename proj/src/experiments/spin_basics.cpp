#include <algorithm>

#include "common.hpp"
#include "nqsim/rng.hpp"

namespace nqsim {

namespace exp {

namespace {

constexpr double kDeg = kPi / 180.0;

std::vector<double> uniform_draws(std::uint64_t seed, std::uint64_t stream, int n, double lo, double hi) {
  CounterRng rng(stream_key(seed, {stream}));
  std::vector<double> out(n);
  for (auto& x : out) x = lo + (hi - lo) * rng.uniform();
  return out;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

// Spin amplitudes summed over the energy ladder (what a stroboscopic spin
// analysis sees at the detection time), as a Bloch vector.
Vec3 stroboscopic_bloch(const PureState& s) {
  const int ps = dof_position(s.dofs(), DofLabel::spin());
  if (ps != 0 || s.dofs().size() != 2) throw DimensionError("expected (spin, energy) state");
  const int ne = s.dofs()[1].dim;
  Vec a = Vec::Zero(2);
  for (int sp = 0; sp < 2; ++sp)
    for (int k = 0; k < ne; ++k) a(sp) += s.amplitudes()(sp * ne + k);
  PureState spin(Dofs{DofLabel::spin()}, a);
  return bloch_vector(spin.normalized()).vec();
}

}  // namespace

ExperimentReport run_fourpi(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::fourpi, p, seed);
  const double BL = get(p, "field_integral"), v = get(p, "velocity"), R = get(p, "reflectivity");
  const int n = get_int(p, "points", 16);
  const double amax = get(p, "alpha_max");
  if (!(amax >= 4 * kPi)) throw ConfigError("/alpha_max", "scan must cover at least one 4pi period");

  const double alpha0 = larmor_angle(BL, 1.0, v);
  rep.derived["alpha_at_field_integral_deg"] = alpha0 / kDeg;
  rep.check("larmor angle at 144 Gcm [deg]", 704.0, alpha0 / kDeg, 38.0, kPaper, Relation::abs, "704+-38 deg");

  BeamlineTopology topo = lll(R);
  topo.paths[0].push_back({"coil", DcCoilSpec{Vec3(0, 0, 1), 0.0}});
  const MixedState in = unpolarized();
  const auto xs = linspace(0.0, amax, n);

  FringeScan clean = scan_topology(topo, in, "coil", xs, 0.0, seed);
  PeriodFit f0 = fit_period(clean, 2 * kPi, 8 * kPi);
  rep.derived["period_noiseless"] = f0.period;
  rep.check("fringe period (noiseless) = 4 pi", 4 * kPi, f0.period, 1e-4, kPaper, Relation::rel, "I0 ~ 1+cos(alpha/2)");

  const double T = 1.0 - R;
  const double mean_I = 2.0 * T * R * R;  // scan average of I_O
  const double counts = get(p, "mean_counts");
  if (counts > 0) {
    FringeScan noisy = scan_topology(topo, in, "coil", xs, counts / mean_I, seed);
    PeriodFit f1 = fit_period(noisy, 2 * kPi, 8 * kPi);
    rep.derived["period_counts"] = f1.period;
    rep.derived["period_counts_err"] = f1.period_err;
    rep.check("fringe period (counts) within 3 sigma of 4 pi", 4 * kPi, f1.period, 3.0 * f1.period_err, kPaper,
              Relation::abs, "I0 ~ 1+cos(alpha/2)");
    rep.add_scan(std::move(noisy));
  }
  rep.add_scan(std::move(clean));

  // Period expressed as a field integral.
  const double bl_period = 4 * kPi * v / std::abs(PC::gyromagnetic);
  rep.derived["field_integral_period_Gcm"] = bl_period / 1e-6;
  rep.check("field-integral period [Gcm]", 144.0, bl_period / 1e-6, 8.0, kPaper, Relation::abs, "(144+-8) Gcm");

  // Closed form against full propagation.
  const auto as = uniform_draws(seed, 11, 100, 0.0, 8 * kPi);
  const auto cs = uniform_draws(seed, 12, 100, -kPi, kPi);
  const auto rs = uniform_draws(seed, 13, 100, 0.2, 0.8);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    BeamlineTopology t = lll(rs[i]);
    t.delta_chi = cs[i];
    t.paths[0].push_back({"coil", DcCoilSpec{Vec3(0, 0, 1), as[i]}});
    double I = propagate(t, in).intensities.I_O;
    double Rr = rs[i], Tt = 1 - Rr;
    double closed = 2 * Tt * Rr * Rr * (1 + std::cos(as[i] / 2) * std::cos(cs[i]));
    worst = std::max(worst, std::abs(I - closed));
  }
  rep.derived["closed_form_max_dev"] = worst;
  rep.check("closed form vs propagation (100 draws)", 0.0, worst, 1e-10, kDerived);
  return rep;
}

ExperimentReport run_cow(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::cow, p, seed);
  GravityTiltSpec g;
  g.L = get(p, "path_length");
  g.deltaH_max = get(p, "height");
  g.validate();
  const double lambda = get(p, "wavelength"), tmax = get(p, "tilt_max");
  const int n = get_int(p, "points", 16);

  BeamlineTopology topo = lll();
  topo.paths[1].push_back({"gravity", PhaseShifterSpec{0.0}});
  const MixedState in = unpolarized();
  const auto tilts = linspace(-tmax, tmax, n);
  std::vector<double> io(n), ih(n), chis(n);
  parallel_for(n, [&](std::size_t i) {
    GravityTiltSpec gi = g;
    gi.phi = tilts[i];
    chis[i] = gravity_phase(lambda, g.L, gi.deltaH());
    auto pr = propagate(topo, in, "gravity", chis[i]);
    io[i] = pr.intensities.I_O;
    ih[i] = pr.intensities.I_H;
  });
  std::vector<double> deg(n);
  for (int i = 0; i < n; ++i) deg[i] = tilts[i] / kDeg;
  const double coef = std::abs(gravity_phase(lambda, g.L, g.deltaH_max));
  rep.derived["phase_per_unit_sin_tilt"] = coef;
  const double small_angle_period = 2 * kPi / coef / kDeg;
  rep.derived["small_angle_period_deg"] = small_angle_period;

  PeriodFit f = fit_period(deg, io, ones(n), 0.3 * small_angle_period, 3.0 * small_angle_period);
  rep.derived["period_deg"] = f.period;
  rep.check("tilt period about 6 deg", 6.0, f.period, 0.2, kPaper, Relation::rel, "6 deg");
  rep.check("tilt period vs small-angle estimate", small_angle_period, f.period, 0.02, kDerived, Relation::rel);
  rep.add_scan(make_scan("tilt_deg", deg, io, ih, 0.0, seed));

  const auto ls = uniform_draws(seed, 21, 100, 1e-10, 3e-10);
  const auto ps = uniform_draws(seed, 22, 100, -kPi / 6, kPi / 6);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    GravityTiltSpec gi = g;
    gi.phi = ps[i];
    double chi = gravity_phase(ls[i], g.L, gi.deltaH());
    double I = propagate(topo, in, "gravity", chi).intensities.I_O;
    double closed = 2 * 0.5 * 0.25 * (1 + std::cos(chi));
    worst = std::max(worst, std::abs(I - closed));
  }
  rep.derived["closed_form_max_dev"] = worst;
  rep.check("closed form vs propagation (100 draws)", 0.0, worst, 1e-10, kDerived);
  const double r2 = gravity_phase(2 * lambda, g.L, g.deltaH_max) / gravity_phase(lambda, g.L, g.deltaH_max);
  rep.check("phase linear in wavelength", 2.0, r2, 1e-12, kTrivial);
  return rep;
}

ExperimentReport run_spin_superposition_dc(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::spin_superposition_dc, p, seed);
  const int n = get_int(p, "points", 5);
  BeamlineTopology topo = lll();
  topo.paths[1].push_back({"flip", DcCoilSpec{Vec3(0, 1, 0), kPi}});
  const PureState in = spin_up();
  const auto chis = linspace(-kPi, kPi, n);
  std::vector<double> io(n), ih(n), dev(n);
  parallel_for(n, [&](std::size_t i) {
    auto pr = propagate(topo, in, "delta_chi", chis[i]);
    io[i] = pr.intensities.I_O;
    ih[i] = pr.intensities.I_H;
    Vec3 b = bloch_vector(pr.exit_O.normalized()).vec();
    dev[i] = (b - Vec3(std::cos(chis[i]), std::sin(chis[i]), 0)).cwiseAbs().maxCoeff();
  });
  const double worst = *std::max_element(dev.begin(), dev.end());
  auto [lo, hi] = std::minmax_element(io.begin(), io.end());
  rep.derived["bloch_max_dev"] = worst;
  rep.derived["intensity_O"] = io[0];
  rep.check("exit polarization (cos chi, sin chi, 0)", 0.0, worst, 1e-10, kDerived);
  rep.check("no intensity modulation", 0.0, *hi - *lo, 1e-12, kDerived);
  rep.add_scan(make_scan("delta_chi", chis, io, ih, 0.0, seed));
  return rep;
}

ExperimentReport run_spin_superposition_rf(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::spin_superposition_rf, p, seed);
  const double nu = get(p, "rf_frequency"), B0 = get(p, "guide_field"), chi = get(p, "chi");
  const int n = get_int(p, "points", 4);
  RfFlipperSpec rf;
  rf.omega = 2 * kPi * nu;
  rf.B0 = 0.0;  // resonance is reported separately
  const double w_res = rf_resonance(B0, 0.0);
  rep.derived["resonance_frequency_Hz"] = w_res / (2 * kPi);
  rep.check("32 kHz resonant at about 1.1 mT", 32e3, w_res / (2 * kPi), 0.01, kPaper, Relation::rel,
            "32 kHz, B0 ~ 1.1 mT");

  const DofLabel E = DofLabel::energy(0, 1);
  const PureState in = tensor(spin_up(), energy_level(0, E));
  BeamlineTopology topo = lll();
  topo.delta_chi = chi;
  topo.paths[1].push_back({"rf", RfElement{rf, 0.0}});
  const double period = 1.0 / nu;
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = period * i / n;
  std::vector<Vec3> strobe(n);
  std::vector<double> dev(n), transverse(n);
  parallel_for(n, [&](std::size_t i) {
    auto pr = propagate(topo, in, "rf", ts[i]);
    PureState o = pr.exit_O.normalized();
    strobe[i] = stroboscopic_bloch(o);
    const double ph = chi + rf.omega * ts[i];
    dev[i] = (strobe[i] - Vec3(std::cos(ph), std::sin(ph), 0)).cwiseAbs().maxCoeff();
    BlochVector red = bloch_vector(reduced(o, {DofLabel::spin()}));
    transverse[i] = std::hypot(red.px, red.py);
  });
  Vec3 mean = Vec3::Zero();
  for (const auto& b : strobe) mean += b / n;
  rep.derived["strobe_max_dev"] = *std::max_element(dev.begin(), dev.end());
  rep.derived["time_average_transverse"] = std::hypot(mean.x(), mean.y());
  rep.derived["energy_traced_transverse"] = *std::max_element(transverse.begin(), transverse.end());
  rep.check("stroboscopic polarization (cos(chi+wt), sin(chi+wt), 0)", 0.0, rep.derived["strobe_max_dev"], 1e-10,
            kDerived);
  rep.check("time-averaged transverse polarization", 0.0, rep.derived["time_average_transverse"], 1e-10, kDerived);
  rep.check("energy-traced transverse polarization", 0.0, rep.derived["energy_traced_transverse"], 1e-10,
            kDerived);
  return rep;
}

ExperimentReport run_double_resonance_ifm(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::double_resonance_ifm, p, seed);
  const double nu1 = get(p, "nu1"), nu2 = get(p, "nu2");
  const double dnu = std::abs(nu1 - nu2);
  if (!(dnu > 0)) throw ConfigError("/nu2", "flipper frequencies must differ");
  const int periods = get_int(p, "periods", 2), n = get_int(p, "points", 16);
  // Phases are taken in the frame rotating at the mean frequency; the common
  // part is a global phase of the O beam.
  const double mean = 0.5 * (nu1 + nu2);
  RfFlipperSpec r1, r2;
  r1.omega = 2 * kPi * (nu1 - mean);
  r2.omega = 2 * kPi * (nu2 - mean);
  const DofLabel E = DofLabel::energy(0, 1);
  const PureState in = tensor(spin_up(), energy_level(0, E));
  const double T = periods / dnu;
  const auto ts = linspace(0.0, T, n);
  std::vector<double> io(n), ih(n);
  parallel_for(n, [&](std::size_t i) {
    BeamlineTopology topo = lll();
    topo.paths[0].push_back({"rf1", RfElement{r1, ts[i]}});
    topo.paths[1].push_back({"rf2", RfElement{r2, ts[i]}});
    auto pr = propagate(topo, in);
    io[i] = pr.intensities.I_O;
    ih[i] = pr.intensities.I_H;
  });
  PeriodFit f = fit_period(ts, io, ones(n), 0.5 / dnu, 2.0 / dnu);
  rep.derived["beat_period_s"] = f.period;
  rep.derived["energy_difference_eV"] = PC::h * dnu / 1.602176634e-19;
  rep.check("beat period = 1/delta_nu", 1.0 / dnu, f.period, 1e-9, kDerived, Relation::rel);
  rep.check("measured period 47.90 s vs 1/delta_nu", 47.90, f.period, 0.05, kPaper, Relation::rel, "47.90+-0.15 s");
  rep.add_scan(make_scan("time", ts, io, ih, 0.0, seed));
  return rep;
}

ExperimentReport run_double_resonance_polarimeter(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::double_resonance_polarimeter, p, seed);
  const double dnu = get(p, "delta_nu");
  if (!(dnu > 0)) throw ConfigError("/delta_nu", "frequency difference must be positive");
  const int periods = get_int(p, "periods", 2), n = get_int(p, "points", 16);
  // Each flipper's field phase advances at pi nu t (see the beat-period note
  // in the README); frequencies relative to the mean.
  RfFlipperSpec r1, r2;
  r1.omega = kPi * (0.5 * dnu);
  r2.omega = kPi * (-0.5 * dnu);
  const DofLabel E = DofLabel::energy(0, 1);
  const PureState in = tensor(spin_up(), energy_level(0, E));
  const double T = periods / dnu;
  const auto ts = linspace(0.0, T, n);
  std::vector<double> io(n), ih(n);
  parallel_for(n, [&](std::size_t i) {
    BeamlineTopology topo;
    topo.kind = TopologyKind::polarimeter;
    topo.paths = {{}};
    topo.paths[0].push_back({"prep", OperatorElement{spin_rotation(Vec3(0, 1, 0), kPi / 2)}});
    topo.paths[0].push_back({"rf1", RfElement{r1, ts[i]}});
    topo.paths[0].push_back({"rf2", RfElement{r2, ts[i]}});
    topo.paths[0].push_back({"analyze", OperatorElement{spin_rotation(Vec3(1, 0, 0), kPi / 2)}});
    auto pr = propagate(topo, in);
    io[i] = pr.intensities.I_O;
    ih[i] = pr.intensities.I_H;
  });
  PeriodFit f = fit_period(ts, io, ones(n), 0.5 / dnu, 2.0 / dnu);
  rep.derived["beat_period_s"] = f.period;
  rep.derived["energy_difference_eV"] = PC::h * dnu / 1.602176634e-19;
  rep.check("beat period = 1/delta_nu", 1.0 / dnu, f.period, 1e-9, kDerived, Relation::rel);
  rep.check("measured period 49904.9 s", 49904.9, f.period, 0.005, kPaper, Relation::rel, "49904.9+-27.2 s");
  rep.add_scan(make_scan("time", ts, io, ih, 0.0, seed));
  return rep;
}

ExperimentReport run_absorption(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::absorption, p, seed);
  const double tmin = get(p, "t_min");
  if (!(tmin > 0 && tmin < 1)) throw ConfigError("/t_min", "must lie in (0, 1)");
  const int nt = get_int(p, "t_points", 3), n = get_int(p, "points", 8);
  const auto Ts = logspace(tmin, 1.0, nt);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = 2 * kPi * i / n;
  const MixedState in(spin_up());
  double slopes[2];
  for (int kind = 0; kind < 2; ++kind) {
    const AbsorberKind k = kind == 0 ? AbsorberKind::stochastic : AbsorberKind::deterministic;
    std::vector<double> amp(nt);
    for (int j = 0; j < nt; ++j) {
      BeamlineTopology topo = lll();
      topo.paths[1].push_back({"absorber", AbsorberSpec{k, Ts[j]}});
      FringeScan s = scan_topology(topo, in, "delta_chi", xs, 0.0, seed);
      FitResult f = fit_fringe(s);
      amp[j] = f.amplitude;
      if (j == 0 || j == nt - 1) rep.add_scan(std::move(s), f);
    }
    std::vector<double> rel(nt);
    for (int j = 0; j < nt; ++j) rel[j] = amp[j] / amp[nt - 1];
    slopes[kind] = log_log_slope(Ts, rel);
  }
  rep.derived["slope_stochastic"] = slopes[0];
  rep.derived["slope_deterministic"] = slopes[1];
  rep.check("stochastic amplitude ~ sqrt(T): log-log slope", 0.5, slopes[0], 0.01, kPaper, Relation::abs,
            "amplitude ~ sqrt T");
  rep.check("deterministic amplitude ~ T: log-log slope", 1.0, slopes[1], 0.01, kPaper, Relation::abs,
            "amplitude ~ T");

  const auto ts = uniform_draws(seed, 31, 100, 0.0, 1.0);
  const auto cs = uniform_draws(seed, 32, 100, -kPi, kPi);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    for (int kind = 0; kind < 2; ++kind) {
      const AbsorberKind k = kind == 0 ? AbsorberKind::stochastic : AbsorberKind::deterministic;
      BeamlineTopology topo = lll();
      topo.delta_chi = cs[i];
      topo.paths[1].push_back({"absorber", AbsorberSpec{k, ts[i]}});
      double I = propagate(topo, in).intensities.I_O;
      double c = kind == 0 ? std::sqrt(ts[i]) : ts[i];
      double closed = 0.5 * 0.25 * (1 + ts[i] + 2 * c * std::cos(cs[i]));
      worst = std::max(worst, std::abs(I - closed));
    }
  }
  rep.derived["closed_form_max_dev"] = worst;
  rep.check("closed form vs propagation (100 draws)", 0.0, worst, 1e-10, kDerived);
  return rep;
}

ExperimentReport run_ac_phase(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::ac_phase, p, seed);
  const double V = get(p, "voltage"), d = get(p, "gap"), l = get(p, "path_length"), v = get(p, "velocity");
  if (!(d > 0) || !(v > 0)) throw ConfigError("/gap", "gap and velocity must be positive");
  const double E = V / d;
  const double phi = ac_phase(E, l);
  rep.derived["ac_phase_mrad"] = phi * 1e3;
  rep.check("AC phase [mrad]", 1.5, phi * 1e3, 0.02, kPaper, Relation::rel, "1.5 mrad");

  // Energy mu v E / c^2 over a flight time l / v.
  auto two_factor = [&](double vel) {
    const double energy = std::abs(PC::mu) * vel * E / (PC::c * PC::c);
    const double time = l / vel;
    return 2.0 * energy * time / PC::hbar;
  };
  const double a = two_factor(v), b = two_factor(2 * v);
  rep.check("velocity independence (v vs 2v)", a, b, 1e-9, kDerived, Relation::rel);
  rep.check("two-factor form equals closed form", phi, a, 1e-12, kDerived, Relation::rel);
  rep.check("odd under electrode polarity", -phi, ac_phase(-E, l), 1e-15, kTrivial);

  // Unpolarized beam with the interferometer phase at 0 and the magnetic
  // phase at pi/2: the polarity difference is linear in the AC phase.
  auto I_O = [&](double ac, int polarity) {
    BeamlineTopology topo = lll();
    const double spin_phase = kPi / 2 + polarity * ac;
    topo.paths[1].push_back({"spin_phase", DcCoilSpec{Vec3(0, 0, 1), -2.0 * spin_phase}});
    return propagate(topo, unpolarized()).intensities.I_O;
  };
  const double h = 1e-7;
  const double k = (I_O(h, +1) - I_O(h, -1)) / h;
  double worst = 0;
  for (double ac : linspace(1e-3, 50e-3, 50)) worst = std::max(worst, std::abs((I_O(ac, +1) - I_O(ac, -1)) / (k * ac) - 1));
  rep.derived["linearity_max_rel_dev"] = worst;
  rep.derived["polarity_difference_at_default"] = I_O(phi, +1) - I_O(phi, -1);
  rep.check("polarity difference linear in |phi_AC| below 50 mrad", 0.0, worst, 0.01, kDerived);
  return rep;
}

ExperimentReport run_sab_dispersion(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::sab_dispersion, p, seed);
  const double spread = get(p, "spread"), pmax = get(p, "phase_max"), lambda = get(p, "wavelength");
  const int n = get_int(p, "points", 2);
  const auto phases = linspace(0.0, pmax, n);
  double worst_static = 0, worst_pulsed = 0;
  std::vector<double> cs(n), cp(n);
  for (int i = 0; i < n; ++i) {
    cs[i] = sab_dispersion(SabMode::static_field, phases[i], spread);
    cp[i] = sab_dispersion(SabMode::pulsed, phases[i], spread);
    worst_static = std::max(worst_static, std::abs(cs[i] - std::exp(-0.5 * std::pow(phases[i] * spread, 2))));
    worst_pulsed = std::max(worst_pulsed, std::abs(cp[i] - 1.0));
  }
  rep.add_scan(make_scan("phase_at_center", phases, cs, cp, 0.0, seed));
  rep.derived["coherence_length_m"] = spread > 0 ? lambda / spread : INFINITY;
  rep.derived["static_contrast_at_max"] = cs.back();
  rep.check("static contrast = Gaussian characteristic function", 0.0, worst_static, 1e-9, kDerived);
  rep.check("pulsed contrast = 1 for all phases", 0.0, worst_pulsed, 1e-9, kPaper, Relation::abs,
            "pulsed: C = 1");
  rep.check("zero spread: static contrast 1", 1.0, sab_dispersion(SabMode::static_field, pmax, 0.0), 1e-15,
            kTrivial);
  const double c40 = sab_dispersion(SabMode::static_field, 40 * kPi, 0.02);
  rep.derived["static_contrast_40pi_2pct"] = c40;
  rep.check_le("static contrast at 40 pi, 2% spread < 0.1", c40, 0.1, kDerived);
  return rep;
}

ExperimentReport run_noncommutation(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::noncommutation, p, seed);
  const int n = get_int(p, "draws", 1);
  const auto betas = uniform_draws(seed, 41, n, 0.0, 2 * kPi);
  double worst_p = 0, worst_m = 0;
  for (double b : betas) {
    const LinearOperator A = spin_rotation(Vec3(1, 0, 0), kPi);
    const LinearOperator B = spin_rotation(Vec3(std::cos(b), 0, std::sin(b)), kPi);
    auto run = [&](const LinearOperator& first, const LinearOperator& second) {
      BeamlineTopology topo;
      topo.kind = TopologyKind::polarimeter;
      topo.paths = {{{"first", OperatorElement{first}}, {"second", OperatorElement{second}}}};
      return bloch_vector(propagate(topo, spin_up()).inside).vec();
    };
    const Vec3 pab = run(B, A), pba = run(A, B);  // AB: B acts first
    const double s = std::sin(2 * b), c = std::cos(2 * b);
    worst_p = std::max(worst_p, std::max((pab - Vec3(s, 0, c)).cwiseAbs().maxCoeff(),
                                         (pba - Vec3(-s, 0, c)).cwiseAbs().maxCoeff()));
    Mat2 ab, ba;
    ab << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
    ba << std::cos(b), std::sin(b), -std::sin(b), std::cos(b);
    worst_m = std::max(worst_m, std::max(((A * B).matrix() + Mat(ab)).cwiseAbs().maxCoeff(),
                                         ((B * A).matrix() + Mat(ba)).cwiseAbs().maxCoeff()));
  }
  rep.derived["polarization_max_dev"] = worst_p;
  rep.derived["matrix_max_dev"] = worst_m;
  rep.check("final polarizations (+-sin 2b, 0, cos 2b)", 0.0, worst_p, 1e-10, kPaper, Relation::abs,
            "P_AB, P_BA closed forms");
  rep.check("AB and BA matrices", 0.0, worst_m, 1e-12, kPaper, Relation::abs, "AB, BA closed forms");
  const Mat comm = pauli(2).matrix() * pauli(0).matrix() - pauli(0).matrix() * pauli(2).matrix();
  rep.check("[sz, sx] = 2i sy", 0.0, (comm - 2.0 * kI * pauli(1).matrix()).cwiseAbs().maxCoeff(), 1e-15, kTrivial);
  return rep;
}

ExperimentReport run_four_blade(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::four_blade, p, seed);
  const double tau = get(p, "transit_time"), factor = get(p, "period_factor"), kick = get(p, "kick");
  const int runs = get_int(p, "runs", 100), n = get_int(p, "points", 5);
  if (!(tau > 0) || !(factor > 0)) throw ConfigError("/transit_time", "times must be positive");
  const ContrastPair c = four_blade_contrast(1.0 / (factor * tau), kick, tau, runs, seed, n);
  rep.derived["contrast_three_blade"] = c.three_blade;
  rep.derived["contrast_four_blade"] = c.four_blade;
  rep.check_ge("four-blade contrast >= 0.99", c.four_blade, 0.99, kDerived);
  rep.check_le("three-blade contrast <= 0.8", c.three_blade, 0.8, kDerived);
  const ContrastPair still = four_blade_contrast(1.0 / (factor * tau), 0.0, tau, 100, seed, n);
  rep.check("no vibration: three-blade contrast 1", 1.0, still.three_blade, 1e-12, kTrivial);
  rep.check("no vibration: four-blade contrast 1", 1.0, still.four_blade, 1e-12, kTrivial);
  for (double f : {3.0, 10.0, 30.0, 300.0}) {
    const ContrastPair ci = four_blade_contrast(1.0 / (f * tau), kick, tau, runs, seed, n);
    rep.derived["contrast_four_blade_factor_" + format_double(f)] = ci.four_blade;
    rep.derived["contrast_three_blade_factor_" + format_double(f)] = ci.three_blade;
  }
  return rep;
}

}  // namespace exp

double sab_dispersion(SabMode mode, double phase_at_center, double spread) {
  if (!(spread >= 0)) throw ArgumentError("spread must be nonnegative");
  if (mode == SabMode::pulsed || spread == 0.0) return 1.0;
  // x = lambda/lambda0 - 1 ~ N(0, spread^2); the static-field phase scales
  // with lambda, so the contrast is |E exp(i phase x)|. Composite Simpson.
  const int n = 8000;
  const double a = -12 * spread, b = 12 * spread, hstep = (b - a) / n;
  cplx sum = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * hstep;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double pdf = std::exp(-0.5 * x * x / (spread * spread)) / (std::sqrt(2 * kPi) * spread);
    sum += w * pdf * std::polar(1.0, phase_at_center * x);
  }
  return std::abs(sum * hstep / 3.0);
}

std::string to_string(SabMode m) { return m == SabMode::pulsed ? "pulsed" : "static"; }

}  // namespace nqsim
