#include <algorithm>

#include "common.hpp"
#include "nqsim/rng.hpp"

namespace nqsim {

namespace {

Vec3 cone_direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Eigen::Vector2cd step(const Eigen::Vector2cd& psi, const Vec3& n, double angle) {
  return rotation_matrix(n, angle) * psi;
}

// Smooth noise: standard normal values on knots spaced by tau, joined by
// cosine interpolation.
struct KnotNoise {
  std::vector<double> knots;
  double tau = 1.0;
  double amplitude = 0.0;

  KnotNoise(CounterRng& rng, double duration, double tau_, double amp) : tau(tau_), amplitude(amp) {
    if (amp == 0.0) return;
    const int n = static_cast<int>(std::ceil(duration / tau)) + 2;
    knots.resize(n);
    for (auto& k : knots) k = rng.normal();
  }

  double operator()(double t) const {
    if (knots.empty()) return 0.0;
    const double u = t / tau;
    const int j = std::clamp(static_cast<int>(std::floor(u)), 0, static_cast<int>(knots.size()) - 2);
    const double f = u - j;
    const double w = 0.5 * (1.0 - std::cos(kPi * f));
    return amplitude * ((1.0 - w) * knots[j] + w * knots[j + 1]);
  }
};

}  // namespace

BerryAdiabaticResult berry_adiabatic(double theta_cone, double sweep_time, double larmor_rate, int steps) {
  if (!(theta_cone >= 0 && theta_cone <= kPi)) throw ArgumentError("cone angle must lie in [0, pi]");
  if (!(sweep_time > 0) || !(larmor_rate > 0)) throw ArgumentError("sweep time and Larmor rate must be positive");
  if (steps < 1) throw ArgumentError("steps must be >= 1");
  BerryAdiabaticResult r;
  r.adiabaticity = (2 * kPi / sweep_time) / larmor_rate;
  if (r.adiabaticity >= 0.05)
    r.warnings.push_back("adiabaticity ratio " + format_double(r.adiabaticity) + " >= 0.05");
  const double dt = sweep_time / steps;
  Eigen::Vector2cd psi0(std::cos(theta_cone / 2), std::sin(theta_cone / 2));
  Eigen::Vector2cd psi = psi0;
  double dyn = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Vec3 n = cone_direction(theta_cone, 2 * kPi * (k + 0.5) / steps);
    // <n.sigma> is constant during a step with fixed field direction.
    const Eigen::Vector2cd sp = psi;
    const cplx a = sp(0), b = sp(1);
    const double ns = n.z() * (std::norm(a) - std::norm(b)) + 2.0 * (std::conj(a) * b * cplx(n.x(), n.y())).real();
    dyn += -0.5 * larmor_rate * ns * dt;
    psi = step(psi, n, larmor_rate * dt);
  }
  r.total = wrap_phase(std::arg(psi0.dot(psi)));
  r.dynamical = dyn;
  r.geometric = wrap_phase(r.total - dyn);
  return r;
}

double berry_echo_phase(double theta_cone, double evolution_time, const BerryNoise& noise, std::uint64_t key,
                        const BerryRobustnessOptions& opt) {
  const double wl = opt.larmor_rate;
  if (!(wl > 0) || opt.steps_per_period < 4) throw ArgumentError("bad Larmor rate or step count");
  if (!(evolution_time > 0)) throw ArgumentError("evolution time must be positive");
  const double period = 2 * kPi / wl;
  const double dt_nominal = period / opt.steps_per_period;
  const double ramp = opt.ramp_time > 0 ? opt.ramp_time : 10 * period;
  const double hold = opt.hold_time > 0 ? opt.hold_time : 2 * period;
  if (noise.amplitude > 0 && !(noise.correlation_time > 5 * dt_nominal))
    throw ArgumentError("noise correlation time must exceed the propagator step");

  CounterRng rng(key);
  const KnotNoise n1(rng, evolution_time, noise.correlation_time, noise.amplitude);
  const KnotNoise n2(rng, evolution_time, noise.correlation_time, noise.amplitude);

  Eigen::Vector2cd psi(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  auto segment = [&](double duration, const std::function<Vec3(double)>& dir, double extra_z) {
    const int n = std::max(1, static_cast<int>(std::ceil(duration / dt_nominal)));
    const double dt = duration / n;
    for (int k = 0; k < n; ++k) {
      const double t = (k + 0.5) * dt;
      if (extra_z == 0.0) {
        psi = step(psi, dir(t), wl * dt);
      } else {
        Vec3 f = wl * dir(t) + Vec3(0, 0, extra_z);
        psi = step(psi, f.normalized(), f.norm() * dt);
      }
    }
  };
  const double tc = theta_cone;
  auto ramp_up = [&](double t) { return cone_direction(tc * t / ramp, 0.0); };
  auto ramp_down = [&](double t) { return cone_direction(tc * (1.0 - t / ramp), 0.0); };
  auto zdir = [](double) { return Vec3(0, 0, 1); };

  segment(ramp, ramp_up, 0.0);
  segment(evolution_time, [&](double t) { return cone_direction(tc + n1(t), 2 * kPi * t / evolution_time); }, 0.0);
  segment(ramp, ramp_down, 0.0);
  segment(hold, zdir, opt.bz_offset_rate);
  psi = Eigen::Vector2cd(-kI * psi(1), -kI * psi(0));  // -i sigma_x
  segment(hold, zdir, opt.bz_offset_rate);
  segment(ramp, ramp_up, 0.0);
  segment(evolution_time, [&](double t) { return cone_direction(tc + n2(t), -2 * kPi * t / evolution_time); }, 0.0);
  segment(ramp, ramp_down, 0.0);

  // The echo doubles the geometric phase on the relative phase: -2 Omega.
  const double ref = -2.0 * 2 * kPi * (1 - std::cos(tc));
  const double rel = std::arg(psi(1) / psi(0));
  return (ref + wrap_phase(rel - ref)) / 4.0;
}

BerryRobustnessResult berry_robustness(double theta_cone, const std::vector<double>& evolution_times,
                                       const BerryNoise& noise, int n_runs, std::uint64_t seed,
                                       const BerryRobustnessOptions& opt) {
  if (n_runs < 2) throw ArgumentError("berry_robustness needs at least two runs");
  BerryRobustnessResult r;
  r.times = evolution_times;
  r.noise_free_phase = berry_echo_phase(theta_cone, evolution_times.empty() ? 1.0 : evolution_times.back(),
                                        BerryNoise{}, 0, opt);
  for (std::size_t i = 0; i < evolution_times.size(); ++i) {
    std::vector<double> ph(n_runs);
    parallel_for(n_runs, [&](std::size_t k) {
      ph[k] = berry_echo_phase(theta_cone, evolution_times[i], noise, stream_key(seed, {i, k}), opt);
    });
    double mean = 0;
    for (double x : ph) mean += x;
    mean /= n_runs;
    double var = 0;
    for (double x : ph) var += (x - mean) * (x - mean);
    var /= (n_runs - 1);
    r.mean_phase.push_back(mean);
    r.variance.push_back(var);
  }
  bool positive = r.times.size() >= 2;
  for (double v : r.variance) positive = positive && v > 0;
  r.slope = positive ? exp::log_log_slope(r.times, r.variance) : std::nan("");
  return r;
}

namespace exp {

ExperimentReport run_berry_adiabatic(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::berry_adiabatic, p, seed);
  const double theta = get(p, "theta_cone"), ratio = get(p, "ratio");
  const double wl = 2 * kPi * get(p, "larmor_frequency");
  const int spp = get_int(p, "steps_per_period", 4);
  if (!(ratio > 0)) throw ConfigError("/ratio", "must be positive");
  auto run = [&](double th, double rt) {
    const double T = 2 * kPi / (rt * wl);
    const int steps = static_cast<int>(std::ceil(spp / rt));
    return berry_adiabatic(th, T, wl, steps);
  };
  const auto main = run(theta, ratio);
  for (const auto& w : main.warnings) rep.warnings.push_back(w);
  const SolidAngle sa = berry_solid_angle(theta);
  rep.derived["geometric_phase"] = main.geometric;
  rep.derived["dynamical_phase"] = main.dynamical;
  rep.derived["expected_minus_omega_half"] = sa.phase;
  rep.check("geometric phase = -Omega/2", sa.phase, main.geometric, 0.01, kPaper, Relation::phase,
            "-Omega/2");
  rep.check("theta = 0: geometric phase 0", 0.0, run(0.0, ratio).geometric, 1e-6, kTrivial, Relation::phase);

  // First-order adiabatic error: deviation vs ratio at the configured angle.
  const SolidAngle s2 = berry_solid_angle(kPi / 2);
  std::vector<double> ratios = {1e-2, 5e-3, 2.5e-3, 1.25e-3}, devs;
  for (double rt : ratios) devs.push_back(phase_distance(run(kPi / 2, rt).geometric, s2.phase));
  for (std::size_t i = 0; i < ratios.size(); ++i) rep.derived["deviation_ratio_" + format_double(ratios[i])] = devs[i];
  const double slope = log_log_slope(ratios, devs);
  rep.derived["deviation_slope"] = slope;
  rep.check("deviation linear in ratio (log-log slope)", 1.0, slope, 0.2, kDerived);
  double worst_halving = INFINITY;
  for (std::size_t i = 0; i + 1 < devs.size(); ++i) worst_halving = std::min(worst_halving, devs[i] / devs[i + 1]);
  rep.derived["halving_reduction_min"] = worst_halving;
  rep.check_ge("halving the ratio halves the deviation", worst_halving, 1.9, kDerived);
  return rep;
}

ExperimentReport run_berry_robustness(const Params& p, std::uint64_t seed) {
  auto rep = new_report(ExperimentId::berry_robustness, p, seed);
  const double theta = get(p, "theta_cone");
  BerryRobustnessOptions opt;
  opt.steps_per_period = get_int(p, "steps_per_period", 4);
  const double period = 2 * kPi / opt.larmor_rate;
  BerryNoise noise{get(p, "noise_amplitude"), get(p, "correlation_periods") * period};
  const int runs = get_int(p, "runs", 2), nt = get_int(p, "t_points", 2);
  const double t0 = get(p, "t_min_periods"), t1 = get(p, "t_max_periods");
  if (!(t0 > 0 && t1 > t0)) throw ConfigError("/t_max_periods", "need 0 < t_min_periods < t_max_periods");
  std::vector<double> times = logspace(t0 * period, t1 * period, nt);

  const auto res = berry_robustness(theta, times, noise, runs, seed, opt);
  for (std::size_t i = 0; i < times.size(); ++i) {
    rep.derived["variance_T" + format_double(times[i] / period)] = res.variance[i];
    rep.derived["mean_phase_T" + format_double(times[i] / period)] = res.mean_phase[i];
  }
  rep.derived["variance_slope"] = res.slope;
  rep.derived["noise_free_phase"] = res.noise_free_phase;
  rep.derived["expected_minus_omega_half"] = berry_solid_angle(theta).phase;
  rep.check("variance ~ 1/T (log-log slope)", -1.0, res.slope, 0.15, kPaper, Relation::abs,
            "var ~ 1/T");

  const auto quiet = berry_robustness(theta, {times.front(), times.back()}, BerryNoise{0.0, noise.correlation_time},
                                      3, seed, opt);
  rep.check("no noise: zero variance", 0.0, std::max(quiet.variance[0], quiet.variance[1]), 0.0, kTrivial);

  BerryRobustnessOptions off = opt;
  off.bz_offset_rate = get(p, "offset_fraction") * opt.larmor_rate;
  const double a = berry_echo_phase(theta, times.front(), BerryNoise{}, 0, opt);
  const double b = berry_echo_phase(theta, times.front(), BerryNoise{}, 0, off);
  rep.derived["offset_phase_change"] = b - a;
  rep.check("echo cancels a uniform B_z offset", 0.0, std::abs(b - a), 1e-6, kDerived);
  return rep;
}

}  // namespace exp

}  // namespace nqsim
