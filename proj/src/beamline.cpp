#include "nqsim/beamline.hpp"

#include <cmath>

#include "nqsim/rng.hpp"

namespace nqsim {

std::string to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::LLL: return "LLL";
    case TopologyKind::skew_symmetric: return "skew-symmetric";
    case TopologyKind::polarimeter: return "polarimeter";
    case TopologyKind::coupled_loop: return "coupled-loop";
    case TopologyKind::four_blade: return "four-blade";
  }
  return "?";
}

void BeamlineTopology::validate() const {
  splitter.validate();
  mirror.validate();
  analyzer.validate();
  switch (kind) {
    case TopologyKind::LLL:
    case TopologyKind::skew_symmetric:
    case TopologyKind::four_blade:
      if (paths.size() != 2) throw ArgumentError("malformed topology: two-path device needs exactly two paths");
      break;
    case TopologyKind::polarimeter:
      if (paths.empty() || paths.size() > 2 || (paths.size() == 2 && !paths[1].empty()))
        throw ArgumentError("malformed topology: polarimeter has a single beam path");
      break;
    case TopologyKind::coupled_loop:
      if (!(loop_transmissivity >= 0 && loop_transmissivity <= 1))
        throw ArgumentError("malformed topology: loop transmissivity outside [0, 1]");
      break;
  }
  if (path_label.dim != 2) throw ArgumentError("malformed topology: path dof must be two-level");
}

BeamlineTopology with_param(const BeamlineTopology& topo, const std::string& scan_param, double value) {
  BeamlineTopology out = topo;
  if (scan_param.empty()) return out;
  if (scan_param == "delta_chi") {
    out.delta_chi = value;
    return out;
  }
  if (scan_param == "loop_chi") {
    out.loop_chi = value;
    return out;
  }
  if (scan_param == "loop_transmissivity") {
    out.loop_transmissivity = value;
    return out;
  }
  for (auto& path : out.paths)
    for (auto& el : path)
      if (el.name == scan_param) {
        std::visit(
            [&](auto& s) {
              using S = std::decay_t<decltype(s)>;
              if constexpr (std::is_same_v<S, PhaseShifterSpec>) s.chi = value;
              else if constexpr (std::is_same_v<S, DcCoilSpec>) s.angle = value;
              else if constexpr (std::is_same_v<S, AbsorberSpec>) s.transmissivity = value;
              else if constexpr (std::is_same_v<S, RfElement>) s.t = value;
              else throw ArgumentError("element '" + scan_param + "' has no scalar parameter");
            },
            el.spec);
        return out;
      }
  throw ArgumentError("unknown scan parameter '" + scan_param + "'");
}

namespace {

// Kraus operators of one element acting on `dofs` (which may include the path
// dof). `which` < 0 means the element acts on the whole beam.
std::vector<Mat> element_kraus(const ElementSpec& spec, const Dofs& dofs, DofLabel path, int which) {
  const int n = total_dim(dofs);
  auto local = [&](const Mat& k_full_internal_embedded) {
    if (which < 0) return std::vector<Mat>{k_full_internal_embedded};
    Mat pj = embed(LinearOperator({path}, Mat(Eigen::Vector2cd(which == 0 ? 1.0 : 0.0, which == 1 ? 1.0 : 0.0).asDiagonal())), dofs);
    Mat po = Mat::Identity(n, n) - pj;
    return std::vector<Mat>{pj * k_full_internal_embedded + po};
  };
  auto find = [&](DofKind kind) -> DofLabel {
    for (const auto& l : dofs)
      if (l.kind == kind && !(kind == DofKind::path && l.same(path))) return l;
    throw DimensionError("element needs a dof that the beam does not carry");
  };
  return std::visit(
      [&](const auto& s) -> std::vector<Mat> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, PhaseShifterSpec>) {
          return local(std::polar(1.0, s.chi) * Mat::Identity(n, n));
        } else if constexpr (std::is_same_v<S, DcCoilSpec>) {
          return local(embed(s.op(find(DofKind::spin)), dofs));
        } else if constexpr (std::is_same_v<S, RfElement>) {
          return local(embed(rf_flip_operator(s.spec, s.t, find(DofKind::spin), find(DofKind::energy)), dofs));
        } else if constexpr (std::is_same_v<S, OperatorElement>) {
          return local(embed(s.op, dofs));
        } else {
          s.validate();
          const double T = s.transmissivity;
          if (s.kind == AbsorberKind::stochastic) return local(std::sqrt(T) * Mat::Identity(n, n));
          if (which < 0) return {std::sqrt(T) * Mat::Identity(n, n)};
          Mat po = Mat::Identity(n, n) -
                   embed(LinearOperator({path}, Mat(Eigen::Vector2cd(which == 0 ? 1.0 : 0.0, which == 1 ? 1.0 : 0.0).asDiagonal())), dofs);
          return {std::sqrt(T) * Mat::Identity(n, n), std::sqrt(1.0 - T) * po};
        }
      },
      spec);
}

bool is_rf(const ElementSpec& s) { return std::holds_alternative<RfElement>(s); }

void check_rf_loss(double before, double after) {
  if (before - after > 1e-12 * std::max(1.0, before))
    throw LadderOverflow("rf flip would leave the truncated energy ladder");
}

struct Amps {
  cplx a[2];   // path amplitudes before the analyzer
  cplx cO[2];  // analyzer coefficients into O
  cplx cH[2];
};

Amps amplitudes(const BeamlineTopology& t) {
  Amps a;
  const auto& s = t.splitter;
  const auto& m = t.mirror;
  const auto& z = t.analyzer;
  cplx mirror = m.r;
  if (t.kind == TopologyKind::four_blade) mirror = m.r * m.r;
  a.a[0] = s.t * mirror;
  a.a[1] = s.r * mirror;
  a.cO[0] = z.r;
  a.cO[1] = z.t;
  a.cH[0] = z.t;
  a.cH[1] = z.r;
  return a;
}

Propagation propagate_coupled(const BeamlineTopology& topo, double trace_in) {
  PureState st = coupled_loop_state(topo.loop_chi, topo.loop_transmissivity, topo.delta_chi);
  const DofLabel outer = DofLabel::path(0), inner = DofLabel::path(1);
  auto exit_for = [&](int sign) {
    Mat k(2, 4);
    // project outer path onto (|I> + sign|II>)/sqrt2
    k.setZero();
    for (int j = 0; j < 2; ++j) {
      cplx c = (j == 0 ? 1.0 : double(sign)) / std::sqrt(2.0);
      k(0, j * 2 + 0) = c;
      k(1, j * 2 + 1) = c;
    }
    Vec v = k * st.amplitudes();
    return PureState({inner}, v);
  };
  PureState o = exit_for(+1), h = exit_for(-1);
  Vec psi0 = loop_initial_state().amplitudes();
  Propagation p{MixedState(st).scaled(trace_in), MixedState(o).scaled(trace_in), MixedState(h).scaled(trace_in), {}};
  p.intensities.I_O = trace_in * std::norm(psi0.dot(o.amplitudes()));
  p.intensities.I_H = trace_in * std::norm(psi0.dot(h.amplitudes()));
  (void)outer;
  return p;
}

}  // namespace

Propagation propagate(const BeamlineTopology& topo0, const MixedState& in_state, const std::string& scan_param,
                      double value) {
  BeamlineTopology topo = with_param(topo0, scan_param, value);
  topo.validate();
  if (topo.kind == TopologyKind::coupled_loop) return propagate_coupled(topo, in_state.trace());

  if (topo.kind == TopologyKind::polarimeter) {
    const Dofs& d = in_state.dofs();
    Mat rho = in_state.matrix();
    for (const auto& el : topo.paths[0]) {
      auto ks = element_kraus(el.spec, d, topo.path_label, -1);
      Mat out = Mat::Zero(rho.rows(), rho.cols());
      for (const auto& k : ks) out += k * rho * k.adjoint();
      if (is_rf(el.spec)) check_rf_loss(rho.trace().real(), out.trace().real());
      rho = out;
    }
    MixedState after(d, rho);
    LinearOperator det = topo.detector ? *topo.detector : projector_bloch(0, 0, DofLabel::spin(0));
    Mat P = embed(det, d);
    Mat Q = Mat::Identity(P.rows(), P.cols()) - P;
    MixedState o(d, P * rho * P.adjoint()), h(d, Q * rho * Q.adjoint());
    return {after, o, h, {o.trace(), h.trace()}};
  }

  if (dof_position(in_state.dofs(), topo.path_label) >= 0)
    throw DimensionError("input state already carries the interferometer path dof");
  Amps am = amplitudes(topo);
  Vec a(2);
  a << am.a[0], am.a[1];
  MixedState path_state(Dofs{topo.path_label}, a * a.adjoint());
  MixedState inside = tensor(path_state, in_state);
  Dofs d = inside.dofs();
  Mat rho = inside.matrix();
  for (int j = 0; j < 2; ++j)
    for (const auto& el : topo.paths[j]) {
      auto ks = element_kraus(el.spec, d, topo.path_label, j);
      Mat out = Mat::Zero(rho.rows(), rho.cols());
      for (const auto& k : ks) out += k * rho * k.adjoint();
      if (is_rf(el.spec)) check_rf_loss(rho.trace().real(), out.trace().real());
      rho = out;
    }
  {
    auto ks = element_kraus(PhaseShifterSpec{topo.delta_chi}, d, topo.path_label, 1);
    rho = ks[0] * rho * ks[0].adjoint();
  }
  const int n = in_state.dim();
  auto port = [&](const cplx* c) {
    Mat out = Mat::Zero(n, n);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) out += c[j] * std::conj(c[k]) * rho.block(j * n, k * n, n, n);
    return MixedState(in_state.dofs(), out);
  };
  MixedState o = port(am.cO), h = port(am.cH);
  return {MixedState(d, rho), o, h, {o.trace(), h.trace()}};
}

PurePropagation propagate(const BeamlineTopology& topo0, const PureState& in_state, const std::string& scan_param,
                          double value) {
  BeamlineTopology topo = with_param(topo0, scan_param, value);
  topo.validate();
  auto single = [](std::vector<Mat> ks) {
    if (ks.size() != 1) throw ArgumentError("deterministic absorber needs mixed-state propagation");
    return ks[0];
  };
  if (topo.kind == TopologyKind::coupled_loop) {
    PureState st = coupled_loop_state(topo.loop_chi, topo.loop_transmissivity, topo.delta_chi);
    auto p = propagate_coupled(topo, in_state.norm2());
    Vec psi0 = loop_initial_state().amplitudes();
    auto exit_for = [&](int sign) {
      Vec v(2);
      for (int i = 0; i < 2; ++i)
        v(i) = (st.amplitudes()(i) + double(sign) * st.amplitudes()(2 + i)) / std::sqrt(2.0);
      return PureState({DofLabel::path(1)}, v * std::sqrt(in_state.norm2()));
    };
    (void)psi0;
    return {st, exit_for(1), exit_for(-1), p.intensities};
  }
  if (topo.kind == TopologyKind::polarimeter) {
    const Dofs& d = in_state.dofs();
    Vec v = in_state.amplitudes();
    for (const auto& el : topo.paths[0]) {
      Vec w = single(element_kraus(el.spec, d, topo.path_label, -1)) * v;
      if (is_rf(el.spec)) check_rf_loss(v.squaredNorm(), w.squaredNorm());
      v = w;
    }
    LinearOperator det = topo.detector ? *topo.detector : projector_bloch(0, 0, DofLabel::spin(0));
    Mat P = embed(det, d);
    Vec o = P * v, h = v - o;
    return {PureState(d, v), PureState(d, o), PureState(d, h), {o.squaredNorm(), h.squaredNorm()}};
  }
  if (dof_position(in_state.dofs(), topo.path_label) >= 0)
    throw DimensionError("input state already carries the interferometer path dof");
  Amps am = amplitudes(topo);
  Vec a(2);
  a << am.a[0], am.a[1];
  PureState inside = tensor(PureState({topo.path_label}, a), in_state);
  Dofs d = inside.dofs();
  Vec v = inside.amplitudes();
  for (int j = 0; j < 2; ++j)
    for (const auto& el : topo.paths[j]) {
      Vec w = single(element_kraus(el.spec, d, topo.path_label, j)) * v;
      if (is_rf(el.spec)) check_rf_loss(v.squaredNorm(), w.squaredNorm());
      v = w;
    }
  v = single(element_kraus(PhaseShifterSpec{topo.delta_chi}, d, topo.path_label, 1)) * v;
  const int n = in_state.dim();
  auto port = [&](const cplx* c) {
    Vec out = c[0] * v.segment(0, n) + c[1] * v.segment(n, n);
    return PureState(in_state.dofs(), out);
  };
  PureState o = port(am.cO), h = port(am.cH);
  return {PureState(d, v), o, h, {o.norm2(), h.norm2()}};
}

PortIntensities lll_intensities(cplx r, cplx t, double delta_chi, const std::optional<LinearOperator>& pathI_unitary,
                                const std::optional<LinearOperator>& pathII_unitary, const PureState& in_state) {
  BeamSplitterSpec{r, t}.validate();
  Vec psi = in_state.amplitudes();
  Vec uI = pathI_unitary ? Vec(embed(*pathI_unitary, in_state.dofs()) * psi) : psi;
  Vec uII = pathII_unitary ? Vec(embed(*pathII_unitary, in_state.dofs()) * psi) : psi;
  const cplx e = std::polar(1.0, delta_chi);
  Vec o = t * r * r * uI + e * r * r * t * uII;
  Vec h = t * r * t * uI + e * r * r * r * uII;
  return {o.squaredNorm(), h.squaredNorm()};
}

PortIntensities lll_closed_form(cplx r, cplx t, double delta_chi) {
  BeamSplitterSpec{r, t}.validate();
  const double R = std::norm(r), T = std::norm(t), c = std::cos(delta_chi);
  return {2.0 * R * R * T * (1.0 + c), T * T * R + R * R * R - 2.0 * R * R * T * c};
}

PolarimeterSequence PolarimeterSequence::canonical_ramsey() {
  PolarimeterSequence s;
  s.before.push_back(spin_rotation(Vec3(0, 1, 0), kPi / 2));
  s.after.push_back(spin_rotation(Vec3(1, 0, 0), kPi / 2));
  return s;
}

namespace {
bool is_half_turn(const LinearOperator& op) {
  // A pi/2 rotation has trace 2 cos(pi/4) up to the global sign.
  if (op.dim() != 2) return false;
  return std::abs(std::abs(op.matrix().trace()) - std::sqrt(2.0)) < 1e-9;
}
}  // namespace

std::pair<double, double> run_polarimeter(const PolarimeterSequence& seq, double alpha, const PureState& in_state) {
  if (seq.before.empty() || seq.after.empty() || !is_half_turn(seq.before.front()) ||
      !is_half_turn(seq.after.back()))
    throw ArgumentError("polarimeter sequence must begin and end with pi/2 rotations");
  PureState s = in_state;
  for (const auto& op : seq.before) s = apply(op, s);
  s = apply(spin_rotation(Vec3(0, 0, 1), alpha, seq.before.front().dofs()[0]), s);
  for (const auto& op : seq.after) s = apply(op, s);
  DofLabel l = seq.before.front().dofs()[0];
  double up = expectation(s, projector_bloch(0, 0, l)) * s.norm2();
  double dn = expectation(s, projector_bloch(kPi, 0, l)) * s.norm2();
  return {up, dn};
}

ContrastPair four_blade_contrast(double vibration_freq, double kick_amplitude, double transit_time, int n_runs,
                                 std::uint64_t seed, int n_points) {
  if (n_runs < 100) throw ArgumentError("four_blade_contrast needs at least 100 runs");
  if (n_points < 5) throw ArgumentError("four_blade_contrast needs at least 5 scan points");
  if (!(transit_time >= 0) || !(vibration_freq >= 0)) throw ArgumentError("negative time or frequency");
  const double w = 2.0 * kPi * vibration_freq;
  // Normalized mirror velocity u(t) = cos(w t + phase); kicks at the blade
  // reflection times. The three-blade device reflects once, uncompensated; the
  // four-blade device kicks at all four blades with signs (+,-,-,+).
  auto u = [w](double t, double ph) { return std::cos(w * t + ph); };
  cplx s3 = 0, s4 = 0;
  double m3 = 0, m4 = 0;
  for (int p = 0; p < n_points; ++p) {
    const double x = 2.0 * kPi * p / n_points;
    double i3 = 0, i4 = 0;
    for (int r = 0; r < n_runs; ++r) {
      CounterRng rng(stream_key(seed, {static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(r)}));
      const double ph = 2.0 * kPi * rng.uniform();
      const double tau = transit_time;
      double d3 = kick_amplitude * u(0.5 * tau, ph);
      double d4 = kick_amplitude * (u(0.0, ph) - u(tau / 3.0, ph) - u(2.0 * tau / 3.0, ph) + u(tau, ph));
      i3 += 0.5 * (1.0 + std::cos(x + d3));
      i4 += 0.5 * (1.0 + std::cos(x + d4));
    }
    i3 /= n_runs;
    i4 /= n_runs;
    s3 += i3 * std::polar(1.0, -x);
    s4 += i4 * std::polar(1.0, -x);
    m3 += i3;
    m4 += i4;
  }
  // First-harmonic least squares on a uniform full-period grid.
  return {2.0 * std::abs(s3) / m3, 2.0 * std::abs(s4) / m4};
}

PureState loop_initial_state() { return qubit_state(kPi / 2, 0.0, DofLabel::path(1)); }

PureState loop_evolved_state(double chi1, double a) {
  if (!(a >= 0 && a <= 1)) throw ArgumentError("loop transmissivity must lie in [0, 1]");
  Vec v(2);
  v << std::polar(1.0, chi1), std::sqrt(a);
  double n = v.norm();
  if (n == 0) throw AbsorbedBeam();
  return PureState({DofLabel::path(1)}, v / n);
}

PureState coupled_loop_state(double chi1, double a, double chi2) {
  if (!(a >= 0 && a <= 1)) throw ArgumentError("loop transmissivity must lie in [0, 1]");
  // Loop A: splitter, phase chi1 on |a>, stochastic absorber sqrt(a) on |b>.
  Vec loopA(2);
  loopA << std::polar(1.0, chi1) / std::sqrt(2.0), std::sqrt(a) / std::sqrt(2.0);
  Vec ref = loop_initial_state().amplitudes();
  Vec v(4);
  v.segment(0, 2) = std::polar(1.0, chi2) * ref / std::sqrt(2.0);
  v.segment(2, 2) = loopA / std::sqrt(2.0);
  return PureState({DofLabel::path(0), DofLabel::path(1)}, v);
}

}  // namespace nqsim
