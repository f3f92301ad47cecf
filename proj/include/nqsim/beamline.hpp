#pragma once

// Interferometer and polarimeter topologies built from elements, propagated
// as channels on path (x) internal dofs.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nqsim/elements.hpp"

namespace nqsim {

enum class TopologyKind { LLL, skew_symmetric, polarimeter, coupled_loop, four_blade };

std::string to_string(TopologyKind k);

struct RfElement {
  RfFlipperSpec spec;
  double t = 0.0;  // detection-time reference for the photon-exchange phase
};

// Any internal operator (spin rotation, analyzer projector, ...).
struct OperatorElement {
  LinearOperator op;
};

using ElementSpec = std::variant<PhaseShifterSpec, DcCoilSpec, AbsorberSpec, RfElement, OperatorElement>;

struct PathElement {
  std::string name;  // optional handle for scans
  ElementSpec spec;
};

struct BeamlineTopology {
  TopologyKind kind = TopologyKind::LLL;
  BeamSplitterSpec splitter, mirror, analyzer;
  // Path I and path II element lists; polarimeters use paths[0] only.
  std::vector<std::vector<PathElement>> paths{{}, {}};
  double delta_chi = 0.0;  // phase shifter on path II
  // Coupled loop: loop-A phase and absorber transmissivity.
  double loop_chi = 0.0;
  double loop_transmissivity = 1.0;
  // Polarimeter detector (spin analyzer); defaults to |up><up|.
  std::optional<LinearOperator> detector;
  DofLabel path_label = DofLabel::path(0);

  void validate() const;
};

struct PortIntensities {
  double I_O = 0.0;
  double I_H = 0.0;
};

struct Propagation {
  MixedState inside;  // path (x) internal, just before the analyzer
  MixedState exit_O;  // internal dofs, sub-normalized
  MixedState exit_H;
  PortIntensities intensities;
};

struct PurePropagation {
  PureState inside;
  PureState exit_O;
  PureState exit_H;
  PortIntensities intensities;
};

// Set a named scan parameter: "delta_chi", "loop_chi", "loop_transmissivity",
// or the name of a path element (phase, coil angle, transmissivity, RF time).
BeamlineTopology with_param(const BeamlineTopology& topo, const std::string& scan_param, double value);

Propagation propagate(const BeamlineTopology& topo, const MixedState& in_state,
                      const std::string& scan_param = "", double value = 0.0);
PurePropagation propagate(const BeamlineTopology& topo, const PureState& in_state,
                          const std::string& scan_param = "", double value = 0.0);

PortIntensities lll_intensities(cplx r, cplx t, double delta_chi,
                                const std::optional<LinearOperator>& pathI_unitary,
                                const std::optional<LinearOperator>& pathII_unitary,
                                const PureState& in_state);
// Closed forms for trivial path unitaries.
PortIntensities lll_closed_form(cplx r, cplx t, double delta_chi);

struct PolarimeterSequence {
  std::vector<LinearOperator> before;  // applied before the phase alpha
  std::vector<LinearOperator> after;

  // pi/2 about y, phase about z, pi/2 about x.
  static PolarimeterSequence canonical_ramsey();
};

std::pair<double, double> run_polarimeter(const PolarimeterSequence& seq, double alpha,
                                          const PureState& in_state = spin_up());

struct ContrastPair {
  double three_blade = 0.0;
  double four_blade = 0.0;
};

ContrastPair four_blade_contrast(double vibration_freq, double kick_amplitude, double transit_time,
                                 int n_runs, std::uint64_t seed, int n_points = 16);

// Outer loop: reference path |I> carries the initial loop-A state, path |II>
// carries the loop-A state after phase chi1 and absorber a. Dofs: outer path
// (id 0), inner path (id 1).
PureState coupled_loop_state(double chi1, double a, double chi2);
// Loop-A initial and evolved (normalized) path-qubit states.
PureState loop_initial_state();
PureState loop_evolved_state(double chi1, double a);

}  // namespace nqsim
