#pragma once

// Shared plumbing for the experiment runners (not installed).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nqsim/analysis.hpp"
#include "nqsim/beamline.hpp"
#include "nqsim/experiments.hpp"
#include "nqsim/parallel.hpp"

namespace nqsim::exp {

using PC = PhysicalConstants;

inline const Provenance kPaper = Provenance::paper;
inline const Provenance kTrivial = Provenance::trivial;
inline const Provenance kDerived = Provenance::derived;

ExperimentReport new_report(ExperimentId id, const Params& p, std::uint64_t seed);

double get(const Params& p, const std::string& name);
int get_int(const Params& p, const std::string& name, int lo);

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);
// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// Interferometer with two 50/50 blades unless R is given.
BeamlineTopology lll(double reflectivity = 0.5);

// Scan `param` of `topo` over xs; intensities evaluated in parallel.
FringeScan scan_topology(const BeamlineTopology& topo, const MixedState& in, const std::string& param,
                         const std::vector<double>& xs, double mean_counts, std::uint64_t seed);
FringeScan scan_topology(const BeamlineTopology& topo, const PureState& in, const std::string& param,
                         const std::vector<double>& xs, double mean_counts, std::uint64_t seed);

// Unpolarized spin-1/2.
MixedState unpolarized();

// Runners, one per id.
ExperimentReport run_fourpi(const Params&, std::uint64_t);
ExperimentReport run_cow(const Params&, std::uint64_t);
ExperimentReport run_spin_superposition_dc(const Params&, std::uint64_t);
ExperimentReport run_spin_superposition_rf(const Params&, std::uint64_t);
ExperimentReport run_double_resonance_ifm(const Params&, std::uint64_t);
ExperimentReport run_double_resonance_polarimeter(const Params&, std::uint64_t);
ExperimentReport run_absorption(const Params&, std::uint64_t);
ExperimentReport run_ac_phase(const Params&, std::uint64_t);
ExperimentReport run_sab_dispersion(const Params&, std::uint64_t);
ExperimentReport run_noncommutation(const Params&, std::uint64_t);
ExperimentReport run_four_blade(const Params&, std::uint64_t);
ExperimentReport run_berry_adiabatic(const Params&, std::uint64_t);
ExperimentReport run_berry_robustness(const Params&, std::uint64_t);
ExperimentReport run_wagh_geometric(const Params&, std::uint64_t);
ExperimentReport run_pancharatnam_noncyclic(const Params&, std::uint64_t);
ExperimentReport run_coupled_loop_geometric(const Params&, std::uint64_t);
ExperimentReport run_off_diagonal(const Params&, std::uint64_t);
ExperimentReport run_mixed_phase(const Params&, std::uint64_t);
ExperimentReport run_geo_bell(const Params&, std::uint64_t);
ExperimentReport run_bell_chsh_path(const Params&, std::uint64_t);
ExperimentReport run_bell_chsh_energy(const Params&, std::uint64_t);
ExperimentReport run_kochen_specker(const Params&, std::uint64_t);
ExperimentReport run_leggett(const Params&, std::uint64_t);
ExperimentReport run_ghz_ifm(const Params&, std::uint64_t);
ExperimentReport run_ghz_polarimeter(const Params&, std::uint64_t);
ExperimentReport run_ozawa_uncertainty(const Params&, std::uint64_t);

// Default velocity of the 4pi experiment: 704 deg of precession at 144 G cm.
double fourpi_default_velocity();

}  // namespace nqsim::exp
