#pragma once

// JSON run configuration: an experiment id with parameter overrides, or an
// inline beamline topology with a scan.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nqsim/beamline.hpp"
#include "nqsim/experiments.hpp"

namespace nqsim {

struct ElementConfig {
  std::string type;  // phase | dc | absorber
  std::string name;
  double chi = 0.0;                 // phase
  Vec3 axis{0, 0, 1};               // dc
  double angle = 0.0;               // dc
  double transmissivity = 1.0;      // absorber
  AbsorberKind kind = AbsorberKind::stochastic;

  bool operator==(const ElementConfig&) const = default;
};

struct ScanConfig {
  std::string param = "delta_chi";
  double from = 0.0, to = 2 * 3.14159265358979323846;
  int points = 32;

  bool operator==(const ScanConfig&) const = default;
};

struct TopologyConfig {
  TopologyKind kind = TopologyKind::LLL;
  double reflectivity = 0.5;
  double delta_chi = 0.0;
  std::vector<std::vector<ElementConfig>> paths{{}, {}};
  ScanConfig scan;
  std::string input = "up";  // up | down | unpolarized
  double mean_counts = 0.0;

  bool operator==(const TopologyConfig&) const = default;
  BeamlineTopology build() const;
};

struct RunConfig {
  std::optional<ExperimentId> experiment;
  Params params;  // resolved, SI; empty for topology runs
  std::optional<TopologyConfig> topology;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  std::set<std::string> formats{"json"};

  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError with a JSON pointer for schema and unit problems.
RunConfig parse_config(const std::string& text);
std::string emit_config(const RunConfig& c);

// Report for an inline topology: the scan, its fit and sanity assertions.
ExperimentReport run_topology(const TopologyConfig& t, std::uint64_t seed);
ExperimentReport run_config(const RunConfig& c);

}  // namespace nqsim
