#pragma once

// Experiment reports: assertions with provenance, scans with fits, JSON and
// CSV serialization, atomic file output.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nqsim/analysis.hpp"

namespace nqsim {

inline constexpr const char* kReportSchema = "nqsim-report/1";

enum class Provenance { paper, trivial, derived };
std::string to_string(Provenance p);

// How observed is compared with expected.
enum class Relation { abs, rel, phase, le, ge };
std::string to_string(Relation r);

struct Assertion {
  std::string name;
  double expected = 0;
  double observed = 0;
  double tolerance = 0;
  Relation relation = Relation::abs;
  Provenance provenance = Provenance::derived;
  std::string source;  // short anchor for paper numbers
  bool pass = false;
};

struct ScanRecord {
  FringeScan scan;
  std::optional<FitResult> fit;
};

struct ExperimentReport {
  std::string id;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  std::vector<ScanRecord> scans;
  std::map<std::string, double> derived;
  std::vector<Assertion> assertions;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;

  // |observed - expected| <= tolerance (or the stated relation).
  const Assertion& check(std::string name, double expected, double observed, double tolerance, Provenance prov,
                         Relation rel = Relation::abs, std::string source = "");
  const Assertion& check_le(std::string name, double observed, double limit, Provenance prov, std::string source = "");
  const Assertion& check_ge(std::string name, double observed, double limit, Provenance prov, std::string source = "");
  const Assertion& check_true(std::string name, bool ok, Provenance prov, std::string source = "");

  void add_scan(FringeScan scan, std::optional<FitResult> fit = std::nullopt);
  bool all_pass() const;
  std::size_t failures() const;
};

// Shortest round-trip decimal.
std::string format_double(double x);

nlohmann::ordered_json to_json(const ExperimentReport& r);
std::string report_json_text(const ExperimentReport& r);
std::string scan_csv(const FringeScan& s);
std::string summary_line(const ExperimentReport& r);

// Write via a temporary file in the same directory and rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace nqsim
