#include "nqsim/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nqsim {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::paper: return "paper";
    case Provenance::trivial: return "trivial";
    case Provenance::derived: return "derived";
  }
  return "derived";
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::abs: return "abs";
    case Relation::rel: return "rel";
    case Relation::phase: return "phase";
    case Relation::le: return "le";
    case Relation::ge: return "ge";
  }
  return "abs";
}

const Assertion& ExperimentReport::check(std::string name, double expected, double observed, double tolerance,
                                         Provenance prov, Relation rel, std::string source) {
  Assertion a{std::move(name), expected, observed, tolerance, rel, prov, std::move(source), false};
  switch (rel) {
    case Relation::abs: a.pass = std::abs(observed - expected) <= tolerance; break;
    case Relation::rel: a.pass = std::abs(observed - expected) <= tolerance * std::abs(expected); break;
    case Relation::phase: a.pass = phase_distance(observed, expected) <= tolerance; break;
    case Relation::le: a.pass = observed <= expected + tolerance; break;
    case Relation::ge: a.pass = observed >= expected - tolerance; break;
  }
  assertions.push_back(std::move(a));
  return assertions.back();
}

const Assertion& ExperimentReport::check_le(std::string name, double observed, double limit, Provenance prov,
                                            std::string source) {
  return check(std::move(name), limit, observed, 0.0, prov, Relation::le, std::move(source));
}

const Assertion& ExperimentReport::check_ge(std::string name, double observed, double limit, Provenance prov,
                                            std::string source) {
  return check(std::move(name), limit, observed, 0.0, prov, Relation::ge, std::move(source));
}

const Assertion& ExperimentReport::check_true(std::string name, bool ok, Provenance prov, std::string source) {
  return check(std::move(name), 1.0, ok ? 1.0 : 0.0, 0.0, prov, Relation::abs, std::move(source));
}

void ExperimentReport::add_scan(FringeScan scan, std::optional<FitResult> fit) {
  scans.push_back({std::move(scan), fit});
}

bool ExperimentReport::all_pass() const { return failures() == 0; }

std::size_t ExperimentReport::failures() const {
  std::size_t n = 0;
  for (const auto& a : assertions)
    if (!a.pass) ++n;
  return n;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

nlohmann::ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::ordered_json fit_json(const FitResult& f) {
  nlohmann::ordered_json j;
  j["offset"] = num(f.offset);
  j["amplitude"] = num(f.amplitude);
  j["phase"] = num(f.phase);
  j["contrast"] = num(f.contrast);
  j["offset_err"] = num(f.offset_err);
  j["amplitude_err"] = num(f.amplitude_err);
  j["phase_err"] = num(f.phase_err);
  j["contrast_err"] = num(f.contrast_err);
  j["chi2"] = num(f.chi2);
  j["dof"] = f.dof;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["id"] = r.id;
  j["seed"] = r.seed;
  j["inputs"] = r.inputs;
  auto scans = nlohmann::ordered_json::array();
  for (const auto& s : r.scans) {
    nlohmann::ordered_json js;
    js["param"] = s.scan.param;
    js["mean_counts"] = num(s.scan.mean_counts);
    js["seed"] = s.scan.seed;
    auto arr = [](const std::vector<double>& v) {
      auto a = nlohmann::ordered_json::array();
      for (double x : v) a.push_back(num(x));
      return a;
    };
    js["xs"] = arr(s.scan.xs);
    js["intensity_O"] = arr(s.scan.intensity_O);
    js["intensity_H"] = arr(s.scan.intensity_H);
    js["counts_O"] = s.scan.counts_O;
    js["counts_H"] = s.scan.counts_H;
    if (s.fit) js["fit"] = fit_json(*s.fit);
    scans.push_back(std::move(js));
  }
  j["scans"] = std::move(scans);
  nlohmann::ordered_json d = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.derived) d[k] = num(v);
  j["derived"] = std::move(d);
  auto as = nlohmann::ordered_json::array();
  for (const auto& a : r.assertions) {
    nlohmann::ordered_json ja;
    ja["name"] = a.name;
    ja["expected"] = num(a.expected);
    ja["observed"] = num(a.observed);
    ja["tolerance"] = num(a.tolerance);
    ja["relation"] = to_string(a.relation);
    ja["provenance"] = to_string(a.provenance);
    if (!a.source.empty()) ja["source"] = a.source;
    ja["pass"] = a.pass;
    as.push_back(std::move(ja));
  }
  j["assertions"] = std::move(as);
  j["warnings"] = r.warnings;
  j["pass"] = r.all_pass();
  return j;
}

std::string report_json_text(const ExperimentReport& r) { return to_json(r).dump(2) + "\n"; }

std::string scan_csv(const FringeScan& s) {
  std::string out = "param,intensity_O,counts_O,intensity_H,counts_H\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_double(s.xs[i]);
    out += ',';
    out += format_double(s.intensity_O[i]);
    out += ',';
    if (s.noisy()) out += std::to_string(s.counts_O[i]);
    out += ',';
    out += format_double(s.intensity_H[i]);
    out += ',';
    if (s.noisy()) out += std::to_string(s.counts_H[i]);
    out += '\n';
  }
  return out;
}

std::string summary_line(const ExperimentReport& r) {
  std::ostringstream os;
  os << r.id << ": " << (r.all_pass() ? "PASS" : "FAIL") << " (" << (r.assertions.size() - r.failures()) << "/"
     << r.assertions.size() << " assertions)";
  for (const auto& a : r.assertions)
    if (!a.pass) os << " [failed: " << a.name << "]";
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

}  // namespace nqsim
