#include "nqsim/config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "nqsim/parallel.hpp"

namespace nqsim {

using json = nlohmann::ordered_json;

namespace {

const char* const kTopLevel[] = {"experiment", "seed", "output_dir", "formats", "params", "topology"};

bool is_top_level(const std::string& k) {
  for (const char* t : kTopLevel)
    if (k == t) return true;
  return false;
}

double quantity(const json& v, Dimension dim, const std::string& ptr) {
  if (v.is_number()) {
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(ptr, "non-finite number");
    return x;
  }
  if (v.is_string()) return parse_quantity(v.get<std::string>(), dim, ptr);
  throw ConfigError(ptr, "expected a number or a unit string");
}

std::string emit_quantity(double x, Dimension dim) { return format_double(x) + si_suffix(dim); }

int integer(const json& v, const std::string& ptr, int lo) {
  if (!v.is_number_integer() || v.get<long long>() < lo || v.get<long long>() > 100000000)
    throw ConfigError(ptr, "expected an integer >= " + std::to_string(lo));
  return static_cast<int>(v.get<long long>());
}

std::string text(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw ConfigError(ptr, "expected a string");
  return v.get<std::string>();
}

void only_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(ptr, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(ptr + "/" + it.key(), "unknown key");
  }
}

TopologyKind parse_kind(const std::string& s, const std::string& ptr) {
  for (auto k : {TopologyKind::LLL, TopologyKind::skew_symmetric, TopologyKind::four_blade})
    if (to_string(k) == s) return k;
  throw ConfigError(ptr, "unknown topology kind '" + s + "' (LLL, skew-symmetric, four-blade)");
}

ElementConfig parse_element(const json& j, const std::string& ptr) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError(ptr, "element needs a type");
  ElementConfig e;
  e.type = text(j["type"], ptr + "/type");
  if (j.contains("name")) e.name = text(j["name"], ptr + "/name");
  if (e.type == "phase") {
    only_keys(j, ptr, {"type", "name", "chi"});
    if (j.contains("chi")) e.chi = quantity(j["chi"], Dimension::angle, ptr + "/chi");
  } else if (e.type == "dc") {
    only_keys(j, ptr, {"type", "name", "axis", "angle"});
    if (j.contains("axis")) {
      const json& a = j["axis"];
      if (!a.is_array() || a.size() != 3) throw ConfigError(ptr + "/axis", "expected [x, y, z]");
      for (int i = 0; i < 3; ++i) e.axis[i] = quantity(a[i], Dimension::none, ptr + "/axis/" + std::to_string(i));
      if (std::abs(e.axis.norm() - 1.0) > 1e-9) throw ConfigError(ptr + "/axis", "axis must be a unit vector");
    }
    if (j.contains("angle")) e.angle = quantity(j["angle"], Dimension::angle, ptr + "/angle");
  } else if (e.type == "absorber") {
    only_keys(j, ptr, {"type", "name", "transmissivity", "kind"});
    if (j.contains("transmissivity"))
      e.transmissivity = quantity(j["transmissivity"], Dimension::none, ptr + "/transmissivity");
    if (!(e.transmissivity >= 0 && e.transmissivity <= 1))
      throw ConfigError(ptr + "/transmissivity", "must lie in [0, 1]");
    if (j.contains("kind")) {
      std::string k = text(j["kind"], ptr + "/kind");
      if (k == "stochastic") e.kind = AbsorberKind::stochastic;
      else if (k == "deterministic") e.kind = AbsorberKind::deterministic;
      else throw ConfigError(ptr + "/kind", "expected stochastic or deterministic");
    }
  } else {
    throw ConfigError(ptr + "/type", "unknown element type '" + e.type + "' (phase, dc, absorber)");
  }
  return e;
}

TopologyConfig parse_topology(const json& j, const std::string& ptr) {
  only_keys(j, ptr, {"kind", "reflectivity", "delta_chi", "paths", "scan", "input", "mean_counts"});
  TopologyConfig t;
  if (j.contains("kind")) t.kind = parse_kind(text(j["kind"], ptr + "/kind"), ptr + "/kind");
  if (j.contains("reflectivity")) t.reflectivity = quantity(j["reflectivity"], Dimension::none, ptr + "/reflectivity");
  if (!(t.reflectivity > 0 && t.reflectivity < 1)) throw ConfigError(ptr + "/reflectivity", "must lie in (0, 1)");
  if (j.contains("delta_chi")) t.delta_chi = quantity(j["delta_chi"], Dimension::angle, ptr + "/delta_chi");
  if (j.contains("paths")) {
    const json& ps = j["paths"];
    if (!ps.is_array() || ps.size() != 2) throw ConfigError(ptr + "/paths", "expected two element lists");
    for (int k = 0; k < 2; ++k) {
      const std::string pk = ptr + "/paths/" + std::to_string(k);
      if (!ps[k].is_array()) throw ConfigError(pk, "expected an array");
      for (std::size_t i = 0; i < ps[k].size(); ++i) t.paths[k].push_back(parse_element(ps[k][i], pk + "/" + std::to_string(i)));
    }
  }
  if (j.contains("scan")) {
    const json& s = j["scan"];
    const std::string sp = ptr + "/scan";
    only_keys(s, sp, {"param", "from", "to", "points"});
    if (s.contains("param")) t.scan.param = text(s["param"], sp + "/param");
    if (s.contains("from")) t.scan.from = quantity(s["from"], Dimension::angle, sp + "/from");
    if (s.contains("to")) t.scan.to = quantity(s["to"], Dimension::angle, sp + "/to");
    if (s.contains("points")) t.scan.points = integer(s["points"], sp + "/points", 3);
    if (!(t.scan.to > t.scan.from)) throw ConfigError(sp + "/to", "scan must increase");
  }
  bool found = t.scan.param == "delta_chi";
  for (const auto& path : t.paths)
    for (const auto& e : path) found = found || (!e.name.empty() && e.name == t.scan.param);
  if (!found) throw ConfigError(ptr + "/scan/param", "no element named '" + t.scan.param + "'");
  if (j.contains("input")) {
    t.input = text(j["input"], ptr + "/input");
    if (t.input != "up" && t.input != "down" && t.input != "unpolarized")
      throw ConfigError(ptr + "/input", "expected up, down or unpolarized");
  }
  if (j.contains("mean_counts")) t.mean_counts = quantity(j["mean_counts"], Dimension::none, ptr + "/mean_counts");
  if (t.mean_counts < 0) throw ConfigError(ptr + "/mean_counts", "must be >= 0");
  return t;
}

json emit_element(const ElementConfig& e) {
  json j;
  j["type"] = e.type;
  if (!e.name.empty()) j["name"] = e.name;
  if (e.type == "phase") {
    j["chi"] = emit_quantity(e.chi, Dimension::angle);
  } else if (e.type == "dc") {
    j["axis"] = json::array({emit_quantity(e.axis.x(), Dimension::none), emit_quantity(e.axis.y(), Dimension::none),
                             emit_quantity(e.axis.z(), Dimension::none)});
    j["angle"] = emit_quantity(e.angle, Dimension::angle);
  } else {
    j["transmissivity"] = emit_quantity(e.transmissivity, Dimension::none);
    j["kind"] = e.kind == AbsorberKind::stochastic ? "stochastic" : "deterministic";
  }
  return j;
}

}  // namespace

BeamlineTopology TopologyConfig::build() const {
  BeamlineTopology t;
  t.kind = kind;
  t.splitter = t.mirror = t.analyzer = BeamSplitterSpec::symmetric(reflectivity);
  t.delta_chi = delta_chi;
  for (int k = 0; k < 2; ++k)
    for (const auto& e : paths[k]) {
      if (e.type == "phase") t.paths[k].push_back({e.name, PhaseShifterSpec{e.chi}});
      else if (e.type == "dc") t.paths[k].push_back({e.name, DcCoilSpec{e.axis, e.angle}});
      else t.paths[k].push_back({e.name, AbsorberSpec{e.kind, e.transmissivity}});
    }
  t.validate();
  return t;
}

RunConfig parse_config(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
  RunConfig c;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw ConfigError("/seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) c.output_dir = text(j["output_dir"], "/output_dir");
  if (j.contains("formats")) {
    const json& f = j["formats"];
    if (!f.is_array() || f.empty()) throw ConfigError("/formats", "expected a non-empty array");
    c.formats.clear();
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::string s = text(f[i], "/formats/" + std::to_string(i));
      if (s != "csv" && s != "json") throw ConfigError("/formats/" + std::to_string(i), "expected csv or json");
      c.formats.insert(s);
    }
  }
  if (j.contains("experiment") == j.contains("topology"))
    throw ConfigError("", "exactly one of 'experiment' and 'topology' is required");

  if (j.contains("topology")) {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!is_top_level(it.key()) || it.key() == "params") throw ConfigError("/" + it.key(), "unknown key");
    c.topology = parse_topology(j["topology"], "/topology");
    return c;
  }

  const std::string name = text(j["experiment"], "/experiment");
  auto id = parse_experiment_id(name);
  if (!id) throw ConfigError("/experiment", "unknown experiment '" + name + "'");
  c.experiment = *id;
  const auto& info = experiment_info(*id);
  Params overrides;
  auto take = [&](const std::string& key, const json& v, const std::string& ptr) {
    const ParamSpec* spec = info.find(key);
    if (!spec) throw ConfigError(ptr, "unknown parameter for experiment " + name);
    if (overrides.count(key)) throw ConfigError(ptr, "parameter given twice");
    overrides[key] = quantity(v, spec->dim, ptr);
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (is_top_level(it.key())) continue;
    take(it.key(), it.value(), "/" + it.key());
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    if (!p.is_object()) throw ConfigError("/params", "expected an object");
    for (auto it = p.begin(); it != p.end(); ++it) take(it.key(), it.value(), "/params/" + it.key());
  }
  c.params = resolve_params(*id, overrides);
  return c;
}

std::string emit_config(const RunConfig& c) {
  json j;
  if (c.experiment) {
    j["experiment"] = to_string(*c.experiment);
  }
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["formats"] = json::array();
  for (const auto& f : c.formats) j["formats"].push_back(f);
  if (c.experiment) {
    const auto& info = experiment_info(*c.experiment);
    json p = json::object();
    for (const auto& spec : info.params) {
      auto it = c.params.find(spec.name);
      if (it != c.params.end()) p[spec.name] = emit_quantity(it->second, spec.dim);
    }
    j["params"] = p;
  }
  if (c.topology) {
    const TopologyConfig& t = *c.topology;
    json tj;
    tj["kind"] = to_string(t.kind);
    tj["reflectivity"] = emit_quantity(t.reflectivity, Dimension::none);
    tj["delta_chi"] = emit_quantity(t.delta_chi, Dimension::angle);
    tj["paths"] = json::array();
    for (const auto& path : t.paths) {
      json pj = json::array();
      for (const auto& e : path) pj.push_back(emit_element(e));
      tj["paths"].push_back(pj);
    }
    tj["scan"] = {{"param", t.scan.param},
                  {"from", emit_quantity(t.scan.from, Dimension::angle)},
                  {"to", emit_quantity(t.scan.to, Dimension::angle)},
                  {"points", t.scan.points}};
    tj["input"] = t.input;
    tj["mean_counts"] = emit_quantity(t.mean_counts, Dimension::none);
    j["topology"] = tj;
  }
  return j.dump(2) + "\n";
}

ExperimentReport run_topology(const TopologyConfig& tc, std::uint64_t seed) {
  const BeamlineTopology topo = tc.build();
  ExperimentReport rep;
  rep.id = "topology";
  rep.seed = seed;
  rep.inputs = json::parse(emit_config(RunConfig{std::nullopt, {}, tc, seed, ".", {"json"}}))["topology"];

  const MixedState in = tc.input == "unpolarized" ? mixed_from_bloch(0.0, Vec3(0, 0, 1))
                        : tc.input == "down"      ? MixedState(spin_down())
                                                  : MixedState(spin_up());
  const int n = tc.scan.points;
  std::vector<double> xs(n), io(n), ih(n);
  for (int i = 0; i < n; ++i) xs[i] = tc.scan.from + (tc.scan.to - tc.scan.from) * i / (n - 1);
  parallel_for(n, [&](std::size_t i) {
    const auto pr = propagate(topo, in, tc.scan.param, xs[i]);
    io[i] = pr.intensities.I_O;
    ih[i] = pr.intensities.I_H;
  });
  double worst = 0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, io[i] + ih[i] - 1.0);
  rep.check_le("I_O + I_H <= 1 (blades and absorbers only lose intensity)", worst, 1e-12, Provenance::trivial);

  FringeScan s = make_scan(tc.scan.param, xs, io, ih, tc.mean_counts, seed);
  if (tc.scan.to - tc.scan.from >= 2 * kPi - 1e-9) {
    FitResult f = fit_fringe(s);
    rep.derived["fit_phase"] = f.phase;
    rep.derived["fit_contrast"] = f.contrast;
    rep.add_scan(std::move(s), f);
  } else {
    rep.add_scan(std::move(s));
  }
  return rep;
}

ExperimentReport run_config(const RunConfig& c) {
  if (c.topology) return run_topology(*c.topology, c.seed);
  if (!c.experiment) throw ConfigError("", "no experiment or topology");
  return run_experiment(*c.experiment, c.params, c.seed);
}

}  // namespace nqsim
