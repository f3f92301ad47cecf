#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "nqsim/config.hpp"
#include "nqsim/parallel.hpp"
#include "nqsim/rng.hpp"

using namespace nqsim;

namespace {

std::string pointer_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("unit-suffixed quantities resolve to SI") {
  CHECK(parse_quantity("1.1mT", Dimension::field) == doctest::Approx(1.1e-3));
  CHECK(parse_quantity("144Gcm", Dimension::field_integral) == doctest::Approx(1.44e-4));
  CHECK(parse_quantity("2.0A", Dimension::length) == doctest::Approx(2e-10));
  CHECK(parse_quantity("45kV", Dimension::voltage) == doctest::Approx(45e3));
  CHECK(parse_quantity("20uHz", Dimension::frequency) == doctest::Approx(2e-5));
  CHECK(parse_quantity("0.5pi", Dimension::angle) == doctest::Approx(kPi / 2));
  CHECK(parse_quantity("pi", Dimension::angle) == doctest::Approx(kPi));
  CHECK(parse_quantity("90deg", Dimension::angle) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(parse_quantity("1.1mX", Dimension::field), ConfigError);
  CHECK_THROWS_AS(parse_quantity("1.1mT", Dimension::length), ConfigError);
  CHECK_THROWS_AS(parse_quantity("", Dimension::field), ConfigError);
}

TEST_CASE("parse_config fills defaults and converts units") {
  const RunConfig c = parse_config(R"({"experiment":"fourpi","seed":42})");
  REQUIRE(c.experiment);
  CHECK(*c.experiment == ExperimentId::fourpi);
  CHECK(c.seed == 42);
  CHECK(c.params == experiment_info(ExperimentId::fourpi).defaults());

  const RunConfig d = parse_config(R"({"experiment":"fourpi","field_integral":"144Gcm"})");
  CHECK(d.params.at("field_integral") == doctest::Approx(1.44e-4));
  const RunConfig e = parse_config(R"({"experiment":"fourpi","params":{"field_integral":"1.5e-4Tm"}})");
  CHECK(e.params.at("field_integral") == doctest::Approx(1.5e-4));
}

TEST_CASE("schema errors carry a JSON pointer") {
  CHECK(pointer_of(R"({"experiment":"unknown"})") == "/experiment");
  CHECK(pointer_of(R"({"experiment":"fourpi","nope":1})") == "/nope");
  CHECK(pointer_of(R"({"experiment":"fourpi","params":{"nope":1}})") == "/params/nope");
  CHECK(pointer_of(R"({"experiment":"fourpi","field_integral":"144Gxx"})") == "/field_integral");
  CHECK(pointer_of(R"({"experiment":"fourpi","formats":["pdf"]})") == "/formats/0");
  CHECK(pointer_of(R"({"seed":1})") == "");
  CHECK(pointer_of(R"({"topology":{"paths":[[],[{"type":"mirror"}]]}})") == "/topology/paths/1/0/type");
  CHECK(pointer_of(R"({"topology":{"reflectivity":"1.5"}})") == "/topology/reflectivity");
  CHECK(pointer_of("{not json") == "");
}

TEST_CASE("round trip parse(emit(c)) == c for every experiment") {
  for (ExperimentId id : experiment_ids()) {
    RunConfig c;
    c.experiment = id;
    c.params = experiment_info(id).defaults();
    c.seed = 123456789012345ull;
    c.formats = {"csv", "json"};
    c.output_dir = "out/x";
    const RunConfig back = parse_config(emit_config(c));
    CHECK_MESSAGE(back == c, to_string(id));
  }
}

TEST_CASE("round trip for an inline topology") {
  TopologyConfig t;
  t.kind = TopologyKind::skew_symmetric;
  t.reflectivity = 0.3;
  t.delta_chi = 0.1234567890123;
  ElementConfig coil;
  coil.type = "dc";
  coil.name = "coil";
  coil.axis = Vec3(0.6, 0, 0.8);
  coil.angle = 2.5;
  ElementConfig ab;
  ab.type = "absorber";
  ab.transmissivity = 0.37;
  ab.kind = AbsorberKind::deterministic;
  t.paths = {{coil}, {ab}};
  t.scan = {"coil", 0.0, 4 * kPi, 17};
  t.input = "unpolarized";
  t.mean_counts = 5000;
  RunConfig c;
  c.topology = t;
  const RunConfig back = parse_config(emit_config(c));
  CHECK(back == c);
}

TEST_CASE("inline topology runs and fits the scan") {
  const RunConfig c = parse_config(R"({"topology":{"scan":{"points":33}}})");
  const ExperimentReport r = run_config(c);
  CHECK(r.all_pass());
  REQUIRE(r.scans.size() == 1);
  REQUIRE(r.scans[0].fit);
  CHECK(r.scans[0].fit->contrast == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("report JSON and CSV layout") {
  ExperimentReport r = run_experiment(ExperimentId::spin_superposition_dc);
  const auto j = nlohmann::json::parse(report_json_text(r));
  CHECK(j["schema"] == "nqsim-report/1");
  CHECK(j["id"] == "spin_superposition_dc");
  REQUIRE(!r.scans.empty());
  const std::string csv = scan_csv(r.scans[0].scan);
  CHECK(csv.rfind("param,intensity_O,counts_O,intensity_H,counts_H\n", 0) == 0);
}

TEST_CASE("format_double round-trips") {
  CounterRng rng(stream_key(5, {}));
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, 40 * (rng.uniform() - 0.5));
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("parallel_for is order independent and rethrows") {
  std::vector<std::uint64_t> a(1000), b(1000);
  parallel_for(a.size(), [&](std::size_t i) { a[i] = CounterRng(stream_key(1, {i})).next_u64(); });
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = CounterRng(stream_key(1, {i})).next_u64();
  CHECK(a == b);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw ArgumentError("x"); }), ArgumentError);
}

TEST_CASE("every experiment passes with defaults and is reproducible") {
  for (ExperimentId id : experiment_ids()) {
    const ExperimentReport r1 = run_experiment(id, {}, 1);
    CHECK_MESSAGE(r1.all_pass(), summary_line(r1));
    if (id == ExperimentId::bell_chsh_path || id == ExperimentId::fourpi) {
      const ExperimentReport r2 = run_experiment(id, {}, 1);
      CHECK(report_json_text(r1) == report_json_text(r2));
    }
  }
}
