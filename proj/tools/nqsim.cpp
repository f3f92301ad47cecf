// nqsim: run the experiment reproductions or an inline beamline from the
// command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nqsim/config.hpp"
#include "nqsim/errors.hpp"
#include "nqsim/parallel.hpp"

namespace {

using namespace nqsim;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("", "cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct Output {
  std::string dir = ".";
  std::set<std::string> formats{"json"};
};

void write_report(const ExperimentReport& r, const Output& out) {
  namespace fs = std::filesystem;
  const fs::path dir(out.dir);
  if (out.formats.count("json")) write_atomic((dir / (r.id + ".json")).string(), report_json_text(r));
  if (out.formats.count("csv"))
    for (std::size_t k = 0; k < r.scans.size(); ++k)
      write_atomic((dir / (r.id + "_scan" + std::to_string(k) + ".csv")).string(), scan_csv(r.scans[k].scan));
}

// Parameter overrides given as key=value on the command line, in the same
// unit syntax as the config file.
std::string overrides_json(const std::vector<std::string>& sets) {
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("", "--set expects key=value, got '" + s + "'");
    p[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return p.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neutron interferometry and polarimetry simulator"};
  app.require_subcommand(1);

  std::string id, config_path, out_dir;
  std::uint64_t seed = 1;
  std::vector<std::string> formats, sets;

  auto* list = app.add_subcommand("list", "List experiment ids");

  auto* run = app.add_subcommand("run", "Run one experiment or a config file");
  run->add_option("id", id, "Experiment id");
  run->add_option("--config,-c", config_path, "JSON config file");
  auto* run_seed = run->add_option("--seed", seed, "Seed (overrides the config)");
  auto* run_fmt = run->add_option("--format,-f", formats, "Output formats")->check(CLI::IsMember({"json", "csv"}));
  auto* run_out = run->add_option("--out,-o", out_dir, "Output directory");
  run->add_option("--set", sets, "Parameter override key=value");

  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("config", config_path, "JSON config file")->required();

  bool all = false;
  auto* batch = app.add_subcommand("batch", "Run many experiments");
  batch->add_flag("--all", all, "Run every experiment")->required();
  batch->add_option("--seed", seed, "Seed");
  batch->add_option("--format,-f", formats, "Output formats")->check(CLI::IsMember({"json", "csv"}));
  batch->add_option("--out,-o", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& info : registry()) std::cout << to_string(info.id) << "  " << info.title << "\n";
      return kExitOk;
    }

    if (*validate) {
      RunConfig c = parse_config(read_file(config_path));
      if (c.topology) c.topology->build();
      std::cout << "valid: " << (c.experiment ? to_string(*c.experiment) : std::string("topology")) << "\n";
      return kExitOk;
    }

    if (*run) {
      if (id.empty() == config_path.empty()) throw ConfigError("", "give either an experiment id or --config");
      RunConfig c;
      if (!config_path.empty()) {
        if (!sets.empty()) throw ConfigError("", "--set applies to experiment ids, put overrides in the config file");
        c = parse_config(read_file(config_path));
      } else {
        nlohmann::ordered_json j = {{"experiment", id}, {"params", nlohmann::ordered_json::parse(overrides_json(sets))}};
        c = parse_config(j.dump());
      }
      if (run_seed->count()) c.seed = seed;
      Output out{c.output_dir, c.formats};
      if (run_out->count()) out.dir = out_dir;
      if (run_fmt->count()) out.formats = {formats.begin(), formats.end()};
      if (c.topology) c.topology->build();
      const ExperimentReport r = run_config(c);
      write_report(r, out);
      std::cout << summary_line(r) << "\n";
      return r.all_pass() ? kExitOk : kExitAssertion;
    }

    if (*batch) {
      Output out;
      if (!out_dir.empty()) out.dir = out_dir;
      if (!formats.empty()) out.formats = {formats.begin(), formats.end()};
      const auto& ids = experiment_ids();
      std::vector<ExperimentReport> reports(ids.size());
      std::vector<std::string> errors(ids.size());
      parallel_for(ids.size(), [&](std::size_t i) {
        try {
          reports[i] = run_experiment(ids[i], {}, seed);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      });
      bool ok = true;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!errors[i].empty()) {
          std::cout << to_string(ids[i]) << ": ERROR " << errors[i] << "\n";
          ok = false;
          continue;
        }
        write_report(reports[i], out);
        std::cout << summary_line(reports[i]) << "\n";
        ok = ok && reports[i].all_pass();
      }
      return ok ? kExitOk : kExitAssertion;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
  return kExitOk;
}
