#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "conic/jobs.hpp"

using namespace conic;

namespace {

enum Exit { kPass = 0, kComputation = 1, kConfig = 2, kChecksFailed = 3 };

const char* kCommands[] = {"periods", "kernels", "smatrix", "canonical-test", "harmonic-check", "c2", "lattice", "suite"};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void print_suite_table(const json& payload) {
  std::printf("%-3s %-42s %s\n", "#", "criterion", "result");
  for (const auto& row : payload["results"]["criteria"]) {
    std::printf("%-3d %-42s %s\n", row["criterion"].get<int>(), row["title"].get<std::string>().c_str(),
                row["pass"].get<bool>() ? "PASS" : "FAIL");
    for (const auto& c : row["checks"])
      if (!c["pass"].get<bool>())
        std::printf("      failed %s: %.6g %s %.6g\n", c["name"].get<std::string>().c_str(), c["value"].get<double>(),
                    c["relation"].get<std::string>().c_str(), c["tolerance"].get<double>());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral invariants of flat conical metrics on hyperelliptic curves"};
  app.set_version_flag("--version", std::string(kVersion) + " (" + kVersionHash + ")");
  app.require_subcommand(1);

  std::string config_path, out_path, suite_mode = "quick";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<int> workers;
  double tolerance_scale = 1.0;

  for (const char* name : kCommands) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " job");
    sub->add_option("--config", config_path, "JSON job file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed for sampled quantities");
    sub->add_option("--budget", budget, "quadrature node budget for C2")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_path, "report path (JSON; spectra CSV alongside)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-scale", tolerance_scale, "multiplies every check tolerance")->check(CLI::PositiveNumber);
    if (std::string(name) == "suite") sub->add_option("mode", suite_mode, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  JobOptions opt;
  opt.seed = seed;
  opt.budget = budget;
  opt.workers = workers;
  opt.tolerance_scale = tolerance_scale;
  if (const char* cache = std::getenv("CONIC_SPECTRA_CACHE")) opt.cache_dir = cache;

  JobOutput out;
  try {
    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    if (!cfg.is_object()) throw Error(ErrorKind::ConfigInvalid, "at /: expected an object");
    if (cfg.contains("command") && cfg["command"] != command)
      throw Error(ErrorKind::ConfigInvalid, "at /command: config says " + cfg["command"].dump() + " but the subcommand is " + command);
    cfg["command"] = command;
    if (command == "suite" && !cfg.contains("suite")) cfg["suite"] = suite_mode;
    if (out_path.empty() && cfg.contains("output")) {
      if (!cfg["output"].is_string()) throw Error(ErrorKind::ConfigInvalid, "at /output: expected a string");
      out_path = cfg["output"].get<std::string>();
    }
    out = run_job(cfg, opt);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == ErrorKind::ConfigInvalid ? kConfig : kComputation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kComputation;
  }

  const std::string doc = out.report.document().dump(2) + "\n";
  if (command == "suite") print_suite_table(out.report.payload);
  if (out_path.empty()) {
    if (command != "suite") std::fwrite(doc.data(), 1, doc.size(), stdout);
  } else {
    std::ofstream(out_path) << doc;
    if (!out.csv.empty()) std::ofstream(std::filesystem::path(out_path).replace_extension(".csv")) << out.csv;
  }
  if (!out.report.pass) {
    std::fprintf(stderr, "checks failed\n");
    return kChecksFailed;
  }
  return kPass;
}
