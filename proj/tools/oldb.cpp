#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "oldb/experiments.hpp"
#include "oldb/parallel.hpp"

namespace fs = std::filesystem;
using namespace oldb;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeFailure = 3 };

void print(const VerificationReport& r) {
  for (const auto& c : r.checks)
    std::printf("%s %-40s lhs=%-14.6g rhs=%-14.6g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.lhs, c.rhs,
                c.anchor.c_str());
  for (const auto& f : r.failures) std::printf("FAIL %s\n", f.c_str());
}

int run_configs(const std::vector<ExperimentConfig>& cfgs) {
  bool ok = true;
  for (const auto& c : cfgs) {
    const ExperimentOutcome o = run_experiment(c);
    std::printf("== %s -> %s\n", c.experiment.c_str(), c.output.c_str());
    print(o.report);
    ok = ok && o.pass();
  }
  return ok ? kPass : kCheckFailure;
}

int report_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw RuntimeFailure(dir + ": not a directory");
  std::vector<fs::path> found;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "report.json") found.push_back(e.path());
  std::sort(found.begin(), found.end());
  if (found.empty()) throw RuntimeFailure(dir + ": no report.json found");
  ordered_json summary;
  summary["schema_version"] = kReportSchemaVersion;
  ordered_json list = ordered_json::array();
  bool ok = true;
  for (const auto& p : found) {
    const VerificationReport r = read_report(p.string());
    std::printf("== %s (%s)\n", r.experiment.c_str(), fs::relative(p, dir).string().c_str());
    print(r);
    int failed = 0;
    for (const auto& c : r.checks) failed += c.pass ? 0 : 1;
    list.push_back({{"report", fs::relative(p, dir).string()},
                    {"experiment", r.experiment},
                    {"checks", r.checks.size()},
                    {"failed", failed},
                    {"pass", r.all_pass()}});
    ok = ok && r.all_pass();
  }
  summary["reports"] = std::move(list);
  summary["pass"] = ok;
  write_file((fs::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
  return ok ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"Oldroyd-B solver and estimate verification harness"};
  app.require_subcommand(1);
  std::string config, dir, output;

  auto* run = app.add_subcommand("run", "run the experiment(s) of a config file");
  run->add_option("config", config, "config path")->required();
  run->add_option("-o,--output", output, "override the output directory");

  auto* verify = app.add_subcommand("verify", "toolbox checks on the grid of a config file");
  verify->add_option("config", config, "config path")->required();
  verify->add_option("-o,--output", output, "override the output directory");

  auto* report = app.add_subcommand("report", "summarise the report.json files under a directory");
  report->add_option("dir", dir, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*report) return report_dir(dir);
    ExperimentConfig c = parse_config(config);
    if (!output.empty()) c.output = output;
    if (*verify) {
      c.experiment = "toolbox";
      c.sweep.clear();
      return run_configs({c});
    }
    return run_configs(expand_sweep(c));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kRuntimeFailure;
  }
}
