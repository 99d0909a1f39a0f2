#include <CLI11.hpp>

#include <cstdio>

#include "oldb/experiments.hpp"
#include "oldb/parallel.hpp"

using namespace oldb;

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"fit the estimate constants on the calibration corpus"};
  std::string dir = "configs";
  std::uint64_t seed = kCalibrationSeed;
  int count = kCalibrationCount;
  double margin = kCalibrationMargin;
  app.add_option("--configs", dir, "directory with lipschitz.cfg, lorentz3d.cfg, picard.cfg");
  app.add_option("--seed", seed, "first corpus seed");
  app.add_option("--count", count, "corpus size");
  app.add_option("--margin", margin, "factor applied to the fitted constants");
  CLI11_PARSE(app, argc, argv);
  try {
    const ExperimentConfig lip = parse_config(dir + "/lipschitz.cfg");
    const ExperimentConfig lor = parse_config(dir + "/lorentz3d.cfg");
    const ExperimentConfig pic = parse_config(dir + "/picard.cfg");
    const Calibration cal = calibrate(lip, lor, pic, seed, count, margin);
    ordered_json j;
    j["seed"] = seed;
    j["count"] = count;
    j["margin"] = margin;
    j["lipschitz"] = number(cal.lipschitz);
    j["transport"] = number(cal.transport);
    j["lorentz"] = number(cal.lorentz);
    j["stokes"] = number(cal.stokes);
    std::printf("%s\n", j.dump(2).c_str());
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 3;
  }
}
