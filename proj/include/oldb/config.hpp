#pragma once

#include <map>
#include <string>
#include <vector>

#include "oldb/initial_data.hpp"

namespace oldb {

struct ExperimentConfig {
  std::string experiment;
  int d = 2, N = 64;
  double L = 2 * 3.14159265358979323846;
  Params params;
  double dt = 0;  // 0: from the CFL estimate of the initial data
  double T = 1;
  int sample_every = 10;
  InitialDataSpec init;
  int count = 1;  // data sets, seeds init.seed, init.seed + 1, ...
  std::string output = "out";
  double epsilon = 0.01;
  double diag_p = 2;
  int picard_n_max = 8;
  std::vector<double> mu_values;            // noncorot
  std::vector<double> shear = {1, 2, 4, 8};  // lipschitz: frozen drift (m sin y, 0)
  int shear_N = 64;
  std::string origin;                        // file the values came from

  // sweep.<key> = v1,v2,... in file order
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep;
  std::map<std::string, int> lines;

  Gridd grid() const { return Gridd(d, N, L); }
  void validate() const;
};

extern const std::vector<std::string> kExperiments;

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// assign one key with the same rules as the file parser; line is used in messages
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value, int line);

// cartesian product over the sweep keys, last key fastest
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& c);

// the configured step, or min(0.01, 0.2 h / max|u0|) rounded so that T/dt is an integer
double resolve_dt(const ExperimentConfig& c, const SimState& init);

}  // namespace oldb
