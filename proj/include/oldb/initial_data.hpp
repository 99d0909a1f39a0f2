#pragma once

#include <cstdint>
#include <string>

#include "oldb/solver.hpp"

namespace oldb {

struct InitialDataSpec {
  std::string kind = "random-band";  // taylor-green | random-band | single-block
  std::uint64_t seed = 1;
  double amplitude = 1;      // RMS of |u| (taylor-green: peak)
  double tau_amplitude = 1;  // RMS of |tau| (taylor-green: peak)
  int q0 = 0, q1 = 1;        // random-band blocks
  int block = 0;             // single-block index
};

SimState make_initial(const Gridd& g, const Params& p, const InitialDataSpec& spec);

double rms(const Fieldd& magnitude);

}  // namespace oldb
