#pragma once

#include <string>
#include <vector>

#include "oldb/solver.hpp"

namespace oldb {

using Trajectory = std::vector<VectorSpectrumd>;

// u_L(t_k) = e^{nu t_k Lap} u0
Trajectory linear_stokes_u_L(const VectorSpectrumd& u0, double nu, const std::vector<double>& times);

// frozen-drift transport of the stress (unique entries), Heun with the drift taken at both nodes
Trajectory transport_tau(const VectorSpectrumd& tau0, const Trajectory& drift, const Params& p,
                         const std::vector<double>& times);

// per-block L^p norms along a trajectory; p = 2 goes through Parseval
TrajectoryNorms<double> trajectory_blocks(const Trajectory& tr, const std::vector<double>& times,
                                          const Partitiond& P, double p, const std::vector<double>& weights = {});

struct PicardConfig {
  double T = 0.5;
  double dt = 0.01;
  int n_max = 8;
  double p = 2;
  double C = 8;
  double epsilon = 0.01;
};

struct PicardIterate {
  int n = 0;
  double U_bar = 0;   // ||u_bar||_{L^inf B^{d/p-1}} + nu ||u_bar||_{L^1 B^{d/p+1}}
  double delta = 0;   // ||du||_{~L^inf B^{d/p-2}} + nu ||du||_{~L^1 B^{d/p}}, du = u^{n+1} - u^n
  double ratio = 0;   // delta_n / delta_{n-1}; NaN when undefined
  double tau_growth = 0;   // max_t ||tau^n(t)||_{B^{d/p}_{p,1}} / (||tau0|| e^{-at})
  double drift_int = 0;    // int ||grad u^{n-1}||_{B^0_{inf,1}}
};

struct PicardResult {
  std::vector<double> times;
  std::vector<PicardIterate> iterates;
  Trajectory u, tau;  // last iterate, full velocity
  double floor = 0;   // roundoff floor for delta
  bool converged = false;

  std::string csv() const;
};

PicardResult picard_solve(const SimState& init, const PicardConfig& cfg);

struct Horizon {
  double T = 0;
  double lhs = 0, rhs = 0;
};

// largest multiple of dt (<= T_cap) with C ||u_L||^2_{L^2 B^{d/p}_{p,1}} + C T ||tau0||_{B^{d/p}_{p,1}} e^{nu/2}
// <= nu eps / (100 C)
Horizon smallness_horizon(const SimState& init, double C, double epsilon, double dt, double T_cap, double p = 2);

}  // namespace oldb
