#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oldb/types.hpp"

namespace oldb {

struct Params {
  double nu = 1;
  double a = 0;
  double mu = 0;
  double b = 0;
  int friedrichs_n = 0;  // 0: no truncation

  void validate() const;
};

struct SimState {
  double t = 0;
  VectorFieldd u;
  TensorFieldd tau;
  Params params;

  const Gridd& grid() const { return u.grid(); }
};

// u components followed by the d(d+1)/2 upper-triangular tau entries, all spectral
struct SpectralState {
  VectorSpectrumd u;
  VectorSpectrumd tau;
};

int sym_count(int d);
int sym_index(int d, int i, int j);

SpectralState to_spectral(const SimState& s);
SimState to_physical(const SpectralState& y, const Params& p, double t);

struct StepInvariants {
  double divergence = 0;  // ||div u|| / ||grad u||
  double symmetry = 0;    // exact by storage, measured on the physical tensor
  double skew = 0;        // |<tau w - w tau, tau>| / (||grad u||_inf ||tau||^2)
};

class BlowUp : public RuntimeFailure {
 public:
  BlowUp(double t, SimState last);
  double time;
  SimState last_valid;
};

// Pseudo-spectral Heun integrator with exponential factors on -nu Lap and -a.
class Integrator {
 public:
  Integrator(const Gridd& g, const Params& p);

  enum Parts { Both = 3, Velocity = 1, Stress = 2 };

  // nonlinear part of the right-hand sides; damping and viscosity excluded
  SpectralState nonlinear(const SpectralState& y, double* max_u = nullptr, double* skew = nullptr,
                          Parts parts = Both) const;

  // one step; throws StepSizeError on a CFL violation and BlowUp on non-finite values
  void step(SpectralState& y, double& t, double dt);

  void set_blowup_reference(double u_inf) { blowup_ref_ = u_inf; }
  const StepInvariants& last_invariants() const { return inv_; }
  const Params& params() const { return p_; }
  const Gridd& grid() const { return g_; }

  void project(SpectralState& y) const;

 private:
  Gridd g_;
  Params p_;
  ArrayXd dealias_, friedrichs_;
  double blowup_ref_ = 0;
  StepInvariants inv_;
};

TensorFieldd rhs_tau(const SimState& s);
VectorFieldd rhs_u(const SimState& s);
SimState step(const SimState& s, double dt);
double cfl_limit(const SimState& s);

// ---- diagnostics ----

struct DiagnosticsConfig {
  double p = 2;  // Lebesgue exponent for the tau columns
};

struct Sample;

std::string format_double(double v);  // %.17g

struct Diagnostics {
  static const std::vector<std::string>& columns();

  std::vector<std::vector<double>> rows;

  void add(const Sample& s, double nu);

  void write_csv(const std::string& path) const;
  std::string csv() const;
  const std::vector<double>& last() const { return rows.back(); }
  std::vector<double> column(const std::string& name) const;
};

struct Sample {
  double time = 0;
  double u_L2_sq = 0;
  double grad_u_L2_sq = 0;
  double tau_L2 = 0;
  double tau_Lp = 0;
  double u_B_inf1_m1 = 0;
  double u_B_inf1_1 = 0;
  double tau_B_inf1_0 = 0;
  double tau_B_p1_dp = 0;
  double u_weak_d = 0;
  double tau_weak_d2 = 0;
  double symmetry = 0;
  // running integrals up to `time`
  double int_grad_u_sq = 0;  // per step, trapezoid
  double int_tau_sq = 0;     // per step, trapezoid
  double int_u_B_inf1_1 = 0; // over samples, trapezoid
};

Sample measure(const SpectralState& y, const Partitiond& P, double p, double t);

// ---- driver ----

struct RunConfig {
  double T = 1;
  double dt = 1e-3;
  int sample_every = 10;
  DiagnosticsConfig diag;
  bool track_invariants = true;
  bool adaptive = false;  // halve the step on a CFL failure; a collapse below 1e-6 dt counts as blow-up
  std::vector<double> checkpoint_times;
  std::string checkpoint_prefix;
};

struct InvariantRecord {
  double max_divergence = 0, max_symmetry = 0, max_skew = 0;
  long steps = 0;
};

struct StepRecord {
  double t, u_sq, tau_sq, int_grad_u_sq, int_tau_sq;
};

struct RunResult {
  Diagnostics diagnostics;
  SimState final_state;
  bool blew_up = false;
  double blowup_time = 0;
  InvariantRecord invariants;
  std::vector<Sample> samples;
  std::vector<StepRecord> steps;
  std::vector<std::string> checkpoints;
};

RunResult run(const SimState& init, const RunConfig& cfg);

// ---- checkpoints ----

void write_checkpoint(const SimState& s, const std::string& path);
SimState read_checkpoint(const std::string& path);

}  // namespace oldb
