#pragma once

#include <string>
#include <vector>

#include "oldb/bounds.hpp"
#include "oldb/calibration.hpp"
#include "oldb/config.hpp"
#include "oldb/report.hpp"

namespace oldb {

struct ExperimentOutcome {
  VerificationReport report;
  std::vector<std::string> artifacts;

  bool pass() const { return report.all_pass(); }
};

// writes CSV, report.json and (solver experiments) final checkpoints under c.output
ExperimentOutcome run_experiment(const ExperimentConfig& c, const Calibration& cal = kCalibration);

// exit status for a finished experiment: 0 pass, 1 check failure
int exit_status(const ExperimentOutcome& o);

SimState initial_state(const ExperimentConfig& c, std::uint64_t seed, const Params& p);

// ---- measurements shared with the calibration tool ----

struct LipschitzMeasurement {
  InitialNorms norms;
  double T = 0, nu = 1, a = 0, dt = 0;
  double nu_int_B1 = 0;  // nu int_0^T ||u||_{B^1_{inf,1}}
  double tau_Bp_T = 0;   // ||tau(T)||_{B^{2/p}_{p,1}}
  bool blew_up = false;
  RunResult run;
};

LipschitzMeasurement measure_lipschitz(const ExperimentConfig& c, std::uint64_t seed);
// smallest C with both Lipschitz bounds holding, by bisection on [1e-6, 1e3]
double lipschitz_required_C(const LipschitzMeasurement& m);

// ||tau(T)||_{B^0_{inf,1}} / ||tau0||_{B^0_{inf,1}} under the frozen drift (m sin y, 0), one entry per m
std::vector<double> shear_growth(const ExperimentConfig& c, std::uint64_t seed);
double transport_required_C(const ExperimentConfig& c, const std::vector<double>& growth);

struct LorentzMeasurement {
  double nu = 1, scale = 1, dt = 0;
  double u0 = 0, tau0 = 0;  // ||u0||_{L^{d,inf}}, ||tau0||_{L^{d/2,inf}}
  double sup_u = 0, sup_tau = 0;
  bool blew_up = false;
  RunResult run;
};

// data rescaled so that ||u0||_{L^{d,inf}} + ||tau0||_{L^{d/2,inf}} / nu = epsilon nu
LorentzMeasurement measure_lorentz(const ExperimentConfig& c, std::uint64_t seed);
double lorentz_required_C(const LorentzMeasurement& m);

// (sup_t ||u_L||_{B^{d/p-1}_{p,1}} + nu int ||u_L||_{B^{d/p+1}_{p,1}}) / ||u0||_{B^{d/p-1}_{p,1}}
double stokes_required_C(const ExperimentConfig& c, std::uint64_t seed);

// max over the corpus seeds .. seeds + count - 1 of each required C, times margin
Calibration calibrate(const ExperimentConfig& lipschitz, const ExperimentConfig& lorentz,
                      const ExperimentConfig& picard, std::uint64_t seed, int count, double margin);

// Gronwall extremal f = g1 + int g2 f + g3 int f^2 by RK4, stopped at the first non-finite value
struct GronwallCurve {
  std::vector<double> t, f;
};
GronwallCurve gronwall_extremal(const Polynomial& g1, const Polynomial& g2, const Polynomial& g3, double T,
                                int steps);

}  // namespace oldb
