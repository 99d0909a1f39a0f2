#pragma once

#include <limits>
#include <vector>

#include "oldb/solver.hpp"

namespace oldb {

struct InitialNorms {
  double u0_L2 = 0, tau0_L2 = 0;
  double u0_Binf_m1 = 0;   // ||u0||_{B^{-1}_{inf,1}}
  double tau0_Binf_0 = 0;  // ||tau0||_{B^0_{inf,1}}
  double u0_Bp = 0;        // ||u0||_{B^{d/p-1}_{p,1}}
  double tau0_Bp = 0;      // ||tau0||_{B^{d/p}_{p,1}}
  double u0_weak_d = 0, tau0_weak_d2 = 0;

  void validate() const;
};

InitialNorms initial_norms(const SimState& s, double p = 2);

struct BoundParams {
  double nu = 1, a = 0, mu = 0;
  double C = 8;
};

struct BeyondLifespan : RangeError {
  using RangeError::RangeError;
};

double gamma_fn(double a, double nu, double T);
double theta_a(double a, double T);
double phi(double T, const BoundParams& bp, const InitialNorms& n);
double psi1(double T, const BoundParams& bp, const InitialNorms& n);
double psi2(double T, const BoundParams& bp, const InitialNorms& n);

// mu > 0: C mu/nu^2 T^2 Psi2 exp{2C/nu Psi2 Theta_a ||tau0||_{B^0} + 2C mu/nu Psi2 T}; zero when mu = 0
double lifespan_functional(double T, const BoundParams& bp, const InitialNorms& n);

double upsilon1(double T, const BoundParams& bp, const InitialNorms& n);
double upsilon2(double T, const BoundParams& bp, const InitialNorms& n);

// ||tau(T)||_{B^{2/p}_{p,1}} <= ||tau0||_{B^{2/p}_{p,1}} exp{C/nu Upsilon1(T)}
double tau_besov_bound(double T, const BoundParams& bp, const InitialNorms& n);

double theta_nu(double u0_Binf_m1, double tau0_Binf_0, double nu, double T, double C);

// +inf when mu = 0 or when the condition holds up to 1e15
double lifespan_lower_bound(const BoundParams& bp, const InitialNorms& n);

// 128-node Gauss-Legendre rule on [-1, 1]
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n = 128);
  template <class F>
  double integrate(F&& f, double lo, double hi) const {
    const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * f(c + h * x[i]);
    return h * s;
  }
};
const GaussLegendre& gauss_legendre_128();

// ascending coefficients
using Polynomial = std::vector<double>;
double poly_eval(const Polynomial& p, double t);
double poly_integral(const Polynomial& p, double t);  // int_0^t

struct GronwallResult {
  double T_max = std::numeric_limits<double>::infinity();
  std::vector<double> times, bound;
};

// f <= g1 + int g2 f + g3 int f^2:
// T_max = sup{T : int_0^T t g3 exp{2 int g2} < 1}, f <= g1/(1 - K(t)) exp{int_0^t g2}
double gronwall_denominator_integral(const Polynomial& g2, const Polynomial& g3, double T);
GronwallResult gronwall_lifespan(const Polynomial& g1, const Polynomial& g2, const Polynomial& g3,
                                 const std::vector<double>& times);

struct BoundEvaluation {
  double T = 0, C = 0;
  double gamma = 0, theta_a = 0, phi = 0, psi1 = 0, psi2 = 0;
  double upsilon1 = 0, upsilon2 = 0, theta_nu = 0, t_max_lower = 0;
};

BoundEvaluation evaluate_bounds(double T, const BoundParams& bp, const InitialNorms& n);

}  // namespace oldb
