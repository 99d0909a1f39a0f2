#include "oldb/bounds.hpp"

#include <numbers>

namespace oldb {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

void check_params(const BoundParams& bp) {
  if (!(bp.nu > 0)) throw ConfigError("bounds need nu > 0");
  if (!(bp.a >= 0)) throw ConfigError("bounds need a >= 0");
  if (!(bp.mu >= 0)) throw ConfigError("bounds need mu >= 0");
  if (!(bp.C > 0)) throw ConfigError("bounds need C > 0");
}

void check_time(double T) {
  if (!(T >= 0)) throw ConfigError("bounds need T >= 0");
}

double lifespan_exponent(double T, double p2, const BoundParams& bp, const InitialNorms& n) {
  return 2 * bp.C / bp.nu * p2 * theta_a(bp.a, T) * n.tau0_Binf_0 + 2 * bp.C * bp.mu / bp.nu * p2 * T;
}

}  // namespace

void InitialNorms::validate() const {
  for (double v : {u0_L2, tau0_L2, u0_Binf_m1, tau0_Binf_0, u0_Bp, tau0_Bp, u0_weak_d, tau0_weak_d2})
    if (!(v >= 0)) throw ConfigError("initial norms must be finite and >= 0");
}

InitialNorms initial_norms(const SimState& s, double p) {
  const Gridd& g = s.grid();
  const int d = g.dim();
  const Partitiond P = build_partition(g);
  const SpectralState y = to_spectral(s);
  const Sample m = measure(y, P, p, s.t);
  InitialNorms n;
  n.u0_L2 = std::sqrt(m.u_L2_sq);
  n.tau0_L2 = m.tau_L2;
  n.u0_Binf_m1 = m.u_B_inf1_m1;
  n.tau0_Binf_0 = m.tau_B_inf1_0;
  n.tau0_Bp = m.tau_B_p1_dp;
  n.u0_Bp = besov_from_blocks<double>(block_norms(y.u, P, {p}).col(0).array(), P.q_min, d / p - 1, 1.0);
  n.u0_weak_d = m.u_weak_d;
  n.tau0_weak_d2 = m.tau_weak_d2;
  return n;
}

double gamma_fn(double a, double nu, double T) {
  if (!(nu > 0) || !(a >= 0)) throw ConfigError("gamma needs nu > 0 and a >= 0");
  check_time(T);
  if (a > 0) return std::sqrt(-std::expm1(-2 * a * T) / (2 * a * nu));
  return std::sqrt(T / nu);
}

double theta_a(double a, double T) {
  if (!(a >= 0)) throw ConfigError("theta_a needs a >= 0");
  check_time(T);
  if (a > 0) return -std::expm1(-a * T) / a;
  return T;
}

double phi(double T, const BoundParams& bp, const InitialNorms& n) {
  check_params(bp);
  n.validate();
  const double G = gamma_fn(bp.a, bp.nu, T);
  const double A = n.u0_L2, B = n.tau0_L2;
  double s;
  if (bp.mu == 0)
    s = A + A * A / bp.nu + B * G + B * B * G * G / bp.nu;
  else
    s = (1 + G * std::sqrt(bp.mu)) * A + A * A / bp.nu + (1 / std::sqrt(bp.mu) + G) * B + B * B * G * G / bp.nu;
  return s * s;
}

double psi1(double T, const BoundParams& bp, const InitialNorms& n) {
  const double F = phi(T, bp, n);
  return bp.C * (std::pow(bp.nu, -1.5) * F * F + std::pow(bp.nu, -1.25) * F * n.u0_L2);
}

double psi2(double T, const BoundParams& bp, const InitialNorms& n) {
  const double F = phi(T, bp, n);
  const double G = gamma_fn(bp.a, bp.nu, T);
  return bp.C * (G * std::sqrt(bp.mu * n.u0_L2 * n.u0_L2 + n.tau0_L2 * n.tau0_L2) + std::pow(bp.nu, -1.25) * F +
                 n.u0_L2 / bp.nu);
}

double lifespan_functional(double T, const BoundParams& bp, const InitialNorms& n) {
  if (bp.mu == 0) {
    check_params(bp);
    return 0;
  }
  const double p2 = psi2(T, bp, n);
  return bp.C * bp.mu / (bp.nu * bp.nu) * T * T * p2 * std::exp(lifespan_exponent(T, p2, bp, n));
}

double upsilon1(double T, const BoundParams& bp, const InitialNorms& n) {
  const double p1 = psi1(T, bp, n), p2 = psi2(T, bp, n);
  const double th = theta_a(bp.a, T);
  const double num = (n.u0_Binf_m1 + p1 + bp.C * (p2 + bp.C) * n.tau0_Binf_0 * th) / bp.nu;
  if (bp.mu == 0) return num * std::exp(bp.C / bp.nu * th * p2);
  const double den = 1 - lifespan_functional(T, bp, n);
  if (!(den > 0)) throw BeyondLifespan("T beyond the lifespan lower bound: Upsilon1 denominator <= 0");
  const double e = bp.C / bp.nu * p2 * th * n.tau0_Binf_0 + 2 * bp.C * bp.mu / bp.nu * p2 * T;
  return num / den * std::exp(e);
}

double upsilon2(double T, const BoundParams& bp, const InitialNorms& n) {
  const double p1 = psi1(T, bp, n), p2 = psi2(T, bp, n);
  // t = s^2 removes the sqrt(t) behaviour of Gamma at the origin
  const double I =
      T > 0 ? gauss_legendre_128().integrate([&](double s) { return 2 * s * upsilon1(s * s, bp, n); }, 0.0, std::sqrt(T))
            : 0.0;
  return n.u0_Binf_m1 + p1 + bp.C * (p2 + 1) * n.tau0_Binf_0 * T + bp.C * bp.nu * n.tau0_Binf_0 * (p2 + 1) * I +
         bp.C * bp.mu * bp.nu * p2 * I;
}

double tau_besov_bound(double T, const BoundParams& bp, const InitialNorms& n) {
  return n.tau0_Bp * std::exp(bp.C / bp.nu * upsilon1(T, bp, n));
}

double theta_nu(double u0_Binf_m1, double tau0_Binf_0, double nu, double T, double C) {
  if (!(u0_Binf_m1 >= 0) || !(tau0_Binf_0 >= 0) || !(nu > 0) || !(T >= 0) || !(C > 0))
    throw ConfigError("theta_nu needs non-negative inputs and nu, C > 0");
  const double e = std::exp(C * T / nu * tau0_Binf_0);
  return C * u0_Binf_m1 * e + nu * (e - 1);
}

double lifespan_lower_bound(const BoundParams& bp, const InitialNorms& n) {
  check_params(bp);
  n.validate();
  if (bp.mu == 0) return kInf;
  double lo = 0, hi = 1;
  while (lifespan_functional(hi, bp, n) < 1) {
    lo = hi;
    hi *= 2;
    if (hi > 1e15) return kInf;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (lifespan_functional(mid, bp, n) < 1 ? lo : hi) = mid;
  }
  return lo;
}

GaussLegendre::GaussLegendre(int n) : x(n), w(n) {
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

const GaussLegendre& gauss_legendre_128() {
  static const GaussLegendre rule(128);
  return rule;
}

double poly_eval(const Polynomial& p, double t) {
  double s = 0;
  for (size_t i = p.size(); i-- > 0;) s = s * t + p[i];
  return s;
}

double poly_integral(const Polynomial& p, double t) {
  double s = 0;
  for (size_t i = p.size(); i-- > 0;) s = s * t + p[i] / double(i + 1);
  return s * t;
}

double gronwall_denominator_integral(const Polynomial& g2, const Polynomial& g3, double T) {
  check_time(T);
  if (T == 0) return 0;
  const int panels = 16;
  const double h = T / panels;
  double s = 0;
  for (int k = 0; k < panels; ++k)
    s += gauss_legendre_128().integrate(
        [&](double t) { return t * poly_eval(g3, t) * std::exp(2 * poly_integral(g2, t)); }, k * h, (k + 1) * h);
  return s;
}

GronwallResult gronwall_lifespan(const Polynomial& g1, const Polynomial& g2, const Polynomial& g3,
                                 const std::vector<double>& times) {
  for (const auto* g : {&g1, &g2, &g3})
    for (double c : *g)
      if (!(c >= 0)) throw ConfigError("Gronwall polynomials need non-negative coefficients");
  GronwallResult r;
  const bool trivial = std::all_of(g3.begin(), g3.end(), [](double c) { return c == 0; });
  if (!trivial) {
    double lo = 0, hi = 1;
    while (gronwall_denominator_integral(g2, g3, hi) < 1) {
      lo = hi;
      hi *= 2;
      if (hi > 1e8) {
        lo = kInf;
        break;
      }
    }
    if (std::isfinite(lo)) {
      while (hi - lo > 1e-14 * hi) {
        const double mid = 0.5 * (lo + hi);
        (gronwall_denominator_integral(g2, g3, mid) < 1 ? lo : hi) = mid;
      }
      r.T_max = 0.5 * (lo + hi);
    }
  }
  for (double t : times) {
    check_time(t);
    r.times.push_back(t);
    if (t >= r.T_max) {
      r.bound.push_back(kInf);
      continue;
    }
    const double K = trivial ? 0.0 : gronwall_denominator_integral(g2, g3, t);
    r.bound.push_back(K < 1 ? poly_eval(g1, t) / (1 - K) * std::exp(poly_integral(g2, t)) : kInf);
  }
  return r;
}

BoundEvaluation evaluate_bounds(double T, const BoundParams& bp, const InitialNorms& n) {
  BoundEvaluation e;
  e.T = T;
  e.C = bp.C;
  e.gamma = gamma_fn(bp.a, bp.nu, T);
  e.theta_a = theta_a(bp.a, T);
  e.phi = phi(T, bp, n);
  e.psi1 = psi1(T, bp, n);
  e.psi2 = psi2(T, bp, n);
  e.t_max_lower = lifespan_lower_bound(bp, n);
  if (T < e.t_max_lower) {
    e.upsilon1 = upsilon1(T, bp, n);
    e.upsilon2 = upsilon2(T, bp, n);
  } else {
    e.upsilon1 = e.upsilon2 = kInf;
  }
  e.theta_nu = theta_nu(n.u0_Binf_m1, n.tau0_Binf_0, bp.nu, T, bp.C);
  return e;
}

}  // namespace oldb
