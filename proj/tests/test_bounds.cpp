#include <doctest.h>

#include <random>

#include "oldb/initial_data.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace oldb;
using namespace oldb::test;

namespace {

// second transcription, written from the definitions without the library helpers
struct Reference {
  double nu, a, mu, C;
  double A, B, UB, TB;

  double G(double T) const { return a == 0 ? std::sqrt(T) / std::sqrt(nu) : std::sqrt((1 - std::exp(-2 * a * T)) / (2 * a * nu)); }
  double Th(double T) const { return a == 0 ? T : (1 - std::exp(-a * T)) / a; }
  double Phi(double T) const {
    const double g = G(T);
    const double inner = mu == 0 ? A + A * A / nu + B * g + B * B * g * g / nu
                                 : (1 + g * std::sqrt(mu)) * A + A * A / nu + (1 / std::sqrt(mu) + g) * B + B * B * g * g / nu;
    return inner * inner;
  }
  double P1(double T) const { return C * (Phi(T) * Phi(T) / std::pow(nu, 1.5) + Phi(T) * A / std::pow(nu, 1.25)); }
  double P2(double T) const {
    return C * (G(T) * std::sqrt(mu * A * A + B * B) + Phi(T) / std::pow(nu, 1.25) + A / nu);
  }
  double U1(double T) const {
    const double head = (UB + P1(T) + C * (P2(T) + C) * TB * Th(T)) / nu;
    if (mu == 0) return head * std::exp(C * Th(T) * P2(T) / nu);
    const double x = C * P2(T) * Th(T) * TB / nu;
    const double y = 2 * C * mu * P2(T) * T / nu;
    return head / (1 - C * mu * T * T * P2(T) * std::exp(2 * x + y) / (nu * nu)) * std::exp(x + y);
  }
  double U2(double T) const {
    // composite Simpson in s = sqrt(t)
    const int m = 4000;
    const double S = std::sqrt(T);
    double I = 0;
    for (int i = 0; i <= m; ++i) {
      const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
      const double s = S * i / m;
      I += w * 2 * s * U1(s * s);
    }
    I *= S / (3.0 * m);
    return UB + P1(T) + C * (P2(T) + 1) * TB * T + C * nu * TB * (P2(T) + 1) * I + C * mu * nu * P2(T) * I;
  }
};

InitialNorms norms_of(const Reference& r) {
  InitialNorms n;
  n.u0_L2 = r.A;
  n.tau0_L2 = r.B;
  n.u0_Binf_m1 = r.UB;
  n.tau0_Binf_0 = r.TB;
  return n;
}

}  // namespace

TEST_CASE("Gamma and Theta_a") {
  CHECK(gamma_fn(0, 1, 4) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(gamma_fn(1e-9, 1.3, 2.0) - gamma_fn(0, 1.3, 2.0)) < 1e-8);
  CHECK(gamma_fn(1, 1, 1e3) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(theta_a(0, 2.5) == 2.5);
  CHECK(theta_a(1, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(theta_a(3, 0) == 0);
  CHECK(std::abs(theta_a(1e-9, 2.0) - 2.0) < 1e-8);
  CHECK_THROWS_AS(gamma_fn(-1, 1, 1), ConfigError);
  CHECK_THROWS_AS(theta_a(0, -1), ConfigError);
}

TEST_CASE("Phi and Psi spot values") {
  BoundParams bp;
  bp.nu = 1;
  bp.C = 8;
  InitialNorms n;
  n.u0_L2 = 1;
  n.tau0_L2 = 1;
  CHECK(phi(1, bp, n) == doctest::Approx(16.0).epsilon(1e-15));

  const InitialNorms zero;
  for (double mu : {0.0, 0.5}) {
    bp.mu = mu;
    CHECK(phi(2, bp, zero) == 0);
    CHECK(psi1(2, bp, zero) == 0);
    CHECK(psi2(2, bp, zero) == 0);
  }

  bp = BoundParams{0.7, 0.3, 0, 5};
  InitialNorms u_only;
  u_only.u0_L2 = 0.8;
  const double F = phi(1.5, bp, u_only);
  CHECK(psi2(1.5, bp, u_only) == doctest::Approx(5 * (std::pow(0.7, -1.25) * F + 0.8 / 0.7)).epsilon(1e-14));
}

TEST_CASE("second transcription agrees at random points") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.1, 1.0);
  for (int k = 0; k < 5; ++k) {
    for (bool with_mu : {false, true}) {
      Reference r{U(rng) + 0.5, k % 2 ? U(rng) : 0.0, with_mu ? 0.1 * U(rng) : 0.0, 1.0 + U(rng),
                  0.2 * U(rng), 0.2 * U(rng), 0.2 * U(rng), 0.2 * U(rng)};
      const BoundParams bp{r.nu, r.a, r.mu, r.C};
      const InitialNorms n = norms_of(r);
      const double T = 0.05 + 0.1 * U(rng);
      REQUIRE(T < lifespan_lower_bound(bp, n));
      CHECK(gamma_fn(r.a, r.nu, T) == doctest::Approx(r.G(T)).epsilon(1e-12));
      CHECK(theta_a(r.a, T) == doctest::Approx(r.Th(T)).epsilon(1e-12));
      CHECK(phi(T, bp, n) == doctest::Approx(r.Phi(T)).epsilon(1e-12));
      CHECK(psi1(T, bp, n) == doctest::Approx(r.P1(T)).epsilon(1e-12));
      CHECK(psi2(T, bp, n) == doctest::Approx(r.P2(T)).epsilon(1e-12));
      CHECK(upsilon1(T, bp, n) == doctest::Approx(r.U1(T)).epsilon(1e-12));
      CHECK(upsilon2(T, bp, n) == doctest::Approx(r.U2(T)).epsilon(1e-10));
    }
  }
}

TEST_CASE("Upsilon behaviour in T") {
  BoundParams bp{1.0, 0.5, 0.0, 2.0};
  InitialNorms n;
  n.u0_L2 = 0.3;
  n.tau0_L2 = 0.2;
  n.u0_Binf_m1 = 0.4;
  n.tau0_Binf_0 = 0.25;

  const double p1 = psi1(0, bp, n);
  CHECK(upsilon1(0, bp, n) == doctest::Approx((0.4 + p1) / 1.0).epsilon(1e-15));
  CHECK(upsilon2(0, bp, n) == doctest::Approx(0.4 + p1).epsilon(1e-15));

  double prev1 = 0, prev2 = 0;
  for (int i = 0; i <= 40; ++i) {
    const double T = 0.1 * i;
    const double u1 = upsilon1(T, bp, n), u2 = upsilon2(T, bp, n);
    CHECK(u1 >= prev1);
    CHECK(u2 >= prev2);
    prev1 = u1;
    prev2 = u2;
  }

  bp.mu = 0.5;
  const double Tl = lifespan_lower_bound(bp, n);
  REQUIRE(std::isfinite(Tl));
  CHECK(lifespan_functional(Tl, bp, n) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(upsilon1(Tl * (1 - 1e-6), bp, n) > 1e3 * upsilon1(0.5 * Tl, bp, n));
  CHECK_THROWS_AS(upsilon1(Tl * 1.01, bp, n), BeyondLifespan);
  const BoundEvaluation e = evaluate_bounds(2 * Tl, bp, n);
  CHECK(std::isinf(e.upsilon1));
  CHECK(e.t_max_lower == Tl);
}

TEST_CASE("lifespan lower bound") {
  InitialNorms n;
  n.u0_L2 = 0.5;
  n.tau0_L2 = 0.5;
  n.u0_Binf_m1 = 0.3;
  n.tau0_Binf_0 = 0.4;
  BoundParams bp{1.0, 0.0, 0.0, 2.0};
  CHECK(std::isinf(lifespan_lower_bound(bp, n)));
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : {0.125, 0.25, 0.5, 1.0, 2.0}) {
    bp.mu = mu;
    const double T = lifespan_lower_bound(bp, n);
    CHECK(T < prev);
    prev = T;
  }
  bp.mu = 0.5;
  double last = 0;
  for (double s : {1.0, 0.1, 0.01, 0.001}) {
    InitialNorms m = n;
    m.u0_L2 *= s;
    m.tau0_L2 *= s;
    m.u0_Binf_m1 *= s;
    m.tau0_Binf_0 *= s;
    const double T = lifespan_lower_bound(bp, m);
    CHECK(T > last);
    last = T;
  }
  CHECK(last > 10);
  CHECK(std::isinf(lifespan_lower_bound(bp, InitialNorms{})));
}

TEST_CASE("Theta_nu") {
  CHECK(theta_nu(0.7, 0, 2, 5, 3) == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(theta_nu(0.7, 0.9, 2, 0, 3) == doctest::Approx(2.1).epsilon(1e-15));
  const double e = std::exp(1.0);
  CHECK(theta_nu(1, 1, 1, 1, 1) == doctest::Approx(e + e - 1).epsilon(1e-15));
  CHECK_THROWS_AS(theta_nu(-1, 0, 1, 1, 1), ConfigError);
}

TEST_CASE("Gauss-Legendre rule") {
  const GaussLegendre& q = gauss_legendre_128();
  double sw = 0;
  for (double w : q.w) sw += w;
  CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q.integrate([](double x) { return std::pow(x, 200); }, -1, 1) == doctest::Approx(2.0 / 201).epsilon(1e-13));
  CHECK(q.integrate([](double x) { return std::exp(x); }, 0, 3) == doctest::Approx(std::exp(3.0) - 1).epsilon(1e-14));
  CHECK(poly_integral({1, 2, 3}, 2.0) == doctest::Approx(2 + 4 + 8).epsilon(1e-15));
  CHECK(poly_eval({1, 2, 3}, 2.0) == 17);
}

TEST_CASE("Gronwall lifespan lemma") {
  SUBCASE("classical Gronwall when g3 vanishes") {
    const Polynomial g1{0.5, 1}, g2{0.3, 0.2};
    const auto r = gronwall_lifespan(g1, g2, {0, 0}, {0, 0.5, 1, 4});
    CHECK(std::isinf(r.T_max));
    for (size_t i = 0; i < r.times.size(); ++i) {
      const double t = r.times[i];
      CHECK(r.bound[i] == doctest::Approx((0.5 + t) * std::exp(0.3 * t + 0.1 * t * t)).epsilon(1e-14));
    }
  }
  SUBCASE("constant g3") {
    for (double c : {0.1, 1.0, 2.0, 50.0}) {
      const auto r = gronwall_lifespan({0, 1}, {}, {c}, {});
      CHECK(std::abs(r.T_max - std::sqrt(2 / c)) < 1e-8 * std::sqrt(2 / c));
      CHECK(gronwall_denominator_integral({}, {c}, 0.3) == doctest::Approx(c * 0.045).epsilon(1e-14));
    }
  }
  SUBCASE("extremal ODE stays below the curve for unit-scale coefficients") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 10; ++k) {
      const Polynomial g1{0, U(rng), U(rng)}, g2{U(rng), U(rng)}, g3{U(rng), U(rng), U(rng)};
      const auto r = gronwall_lifespan(g1, g2, g3, {});
      REQUIRE(std::isfinite(r.T_max));
      const auto ode = gronwall_extremal(g1, g2, g3, 0.99 * r.T_max, 4000);
      REQUIRE(ode.t.size() == 4001);
      const auto b = gronwall_lifespan(g1, g2, g3, ode.t);
      for (size_t i = 0; i < ode.t.size(); ++i) CHECK(ode.f[i] <= b.bound[i] * (1 + 1e-9) + 1e-15);
    }
  }
  SUBCASE("the curve is not universal: a large g1 outruns it") {
    const Polynomial g1{0, 3}, g3{1};
    const auto r = gronwall_lifespan(g1, {}, g3, {});
    const auto ode = gronwall_extremal(g1, {}, g3, 0.99 * r.T_max, 4000);
    CHECK(ode.t.back() < 0.99 * r.T_max);
  }
  CHECK_THROWS_AS(gronwall_lifespan({-1}, {}, {1}, {}), ConfigError);
}

TEST_CASE("initial norms from fields") {
  const Gridd g(2, 32, 2 * kPi);
  Params p;
  InitialDataSpec spec;
  spec.seed = 4;
  spec.amplitude = 0.3;
  spec.tau_amplitude = 0.2;
  const SimState s = make_initial(g, p, spec);
  const InitialNorms n = initial_norms(s);
  double usq = 0;
  for (const auto& c : s.u.c) usq += lp_norm(c, 2.0) * lp_norm(c, 2.0);
  CHECK(n.u0_L2 == doctest::Approx(std::sqrt(usq)).epsilon(1e-12));
  CHECK(n.tau0_L2 == doctest::Approx(lp_norm(s.tau, 2.0)).epsilon(1e-12));
  const Partitiond P = build_partition(g);
  CHECK(n.u0_Bp == doctest::Approx(besov_norm(s.u, BesovParamsd{0, 2, 1}, P).value).epsilon(1e-12));
  CHECK(n.tau0_Bp == doctest::Approx(besov_norm(s.tau, BesovParamsd{1, 2, 1}, P).value).epsilon(1e-12));
  CHECK(n.u0_Binf_m1 == doctest::Approx(besov_norm(s.u, BesovParamsd{-1, std::numeric_limits<double>::infinity(), 1}, P).value).epsilon(1e-12));
  CHECK(n.u0_weak_d > 0);
  CHECK(n.tau0_weak_d2 > 0);
}
