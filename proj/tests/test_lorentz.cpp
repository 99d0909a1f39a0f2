#include <doctest.h>

#include "support.hpp"

using namespace oldb;
using namespace oldb::test;

TEST_CASE("weak norm of simple functions") {
  ArrayXd v(4);
  v << 3, 1, 1, 1;
  CHECK(weak_lp_norm(v, 1.0, 2.0).value == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(weak_lp_norm(v, 1.0, 2.0).argmax_level == 3.0);
  CHECK(weak_lp_norm(v, 1.0, 1.0).value == doctest::Approx(4.0).epsilon(1e-15));

  const Gridd g(2, 32, 2 * kPi);
  Fieldd ind(g);
  for (Index i = 0; i < 100; ++i) ind.v(i * 7) = -2.5;
  const double m = 100 * g.cell_volume();
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    CHECK(weak_lp_norm(ind, p).value == doctest::Approx(2.5 * std::pow(m, 1 / p)).epsilon(1e-14));
    CHECK(weak_lp_norm(ind, p).value == doctest::Approx(lp_norm(ind, p)).epsilon(1e-13));
  }
  Fieldd c(g);
  c.v.setConstant(0.4);
  CHECK(weak_lp_norm(c, 3.0).value == doctest::Approx(0.4 * std::cbrt(g.volume())).epsilon(1e-14));
  Fieldd z(g);
  CHECK(weak_lp_norm(z, 2.0).value == 0.0);
  CHECK_THROWS_AS(weak_lp_norm(c, 0.5), ConfigError);
  CHECK_THROWS_AS(weak_lp_norm(c, std::numeric_limits<double>::infinity()), ConfigError);
}

TEST_CASE("weak norm inequalities") {
  const Gridd g(2, 64, 2 * kPi);
  for (int seed = 0; seed < 10; ++seed) {
    const Fieldd f = noise(g, 500 + seed), h = band_noise(g, 8, 600 + seed);
    for (double p : {1.0, 2.0, 3.0, 4.0}) {
      const double wf = weak_lp_norm(f, p).value, wh = weak_lp_norm(h, p).value;
      CHECK(wf <= lp_norm(f, p) * (1 + 1e-13));
      Fieldd sum(g), scaled(g);
      sum.v = f.v + h.v;
      CHECK(weak_lp_norm(sum, p).value <= 2 * (wf + wh));
      scaled.v = -3.7 * f.v;
      CHECK(weak_lp_norm(scaled, p).value == doctest::Approx(3.7 * wf).epsilon(1e-13));
      // L^{p,inf} -> L^r on a finite measure space, r < p
      if (p > 1) {
        const double r = 0.5 * (1 + p);
        const double C = std::pow(p / (p - r), 1 / r) * std::pow(g.volume(), 1 / r - 1 / p);
        CHECK(lp_norm(f, r) <= C * wf);
      }
    }
  }
  VectorFieldd u = band_vector(g, 8, 4);
  CHECK(weak_lp_norm(u, 2.0).value == doctest::Approx(weak_lp_norm(magnitude(u), 2.0).value));
}

TEST_CASE("weak norm of a critical power") {
  // |x|^{-2/p} in 2D has weak norm pi^{1/p}; clamped at radius 20h so lattice effects stay small
  const double p = 4.0;
  const Gridd g(2, 256, 2 * kPi);
  const double h = g.spacing();
  const Fieldd f = sample(g, [&](const Point<double>& x) {
    auto wrap = [](double a) { return a > kPi ? a - 2 * kPi : a; };
    const double dx = wrap(x[0]) - 0.5 * h, dy = wrap(x[1]) - 0.5 * h;
    return std::pow(std::max(dx * dx + dy * dy, 400 * h * h), -1 / p);
  });
  CHECK(weak_lp_norm(f, p).value == doctest::Approx(std::pow(kPi, 1 / p)).epsilon(0.05));
}

TEST_CASE("Lorentz splitting") {
  const Gridd g(2, 64, 2 * kPi);
  for (int seed = 0; seed < 5; ++seed) {
    Fieldd f = noise(g, 40 + seed);
    f.v = f.v.cube();
    for (double p : {1.5, 2.0, 4.0})
      for (double A : {0.1, 1.0, 10.0, 1000.0}) {
        const auto s = lorentz_split(f, A, p);
        CHECK(linf(s.low.v + s.high.v - f.v) <= 1e-13 * linf(f.v));
        CHECK(linf(s.high.v) <= s.linf_bound * (1 + 1e-15));
        CHECK(lp_norm(s.low, 1.0) <= s.l1_bound);
        CHECK(s.linf_bound == doctest::Approx(weak_lp_norm(f, p).value * std::pow(A, -1 / p)));
      }
  }
  Fieldd f = noise(g, 1);
  CHECK_THROWS_AS(lorentz_split(f, 0.0, 2.0), ConfigError);
  CHECK(std::isinf(lorentz_split(f, 1.0, 1.0).l1_bound));
}
