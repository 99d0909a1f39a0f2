#pragma once

#include <numbers>
#include <random>

#include "oldb/types.hpp"

namespace oldb::test {

inline constexpr double kPi = std::numbers::pi;

inline Fieldd noise(const Gridd& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0, 1);
  Fieldd f(g);
  for (Index i = 0; i < f.v.size(); ++i) f.v(i) = nd(rng);
  return f;
}

// white noise restricted to modes 0 < |xi| <= kmax (radial), mean zero
inline Fieldd band_noise(const Gridd& g, double kmax, std::uint64_t seed, double kmin = 0) {
  Spectrumd s = forward(noise(g, seed));
  for (Index i = 0; i < s.c.size(); ++i) {
    const double r = std::sqrt(g.xi2()(i));
    if (r == 0 || r > kmax || r < kmin) s.c(i) = 0;
  }
  return inverse(s);
}

inline VectorFieldd band_vector(const Gridd& g, double kmax, std::uint64_t seed, bool project = true) {
  VectorFieldd u;
  for (int a = 0; a < g.dim(); ++a) u.c.push_back(band_noise(g, kmax, seed * 31 + a));
  return project ? leray_project(u) : u;
}

inline TensorFieldd band_tensor(const Gridd& g, double kmax, std::uint64_t seed) {
  TensorFieldd t(g);
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) t(i, j) = band_noise(g, kmax, seed * 131 + i * 7 + j);
  return symmetrize(t);
}

inline double rel_l2(const ArrayXd& a, const ArrayXd& b) {
  const double n = b.matrix().norm();
  return (a - b).matrix().norm() / (n > 0 ? n : 1.0);
}

inline double linf(const ArrayXd& a) { return a.abs().maxCoeff(); }

}  // namespace oldb::test
