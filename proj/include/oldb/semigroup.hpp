#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "oldb/littlewood_paley.hpp"

namespace oldb {

template <class S>
ArrayX<S> heat_multiplier(const Grid<S>& g, S t, S nu) {
  if (t < 0) throw ConfigError("heat propagation needs t >= 0");
  if (!(nu > 0)) throw ConfigError("viscosity must be positive");
  return (-nu * t * g.xi2()).exp();
}

template <class S>
Spectrum<S> heat_propagate(const Spectrum<S>& f, S t, S nu) {
  return multiply(f, heat_multiplier(f.grid, t, nu));
}

template <class S>
Field<S> heat_propagate(const Field<S>& f, S t, S nu) {
  return inverse(heat_propagate(forward(f), t, nu));
}

template <class S>
VectorField<S> heat_propagate(const VectorField<S>& u, S t, S nu) {
  VectorField<S> out;
  for (const auto& c : u.c) out.c.push_back(heat_propagate(c, t, nu));
  out.divergence_free = u.divergence_free;
  return out;
}

template <class S>
using VectorSpectrum = std::vector<Spectrum<S>>;

template <class S>
struct DuhamelTrajectory {
  std::vector<S> times;
  std::vector<VectorSpectrum<S>> states;    // spectral, to avoid round trips
  std::vector<VectorSpectrum<S>> forcing;   // P f at the nodes

  VectorField<S> state(size_t i) const {
    VectorField<S> u = inverse(states[i]);
    u.divergence_free = true;
    return u;
  }
};

template <class S>
S divergence_ratio(const VectorSpectrum<S>& v) {
  const S dv = l2_squared(divergence(v));
  S gv = 0;
  for (size_t a = 0; a < v.size(); ++a)
    for (size_t b = 0; b < v.size(); ++b) gv += l2_squared(derivative(v[a], static_cast<int>(b)));
  return gv > 0 ? std::sqrt(dv / gv) : S(0);
}

// u(t) = e^{nu t Lap} u0 + int_0^t e^{nu(t-s)Lap} P f(s) ds, exact propagation between nodes,
// trapezoid in s.
template <class S>
DuhamelTrajectory<S> stokes_mild_solve(const VectorSpectrum<S>& u0,
                                       const std::function<VectorSpectrum<S>(size_t, S)>& forcing,
                                       S nu, const std::vector<S>& times) {
  if (times.empty()) throw RangeError("stokes_mild_solve needs at least one node");
  if (divergence_ratio(u0) > S(1e-10)) throw ConfigError("initial velocity is not divergence free");
  DuhamelTrajectory<S> tr;
  tr.times = times;
  auto projected = [&](size_t k) {
    VectorSpectrum<S> f = forcing(k, times[k]);
    leray_in_place(f);
    return f;
  };
  tr.states.push_back(u0);
  tr.forcing.push_back(projected(0));
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    const S h = times[k + 1] - times[k];
    if (!(h > 0)) throw RangeError("stokes_mild_solve: times must increase");
    const ArrayX<S> E = heat_multiplier(u0.front().grid, h, nu);
    const auto Ec = E.template cast<std::complex<S>>();
    tr.forcing.push_back(projected(k + 1));
    VectorSpectrum<S> next = tr.states[k];
    for (size_t a = 0; a < next.size(); ++a)
      next[a].c = Ec * (tr.states[k][a].c + S(0.5) * h * tr.forcing[k][a].c) +
                  S(0.5) * h * tr.forcing[k + 1][a].c;
    tr.states.push_back(std::move(next));
  }
  return tr;
}

template <class S>
DuhamelTrajectory<S> stokes_mild_solve(const VectorField<S>& u0,
                                       const std::function<VectorField<S>(S)>& forcing, S nu,
                                       const std::vector<S>& times) {
  return stokes_mild_solve<S>(
      forward(u0), [&](size_t, S t) { return forward(forcing(t)); }, nu, times);
}

// ---- kernel bound measurements ----

template <class S>
struct DecayFit {
  S c = 0;  // rate in exp(-c nu t 4^q)
  S C = 0;  // smallest prefactor making the envelope hold at every sample
};

// least-squares slope of log(ratio) against s = nu t 4^q over s >= tail_from * max s, then the
// tightest prefactor over all samples. A block mixes several rates; the tail isolates the slowest one.
template <class S>
DecayFit<S> fit_decay(const std::vector<S>& s, const std::vector<S>& ratio, S tail_from = 0) {
  S sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  const S cut = tail_from * (s.empty() ? S(0) : *std::max_element(s.begin(), s.end()));
  for (size_t i = 0; i < s.size(); ++i) {
    if (!(ratio[i] > 0) || s[i] < cut) continue;
    const S y = std::log(ratio[i]);
    sx += s[i];
    sy += y;
    sxx += s[i] * s[i];
    sxy += s[i] * y;
    ++n;
  }
  DecayFit<S> f;
  const S den = n * sxx - sx * sx;
  f.c = den > 0 ? -(n * sxy - sx * sy) / den : S(0);
  for (size_t i = 0; i < s.size(); ++i) f.C = std::max(f.C, ratio[i] * std::exp(f.c * s[i]));
  return f;
}

template <class S>
Field<S> random_block(const DyadicPartition<S>& P, int q, std::mt19937_64& rng) {
  std::normal_distribution<S> nd(0, 1);
  Field<S> w(P.grid);
  for (Index i = 0; i < w.v.size(); ++i) w.v(i) = nd(rng);
  return inverse(multiply(forward(w), P.block(q)));
}

// ||e^{nu t Lap} D_q f||_p / ||D_q f||_p on random blocks, fitted per block index
template <class S>
DecayFit<S> measure_block_decay(const DyadicPartition<S>& P, int q, S p, S nu, int samples,
                                std::uint64_t seed, S s_max = S(4), int n_t = 17, S tail_from = S(2) / S(3)) {
  std::mt19937_64 rng(seed);
  std::vector<S> s, ratio;
  const S scale = std::ldexp(S(1), 2 * q);
  for (int k = 0; k < samples; ++k) {
    const Field<S> b = random_block(P, q, rng);
    const Spectrum<S> bs = forward(b);
    const S n0 = lp_norm(b, p);
    for (int i = 0; i < n_t; ++i) {
      const S si = s_max * S(i) / S(n_t - 1);
      const S t = si / (nu * scale);
      s.push_back(si);
      ratio.push_back(lp_norm(inverse(heat_propagate(bs, t, nu)), p) / n0);
    }
  }
  return fit_decay(s, ratio, tail_from);
}

template <class S>
struct KernelBoundFit {
  std::vector<S> taus, scaled;  // measured norm * tau^{exponent}
  S constant = 0, lo = 0;
  S exponent = 0;
  bool stable(S tol = S(0.2)) const { return lo >= (1 - tol) * constant; }
};

// Probe corpus: plane waves along axes and diagonals, random dyadic blocks, point masses.
template <class S>
std::vector<Field<S>> kernel_probe_corpus(const DyadicPartition<S>& P, std::uint64_t seed, int per_block = 2) {
  const Grid<S>& g = P.grid;
  std::vector<Field<S>> out;
  const int kmax = g.n() / 3;
  for (int k = 1; k <= kmax; ++k) {
    const S w = g.base_wavenumber() * S(k);
    out.push_back(sample(g, [&](const Point<S>& x) { return std::cos(w * x[0]); }));
    out.push_back(sample(g, [&](const Point<S>& x) { return std::cos(w * (x[0] + x[1])); }));
  }
  std::mt19937_64 rng(seed);
  for (int q = P.q_min; q <= P.q_max; ++q)
    for (int i = 0; i < per_block; ++i) out.push_back(random_block(P, q, rng));
  Field<S> delta(g);
  delta.v(0) = S(1) / g.cell_volume();
  out.push_back(delta);
  return out;
}

template <class S>
KernelBoundFit<S> verify_grad_kernel_bound(const DyadicPartition<S>& P, S p, S q, const std::vector<S>& taus,
                                           std::uint64_t seed = 7) {
  if (q < p) throw ConfigError("kernel bound needs q >= p");
  const int d = P.grid.dim();
  auto inv = [](S x) { return std::isinf(static_cast<double>(x)) ? S(0) : S(1) / x; };
  KernelBoundFit<S> fit;
  fit.exponent = S(d) / S(2) * (inv(p) - inv(q)) + S(0.5);
  const auto corpus = kernel_probe_corpus(P, seed);
  std::vector<Spectrum<S>> spectra;
  std::vector<S> norms;
  for (const auto& f : corpus) {
    spectra.push_back(forward(f));
    norms.push_back(lp_norm(f, p));
  }
  fit.lo = std::numeric_limits<S>::infinity();
  for (S tau : taus) {
    if (!(tau > 0)) throw ConfigError("kernel bound needs positive tau");
    S best = 0;
    for (size_t i = 0; i < spectra.size(); ++i) {
      const Spectrum<S> h = heat_propagate(spectra[i], tau, S(1));
      VectorField<S> grad;
      for (int a = 0; a < d; ++a) grad.c.push_back(inverse(derivative(h, a)));
      best = std::max(best, lp_norm(grad, q) / norms[i]);
    }
    const S v = best * std::pow(tau, fit.exponent);
    fit.taus.push_back(tau);
    fit.scaled.push_back(v);
    fit.constant = std::max(fit.constant, v);
    fit.lo = std::min(fit.lo, v);
  }
  return fit;
}

}  // namespace oldb
