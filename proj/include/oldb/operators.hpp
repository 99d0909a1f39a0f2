#pragma once

#include <limits>

#include "oldb/fft.hpp"

namespace oldb {

template <class S>
Spectrum<S> derivative(const Spectrum<S>& f, int axis) {
  const std::complex<S> I(0, 1);
  return Spectrum<S>(f.grid, f.c * (I * f.grid.dxi(axis).template cast<std::complex<S>>()));
}

template <class S>
Spectrum<S> multiply(const Spectrum<S>& f, const ArrayX<S>& m) {
  return Spectrum<S>(f.grid, f.c * m.template cast<std::complex<S>>());
}

// sum of |f|^2 over the torus, via Parseval
template <class S>
S l2_squared(const Spectrum<S>& f) {
  return f.grid.volume() * (f.grid.weight() * f.c.abs2()).sum();
}

template <class S>
S inner(const Spectrum<S>& f, const Spectrum<S>& g) {
  return f.grid.volume() * (f.grid.weight() * (f.c * g.c.conjugate()).real()).sum();
}

template <class S>
ArrayX<S> dealias_mask(const Grid<S>& g) {
  ArrayX<S> m = ArrayX<S>::Ones(g.spectral_size());
  const int cut = g.n() / 3;
  for (int a = 0; a < g.dim(); ++a)
    m = (g.k(a).abs() > cut).select(ArrayX<S>::Zero(m.size()), m);
  return m;
}

template <class S>
ArrayX<S> friedrichs_mask(const Grid<S>& g, int n) {
  if (n < 1) throw ConfigError("Friedrichs index must be >= 1");
  const S lo = S(1) / S(n), hi = S(n);
  const S eps = S(64) * std::numeric_limits<S>::epsilon();
  ArrayX<S> m(g.spectral_size());
  for (Index i = 0; i < m.size(); ++i) {
    const S r = std::sqrt(g.xi2()(i));
    m(i) = (r >= lo * (1 - eps) && r <= hi * (1 + eps)) ? S(1) : S(0);
  }
  return m;
}

template <class S>
void leray_in_place(std::vector<Spectrum<S>>& v) {
  const Grid<S>& g = v.front().grid;
  const int d = g.dim();
  ArrayX<S> q2 = ArrayX<S>::Zero(g.spectral_size());
  for (int a = 0; a < d; ++a) q2 += g.dxi(a).square();
  ArrayX<S> inv = (q2 > 0).select(q2.inverse(), ArrayX<S>::Zero(q2.size()));
  CArrayX<S> proj = CArrayX<S>::Zero(g.spectral_size());
  for (int a = 0; a < d; ++a) proj += v[a].c * g.dxi(a).template cast<std::complex<S>>();
  proj *= inv.template cast<std::complex<S>>();
  for (int a = 0; a < d; ++a) v[a].c -= proj * g.dxi(a).template cast<std::complex<S>>();
}

template <class S>
Spectrum<S> divergence(const std::vector<Spectrum<S>>& v) {
  Spectrum<S> out(v.front().grid);
  for (int a = 0; a < static_cast<int>(v.size()); ++a) out.c += derivative(v[a], a).c;
  return out;
}

// ---- real-space entry points ----

template <class S>
VectorField<S> gradient(const Field<S>& f) {
  const Spectrum<S> s = forward(f);
  VectorField<S> out;
  for (int a = 0; a < f.grid.dim(); ++a) out.c.push_back(inverse(derivative(s, a)));
  return out;
}

template <class S>
Field<S> divergence(const VectorField<S>& v) {
  return inverse(divergence(forward(v)));
}

template <class S>
Field<S> laplacian(const Field<S>& f) {
  return inverse(multiply(forward(f), ArrayX<S>(-f.grid.xi2())));
}

template <class S>
VectorField<S> leray_project(const VectorField<S>& v) {
  auto s = forward(v);
  leray_in_place(s);
  VectorField<S> out = inverse(s);
  out.divergence_free = true;
  return out;
}

template <class S>
Field<S> friedrichs_project(const Field<S>& f, int n) {
  return inverse(multiply(forward(f), friedrichs_mask(f.grid, n)));
}

template <class S>
Field<S> dealias(const Field<S>& f) {
  return inverse(multiply(forward(f), dealias_mask(f.grid)));
}

// (grad u)_{ij} = d_j u_i
template <class S>
TensorField<S> velocity_gradient(const VectorField<S>& u) {
  const Grid<S>& g = u.grid();
  TensorField<S> G(g);
  for (int i = 0; i < g.dim(); ++i) {
    const Spectrum<S> s = forward(u[i]);
    for (int j = 0; j < g.dim(); ++j) G(i, j) = inverse(derivative(s, j));
  }
  return G;
}

template <class S>
TensorField<S> vorticity_tensor(const VectorField<S>& u) {
  const TensorField<S> G = velocity_gradient(u);
  TensorField<S> w(u.grid());
  for (int i = 0; i < G.d; ++i)
    for (int j = 0; j < G.d; ++j) w(i, j).v = S(0.5) * (G(i, j).v - G(j, i).v);
  return w;
}

template <class S>
TensorField<S> deformation_tensor(const VectorField<S>& u) {
  const TensorField<S> G = velocity_gradient(u);
  TensorField<S> D(u.grid());
  for (int i = 0; i < G.d; ++i)
    for (int j = 0; j < G.d; ++j) D(i, j).v = S(0.5) * (G(i, j).v + G(j, i).v);
  D.symmetric = true;
  return D;
}

template <class S>
S lp_norm(const Field<S>& f, S p) {
  if (std::isinf(static_cast<double>(p))) return max_abs(f);
  if (!(p >= 1)) throw ConfigError("Lebesgue exponent must be >= 1");
  const S vol = f.grid.cell_volume();
  if (p == S(2)) return std::sqrt(f.v.square().sum() * vol);
  if (p == S(1)) return f.v.abs().sum() * vol;
  return std::pow(f.v.abs().pow(p).sum() * vol, S(1) / p);
}

template <class S>
S lp_norm(const VectorField<S>& u, S p) {
  return lp_norm(magnitude(u), p);
}

template <class S>
S lp_norm(const TensorField<S>& t, S p) {
  return lp_norm(frobenius(t), p);
}

}  // namespace oldb
