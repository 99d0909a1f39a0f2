#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "oldb/grid.hpp"

namespace oldb {

template <class S>
struct Field {
  Grid<S> grid;
  ArrayX<S> v;

  Field() = default;
  explicit Field(const Grid<S>& g) : grid(g), v(ArrayX<S>::Zero(g.size())) {}
  Field(const Grid<S>& g, ArrayX<S> values) : grid(g), v(std::move(values)) {}
};

// Half-spectrum coefficients, normalised so that f(x) = sum_k c_k e^{i xi.x}.
template <class S>
struct Spectrum {
  Grid<S> grid;
  CArrayX<S> c;

  Spectrum() = default;
  explicit Spectrum(const Grid<S>& g) : grid(g), c(CArrayX<S>::Zero(g.spectral_size())) {}
  Spectrum(const Grid<S>& g, CArrayX<S> coeffs) : grid(g), c(std::move(coeffs)) {}
};

template <class S>
struct VectorField {
  std::vector<Field<S>> c;
  bool divergence_free = false;

  VectorField() = default;
  explicit VectorField(const Grid<S>& g) : c(g.dim(), Field<S>(g)) {}
  const Grid<S>& grid() const { return c.front().grid; }
  int dim() const { return static_cast<int>(c.size()); }
  Field<S>& operator[](int i) { return c[i]; }
  const Field<S>& operator[](int i) const { return c[i]; }
};

template <class S>
struct TensorField {
  int d = 0;
  std::vector<Field<S>> e;  // row-major d x d
  bool symmetric = false;

  TensorField() = default;
  explicit TensorField(const Grid<S>& g) : d(g.dim()), e(g.dim() * g.dim(), Field<S>(g)) {}
  const Grid<S>& grid() const { return e.front().grid; }
  Field<S>& operator()(int i, int j) { return e[i * d + j]; }
  const Field<S>& operator()(int i, int j) const { return e[i * d + j]; }
};

template <class S>
using Point = std::array<S, 3>;

template <class S, class Fn>
Field<S> sample(const Grid<S>& g, Fn&& fn) {
  Field<S> f(g);
  int idx[3] = {0, 0, 0};
  for (Index m = 0; m < g.size(); ++m) {
    g.unravel(m, idx);
    Point<S> x{g.coord(idx[0]), g.coord(idx[1]), g.dim() == 3 ? g.coord(idx[2]) : S(0)};
    f.v(m) = fn(x);
  }
  return f;
}

template <class S>
Field<S> magnitude(const VectorField<S>& u) {
  Field<S> out(u.grid());
  for (const auto& c : u.c) out.v += c.v.square();
  out.v = out.v.sqrt();
  return out;
}

template <class S>
Field<S> frobenius(const TensorField<S>& t) {
  Field<S> out(t.grid());
  for (const auto& c : t.e) out.v += c.v.square();
  out.v = out.v.sqrt();
  return out;
}

template <class S>
S max_abs(const Field<S>& f) {
  return f.v.size() ? f.v.abs().maxCoeff() : S(0);
}

template <class S>
bool all_finite(const Field<S>& f) {
  return f.v.isFinite().all();
}

template <class S>
TensorField<S> symmetrize(const TensorField<S>& t) {
  TensorField<S> out = t;
  for (int i = 0; i < t.d; ++i)
    for (int j = i + 1; j < t.d; ++j) {
      ArrayX<S> m = S(0.5) * (t(i, j).v + t(j, i).v);
      out(i, j).v = m;
      out(j, i).v = m;
    }
  out.symmetric = true;
  return out;
}

template <class S>
S symmetry_defect(const TensorField<S>& t) {
  S worst = 0;
  for (int i = 0; i < t.d; ++i)
    for (int j = i + 1; j < t.d; ++j)
      worst = std::max(worst, (t(i, j).v - t(j, i).v).abs().maxCoeff());
  return worst;
}

}  // namespace oldb
