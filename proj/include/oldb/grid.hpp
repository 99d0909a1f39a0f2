#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "oldb/errors.hpp"

namespace oldb {

using Index = Eigen::Index;

template <class S>
using ArrayX = Eigen::Array<S, Eigen::Dynamic, 1>;

template <class S>
using CArrayX = Eigen::Array<std::complex<S>, Eigen::Dynamic, 1>;

// Periodic box [0,L)^d sampled on N points per axis, last axis fastest.
// Spectral storage keeps the last axis halved (N/2+1 entries).
template <class S>
class Grid {
  struct Tables {
    int d = 0, N = 0;
    S L = 0;
    Index size = 0, spec_size = 0;
    std::vector<ArrayX<S>> xi;    // signed wavenumber per axis, Nyquist as -N/2
    std::vector<ArrayX<S>> dxi;   // same with Nyquist zeroed (odd derivatives)
    std::vector<Eigen::Array<int, Eigen::Dynamic, 1>> k;
    ArrayX<S> xi2;
    ArrayX<S> weight;             // Parseval multiplicity of the half spectrum
  };
  std::shared_ptr<const Tables> t_;

 public:
  Grid() = default;
  Grid(int d, int N, S L) {
    if (d != 2 && d != 3) throw ConfigError("dimension must be 2 or 3, got " + std::to_string(d));
    if (N < 8 || (N & (N - 1)) != 0)
      throw ConfigError("N must be a power of two >= 8, got " + std::to_string(N));
    if (!(L > 0) || !std::isfinite(static_cast<double>(L))) throw ConfigError("box length must be positive");
    auto t = std::make_shared<Tables>();
    t->d = d;
    t->N = N;
    t->L = L;
    const int nh = N / 2 + 1;
    t->size = 1;
    for (int i = 0; i < d; ++i) t->size *= N;
    t->spec_size = t->size / N * nh;
    const S base = S(2) * std::numbers::pi_v<S> / L;
    t->xi.assign(d, ArrayX<S>(t->spec_size));
    t->dxi.assign(d, ArrayX<S>(t->spec_size));
    t->k.assign(d, Eigen::Array<int, Eigen::Dynamic, 1>(t->spec_size));
    t->xi2.resize(t->spec_size);
    t->weight.resize(t->spec_size);
    std::vector<int> ext(d, N);
    ext[d - 1] = nh;
    std::vector<int> idx(d, 0);
    for (Index m = 0; m < t->spec_size; ++m) {
      Index r = m;
      for (int a = d - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(r % ext[a]);
        r /= ext[a];
      }
      S s2 = 0;
      for (int a = 0; a < d; ++a) {
        int kk = idx[a] < N / 2 ? idx[a] : idx[a] - N;
        t->k[a](m) = kk;
        S x = base * S(kk);
        t->xi[a](m) = x;
        t->dxi[a](m) = (kk == -N / 2) ? S(0) : x;
        s2 += x * x;
      }
      t->xi2(m) = s2;
      const int last = idx[d - 1];
      t->weight(m) = (last == 0 || last == N / 2) ? S(1) : S(2);
    }
    t_ = std::move(t);
  }

  int dim() const { return t_->d; }
  int n() const { return t_->N; }
  S length() const { return t_->L; }
  Index size() const { return t_->size; }
  Index spectral_size() const { return t_->spec_size; }
  int half() const { return t_->N / 2 + 1; }
  S spacing() const { return t_->L / S(t_->N); }
  S cell_volume() const { return std::pow(spacing(), S(t_->d)); }
  S volume() const { return std::pow(t_->L, S(t_->d)); }
  S base_wavenumber() const { return S(2) * std::numbers::pi_v<S> / t_->L; }

  const ArrayX<S>& xi(int axis) const { return t_->xi[axis]; }
  const ArrayX<S>& dxi(int axis) const { return t_->dxi[axis]; }
  const Eigen::Array<int, Eigen::Dynamic, 1>& k(int axis) const { return t_->k[axis]; }
  const ArrayX<S>& xi2() const { return t_->xi2; }
  const ArrayX<S>& weight() const { return t_->weight; }

  // coordinate of grid point `i` along an axis
  S coord(int i) const { return spacing() * S(i); }

  // multi-index of a real-space linear index
  void unravel(Index m, int* idx) const {
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(m % n());
      m /= n();
    }
  }

  bool same_as(const Grid& o) const {
    return t_ == o.t_ || (dim() == o.dim() && n() == o.n() && length() == o.length());
  }
  explicit operator bool() const { return static_cast<bool>(t_); }
};

template <class S>
Grid<S> make_grid(int d, int N, S L) {
  return Grid<S>(d, N, L);
}

}  // namespace oldb
