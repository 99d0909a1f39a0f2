#pragma once

#include <unsupported/Eigen/FFT>

#include <vector>

#include "oldb/field.hpp"

namespace oldb {

namespace detail {

template <class S>
Eigen::FFT<S>& line_fft() {
  thread_local Eigen::FFT<S> fft = [] {
    Eigen::FFT<S> f;
    f.SetFlag(Eigen::FFT<S>::HalfSpectrum);
    f.SetFlag(Eigen::FFT<S>::Unscaled);
    return f;
  }();
  return fft;
}

// complex transform of every line along `axis` of a half-spectrum array
template <class S>
void complex_pass(const Grid<S>& g, std::complex<S>* data, int axis, bool inverse) {
  const int N = g.n();
  Index stride = g.half();
  for (int a = g.dim() - 2; a > axis; --a) stride *= N;
  const Index lines = g.spectral_size() / N;
#pragma omp parallel
  {
    std::vector<std::complex<S>> in(N), out(N);
    auto& fft = line_fft<S>();
#pragma omp for schedule(static)
    for (Index l = 0; l < lines; ++l) {
      const Index outer = l / stride, inner = l % stride;
      std::complex<S>* base = data + outer * N * stride + inner;
      for (int i = 0; i < N; ++i) in[i] = base[i * stride];
      if (inverse)
        fft.inv(out.data(), in.data(), N);
      else
        fft.fwd(out.data(), in.data(), N);
      for (int i = 0; i < N; ++i) base[i * stride] = out[i];
    }
  }
}

}  // namespace detail

// forward transform, scaled by N^{-d}
template <class S>
Spectrum<S> forward(const Field<S>& f) {
  const Grid<S>& g = f.grid;
  const int N = g.n(), nh = g.half();
  Spectrum<S> out(g);
  const Index rows = g.size() / N;
  const S scale = S(1) / S(g.size());
#pragma omp parallel
  {
    std::vector<S> in(N);
    std::vector<std::complex<S>> tmp(N);
    auto& fft = detail::line_fft<S>();
#pragma omp for schedule(static)
    for (Index r = 0; r < rows; ++r) {
      for (int i = 0; i < N; ++i) in[i] = f.v(r * N + i);
      fft.fwd(tmp.data(), in.data(), N);
      for (int j = 0; j < nh; ++j) out.c(r * nh + j) = tmp[j] * scale;
    }
  }
  for (int a = g.dim() - 2; a >= 0; --a) detail::complex_pass(g, out.c.data(), a, false);
  return out;
}

template <class S>
Field<S> inverse(const Spectrum<S>& s) {
  const Grid<S>& g = s.grid;
  const int N = g.n(), nh = g.half();
  CArrayX<S> work = s.c;
  for (int a = 0; a <= g.dim() - 2; ++a) detail::complex_pass(g, work.data(), a, true);
  Field<S> out(g);
  const Index rows = g.size() / N;
#pragma omp parallel
  {
    std::vector<std::complex<S>> in(N);
    std::vector<S> tmp(N);
    auto& fft = detail::line_fft<S>();
#pragma omp for schedule(static)
    for (Index r = 0; r < rows; ++r) {
      for (int j = 0; j < nh; ++j) in[j] = work(r * nh + j);
      fft.inv(tmp.data(), in.data(), N);
      for (int i = 0; i < N; ++i) out.v(r * N + i) = tmp[i];
    }
  }
  return out;
}

template <class S>
std::vector<Spectrum<S>> forward(const VectorField<S>& u) {
  std::vector<Spectrum<S>> out;
  for (const auto& c : u.c) out.push_back(forward(c));
  return out;
}

template <class S>
VectorField<S> inverse(const std::vector<Spectrum<S>>& s) {
  VectorField<S> out;
  for (const auto& c : s) out.c.push_back(inverse(c));
  return out;
}

}  // namespace oldb
