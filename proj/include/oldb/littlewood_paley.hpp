#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "oldb/operators.hpp"

namespace oldb {

namespace lp {

template <class S>
S h(S t) {
  return t > 0 ? std::exp(-S(1) / t) : S(0);
}

// radial low-pass profile: 1 on [0,3/4], 0 on [4/3,inf)
template <class S>
S chi(S r) {
  const S a = S(3) / S(4), b = S(4) / S(3);
  if (r <= a) return 1;
  if (r >= b) return 0;
  const S hb = h(b - r), ha = h(r - a);
  return hb / (hb + ha);
}

template <class S>
S phi(S r) {
  return chi(r / S(2)) - chi(r);
}

}  // namespace lp

template <class S>
struct BesovParams {
  S s = 0;
  S p = 2;
  S r = 2;
};

template <class S>
struct BesovValue {
  S value = 0;
  bool mean_warning = false;  // mean mode present: not seen by the homogeneous norm
  operator S() const { return value; }
};

template <class S>
class DyadicPartition {
 public:
  Grid<S> grid;
  int q_min = 0, q_max = 0;
  ArrayX<S> radius;
  ArrayX<S> chi;                // chi(|xi|)
  std::vector<ArrayX<S>> phi;   // phi(2^{-q}|xi|), q = q_min..q_max

  int count() const { return q_max - q_min + 1; }

  const ArrayX<S>& block(int q) const {
    if (q < q_min || q > q_max)
      throw RangeError("block " + std::to_string(q) + " outside [" + std::to_string(q_min) + ", " +
                       std::to_string(q_max) + "]");
    return phi[q - q_min];
  }

  // chi(2^{-q}|xi|), the multiplier of S_q
  ArrayX<S> low(int q) const {
    if (q < q_min - 1 || q > q_max + 1)
      throw RangeError("low-frequency index " + std::to_string(q) + " outside partition range");
    ArrayX<S> m(radius.size());
    const S scale = std::ldexp(S(1), -q);
    for (Index i = 0; i < m.size(); ++i) m(i) = lp::chi(radius(i) * scale);
    return m;
  }

  // radial shell on which the blocks sum to one
  S covered_lo() const { return S(4) / S(3) * std::ldexp(S(1), q_min); }
  S covered_hi() const { return S(3) / S(2) * std::ldexp(S(1), q_max); }

  ArrayX<S> coverage() const {
    ArrayX<S> sum = ArrayX<S>::Zero(radius.size());
    for (const auto& p : phi) sum += p;
    return sum;
  }
};

template <class S>
DyadicPartition<S> build_partition(const Grid<S>& g) {
  DyadicPartition<S> P;
  P.grid = g;
  const S xmin = g.base_wavenumber();
  P.q_min = static_cast<int>(std::floor(std::log2(S(3) * xmin / S(8)))) + 1;
  P.q_max = static_cast<int>(std::floor(std::log2(xmin * S(g.n()) / S(8)) + S(1e-12)));
  if (P.count() < 3)
    throw ConfigError("grid too small for a dyadic partition with at least 3 blocks (N=" +
                      std::to_string(g.n()) + ")");
  P.radius = g.xi2().sqrt();
  P.chi.resize(P.radius.size());
  for (Index i = 0; i < P.radius.size(); ++i) P.chi(i) = lp::chi(P.radius(i));
  for (int q = P.q_min; q <= P.q_max; ++q) {
    ArrayX<S> m(P.radius.size());
    const S scale = std::ldexp(S(1), -q);
    for (Index i = 0; i < m.size(); ++i) m(i) = lp::phi(P.radius(i) * scale);
    P.phi.push_back(std::move(m));
  }
  return P;
}

template <class S>
Field<S> dyadic_block(const Field<S>& f, int q, const DyadicPartition<S>& P) {
  return inverse(multiply(forward(f), P.block(q)));
}

template <class S>
Field<S> low_freq(const Field<S>& f, int q, const DyadicPartition<S>& P) {
  return inverse(multiply(forward(f), P.low(q)));
}

// Per-block L^p norms of the pointwise magnitude of a (possibly multi-component) field.
// Off-diagonal tensor entries are passed once with weight 2 via `weights`.
template <class S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> block_norms(const std::vector<Spectrum<S>>& comps,
                                                             const DyadicPartition<S>& P,
                                                             const std::vector<S>& ps,
                                                             const std::vector<S>& weights = {}) {
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> out(P.count(), ps.size());
  const Grid<S>& g = P.grid;
  for (int b = 0; b < P.count(); ++b) {
    Field<S> mag(g);
    for (size_t c = 0; c < comps.size(); ++c) {
      const Field<S> blk = inverse(multiply(comps[c], P.phi[b]));
      const S w = weights.empty() ? S(1) : weights[c];
      mag.v += w * blk.v.square();
    }
    mag.v = mag.v.sqrt();
    for (size_t k = 0; k < ps.size(); ++k) out(b, k) = lp_norm(mag, ps[k]);
  }
  return out;
}

template <class S>
S besov_from_blocks(const Eigen::Ref<const ArrayX<S>>& blocks, int q_min, S s, S r) {
  const bool sup = std::isinf(static_cast<double>(r));
  S acc = 0;
  for (Index b = 0; b < blocks.size(); ++b) {
    const S term = std::pow(S(2), S(q_min + b) * s) * blocks(b);
    if (sup)
      acc = std::max(acc, term);
    else
      acc += std::pow(term, r);
  }
  return sup ? acc : std::pow(acc, S(1) / r);
}

template <class S>
BesovValue<S> besov_norm(const std::vector<Spectrum<S>>& comps, const BesovParams<S>& bp,
                         const DyadicPartition<S>& P, const std::vector<S>& weights = {}) {
  BesovValue<S> out;
  const auto blocks = block_norms(comps, P, {bp.p}, weights);
  out.value = besov_from_blocks<S>(blocks.col(0).array(), P.q_min, bp.s, bp.r);
  S scale = 0, mean = 0;
  for (const auto& c : comps) {
    scale = std::max(scale, c.c.abs().maxCoeff());
    mean = std::max(mean, std::abs(c.c(0)));
  }
  out.mean_warning = mean > S(1e-12) * scale;
  return out;
}

template <class S>
BesovValue<S> besov_norm(const Field<S>& f, const BesovParams<S>& bp, const DyadicPartition<S>& P) {
  return besov_norm(std::vector<Spectrum<S>>{forward(f)}, bp, P);
}

template <class S>
BesovValue<S> besov_norm(const VectorField<S>& u, const BesovParams<S>& bp, const DyadicPartition<S>& P) {
  return besov_norm(forward(u), bp, P);
}

template <class S>
BesovValue<S> besov_norm(const TensorField<S>& t, const BesovParams<S>& bp, const DyadicPartition<S>& P) {
  std::vector<Spectrum<S>> comps;
  for (const auto& e : t.e) comps.push_back(forward(e));
  return besov_norm(comps, bp, P);
}

// ---- Chemin-Lerner ----

template <class S>
struct TrajectoryNorms {
  std::vector<S> times;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> per_block_lp;  // rows: times, cols: blocks
  int q_min = 0;
};

template <class S>
S chemin_lerner_norm(const TrajectoryNorms<S>& tr, S rho, const BesovParams<S>& bp) {
  const Index nt = static_cast<Index>(tr.times.size());
  if (nt == 0 || tr.per_block_lp.rows() != nt) throw RangeError("empty or inconsistent trajectory");
  for (Index i = 1; i < nt; ++i)
    if (!(tr.times[i] > tr.times[i - 1])) throw RangeError("trajectory times must increase");
  const bool tsup = std::isinf(static_cast<double>(rho));
  ArrayX<S> per(tr.per_block_lp.cols());
  for (Index b = 0; b < per.size(); ++b) {
    if (nt == 1) {
      per(b) = tr.per_block_lp(0, b);
      continue;
    }
    if (tsup) {
      per(b) = tr.per_block_lp.col(b).maxCoeff();
      continue;
    }
    S acc = 0;
    for (Index i = 1; i < nt; ++i) {
      const S dt = tr.times[i] - tr.times[i - 1];
      acc += S(0.5) * dt *
             (std::pow(tr.per_block_lp(i - 1, b), rho) + std::pow(tr.per_block_lp(i, b), rho));
    }
    per(b) = std::pow(acc, S(1) / rho);
  }
  return besov_from_blocks<S>(per, tr.q_min, bp.s, bp.r);
}

// ---- Bony decomposition ----

template <class S>
struct BonyParts {
  Field<S> Tfg, Tgf, R;
};

template <class S>
void require_covered(const Spectrum<S>& f, const DyadicPartition<S>& P, const char* what) {
  const ArrayX<S> cov = P.coverage();
  const ArrayX<S> e = f.c.abs2();
  const S total = (P.grid.weight() * e).sum();
  S outside = 0;
  for (Index i = 0; i < e.size(); ++i)
    if (std::abs(cov(i) - 1) > S(1e-12)) outside += P.grid.weight()(i) * e(i);
  if (outside > S(1e-24) * total)
    throw RangeError(std::string(what) + ": spectrum extends outside the partition's covered shell");
}

// T_f g = sum_q S_{q-1}g . Delta_q f ;  R(f,g) = sum_q Delta_q f . sum_{|j-q|<=1} Delta_j g
template <class S>
BonyParts<S> bony_decompose(const Field<S>& f, const Field<S>& g, const DyadicPartition<S>& P) {
  const Spectrum<S> fs = forward(f), gs = forward(g);
  require_covered(fs, P, "bony_decompose(f)");
  require_covered(gs, P, "bony_decompose(g)");
  const Grid<S>& G = P.grid;
  std::vector<Field<S>> fb, gb;
  for (int q = P.q_min; q <= P.q_max; ++q) {
    fb.push_back(inverse(multiply(fs, P.block(q))));
    gb.push_back(inverse(multiply(gs, P.block(q))));
  }
  BonyParts<S> out{Field<S>(G), Field<S>(G), Field<S>(G)};
  for (int q = P.q_min; q <= P.q_max; ++q) {
    const int b = q - P.q_min;
    const Field<S> Sg = inverse(multiply(gs, P.low(q - 1)));
    const Field<S> Sf = inverse(multiply(fs, P.low(q - 1)));
    out.Tfg.v += Sg.v * fb[b].v;
    out.Tgf.v += Sf.v * gb[b].v;
    ArrayX<S> near = gb[b].v;
    if (b > 0) near += gb[b - 1].v;
    if (b + 1 < P.count()) near += gb[b + 1].v;
    out.R.v += fb[b].v * near;
  }
  return out;
}

// ---- Bernstein ----

template <class S>
struct BernsteinRatios {
  S lebesgue = 0;  // ||D_q f||_l / (2^{q(d/p-d/l)} ||D_q f||_p)
  S gradient = 0;  // ||grad D_q f||_p / (2^q ||D_q f||_p)
};

template <class S>
BernsteinRatios<S> check_bernstein(const Field<S>& f, int q, S p, S l, const DyadicPartition<S>& P) {
  const Spectrum<S> blk = multiply(forward(f), P.block(q));
  const Field<S> b = inverse(blk);
  const S np = lp_norm(b, p);
  if (!(np > 0)) throw RangeError("Bernstein check on a zero block");
  const int d = P.grid.dim();
  auto inv_or_zero = [](S x) { return std::isinf(static_cast<double>(x)) ? S(0) : S(1) / x; };
  VectorField<S> grad;
  for (int a = 0; a < d; ++a) grad.c.push_back(inverse(derivative(blk, a)));
  BernsteinRatios<S> r;
  r.lebesgue = lp_norm(b, l) / (std::pow(S(2), S(q) * S(d) * (inv_or_zero(p) - inv_or_zero(l))) * np);
  r.gradient = lp_norm(grad, p) / (std::ldexp(S(1), q) * np);
  return r;
}

// C M log(e + (|f|_{B^{-1/2}_{p,inf}} + |f|_{B^{3/2}_{p,1}})/M) - |f|_{B^{1/2}_{p,1}},  M = |f|_{B^{1/2}_{p,inf}}
template <class S>
S log_interpolation_check(const Field<S>& f, const DyadicPartition<S>& P, S C, S p = 4) {
  const auto blocks = block_norms(std::vector<Spectrum<S>>{forward(f)}, P, {p});
  const ArrayX<S> b = blocks.col(0).array();
  const S inf = std::numeric_limits<S>::infinity();
  const S M = besov_from_blocks<S>(b, P.q_min, S(0.5), inf);
  if (!(M > 0)) throw RangeError("log interpolation check on a zero field");
  const S lo = besov_from_blocks<S>(b, P.q_min, S(-0.5), inf);
  const S hi = besov_from_blocks<S>(b, P.q_min, S(1.5), S(1));
  const S lhs = besov_from_blocks<S>(b, P.q_min, S(0.5), S(1));
  return C * M * std::log(std::numbers::e_v<S> + (lo + hi) / M) - lhs;
}

}  // namespace oldb
