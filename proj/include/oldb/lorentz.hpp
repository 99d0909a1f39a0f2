#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "oldb/operators.hpp"

namespace oldb {

template <class S>
struct WeakNormResult {
  S value = 0;
  S argmax_level = 0;
};

// sup over sampled levels l of l * (cell volume * #{|f| >= l})^{1/p}; grid functions are
// simple functions, so this is the exact weak norm of the piecewise-constant extension.
template <class S>
WeakNormResult<S> weak_lp_norm(const ArrayX<S>& values, S cell_volume, S p) {
  if (!(p >= 1) || std::isinf(static_cast<double>(p))) throw ConfigError("weak norm exponent must be in [1,inf)");
  std::vector<S> mag(values.size());
  for (Index i = 0; i < values.size(); ++i) {
    mag[i] = std::abs(values(i));
    if (!std::isfinite(static_cast<double>(mag[i]))) return {std::numeric_limits<S>::infinity(), mag[i]};
  }
  std::sort(mag.begin(), mag.end(), std::greater<S>());
  WeakNormResult<S> best;
  const S inv_p = S(1) / p;
  for (size_t i = 0; i < mag.size();) {
    const S level = mag[i];
    size_t j = i;
    while (j < mag.size() && mag[j] == level) ++j;
    if (level <= 0) break;
    const S cand = level * std::pow(cell_volume * S(j), inv_p);
    if (cand > best.value) {
      best.value = cand;
      best.argmax_level = level;
    }
    i = j;
  }
  return best;
}

template <class S>
WeakNormResult<S> weak_lp_norm(const Field<S>& f, S p) {
  return weak_lp_norm(f.v, f.grid.cell_volume(), p);
}

template <class S>
WeakNormResult<S> weak_lp_norm(const VectorField<S>& u, S p) {
  return weak_lp_norm(magnitude(u), p);
}

template <class S>
WeakNormResult<S> weak_lp_norm(const TensorField<S>& t, S p) {
  return weak_lp_norm(frobenius(t), p);
}

template <class S>
struct LorentzSplit {
  Field<S> low;   // f_A: the large values, integrable
  Field<S> high;  // f^A: the clamp, bounded
  S l1_bound = 0, linf_bound = 0;
};

template <class S>
LorentzSplit<S> lorentz_split(const Field<S>& f, S A, S p) {
  if (!(A > 0)) throw ConfigError("split threshold must be positive");
  const S c = weak_lp_norm(f, p).value;
  const S cut = c * std::pow(A, -S(1) / p);
  LorentzSplit<S> out{Field<S>(f.grid), Field<S>(f.grid), 0, 0};
  out.high.v = f.v.max(-cut).min(cut);
  out.low.v = f.v - out.high.v;
  // int (|f|-cut)_+ = int_cut^inf m(|f|>l) dl <= c^p cut^{1-p}/(p-1)
  out.l1_bound = (p > 1 ? S(1) / (p - 1) : std::numeric_limits<S>::infinity()) * c * std::pow(A, S(1) - S(1) / p);
  out.linf_bound = cut;
  return out;
}

}  // namespace oldb
