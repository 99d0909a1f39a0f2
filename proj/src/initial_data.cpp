#include "oldb/initial_data.hpp"

#include <random>

namespace oldb {

double rms(const Fieldd& m) { return std::sqrt(m.v.square().mean()); }

namespace {

Fieldd band_filtered(const Partitiond& P, int q0, int q1, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0, 1);
  Fieldd w(P.grid);
  for (Index i = 0; i < w.v.size(); ++i) w.v(i) = nd(rng);
  ArrayXd mask = ArrayXd::Zero(P.grid.spectral_size());
  for (int q = q0; q <= q1; ++q) mask += P.block(q);
  mask *= dealias_mask(P.grid);
  return inverse(multiply(forward(w), mask));
}

SimState taylor_green(const Gridd& g, const InitialDataSpec& s) {
  const int d = g.dim();
  const double k = g.base_wavenumber(), A = s.amplitude, B = s.tau_amplitude;
  SimState st;
  st.u = VectorFieldd(g);
  auto z = [&](const Point<double>& x) { return d == 3 ? std::cos(k * x[2]) : 1.0; };
  st.u[0] = sample(g, [&](const Point<double>& x) { return A * std::sin(k * x[0]) * std::cos(k * x[1]) * z(x); });
  st.u[1] = sample(g, [&](const Point<double>& x) { return -A * std::cos(k * x[0]) * std::sin(k * x[1]) * z(x); });
  st.u.divergence_free = true;
  st.tau = TensorFieldd(g);
  const Fieldd diag = sample(g, [&](const Point<double>& x) { return B * std::cos(k * x[0]) * std::cos(k * x[1]); });
  const Fieldd off = sample(g, [&](const Point<double>& x) { return B * std::sin(k * x[0]) * std::sin(k * x[1]); });
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) st.tau(i, j) = i == j ? diag : off;
  st.tau.symmetric = true;
  return st;
}

SimState random_band(const Gridd& g, int q0, int q1, const InitialDataSpec& s) {
  const Partitiond P = build_partition(g);
  if (q0 > q1 || q0 < P.q_min || q1 > P.q_max)
    throw ConfigError("initial-data blocks [" + std::to_string(q0) + ", " + std::to_string(q1) +
                      "] outside the partition range [" + std::to_string(P.q_min) + ", " +
                      std::to_string(P.q_max) + "]");
  const int d = g.dim();
  std::mt19937_64 rng(s.seed);
  SimState st;
  for (int a = 0; a < d; ++a) st.u.c.push_back(band_filtered(P, q0, q1, rng));
  st.u = leray_project(st.u);
  for (auto& c : st.u.c) c.v -= c.v.mean();
  const double ur = rms(magnitude(st.u));
  if (ur > 0)
    for (auto& c : st.u.c) c.v *= s.amplitude / ur;
  st.u.divergence_free = true;

  TensorFieldd t(g);
  for (auto& e : t.e) e = band_filtered(P, q0, q1, rng);
  st.tau = symmetrize(t);
  const double tr = rms(frobenius(st.tau));
  if (tr > 0)
    for (auto& e : st.tau.e) e.v *= s.tau_amplitude / tr;
  return st;
}

}  // namespace

SimState make_initial(const Gridd& g, const Params& p, const InitialDataSpec& spec) {
  SimState st;
  if (spec.kind == "taylor-green")
    st = taylor_green(g, spec);
  else if (spec.kind == "random-band")
    st = random_band(g, spec.q0, spec.q1, spec);
  else if (spec.kind == "single-block")
    st = random_band(g, spec.block, spec.block, spec);
  else
    throw ConfigError("unknown initial data generator '" + spec.kind + "'");
  st.params = p;
  st.t = 0;
  return st;
}

}  // namespace oldb
