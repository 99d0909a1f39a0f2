#include "oldb/picard.hpp"

#include <cstdio>

namespace oldb {

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> tensor_weights(int d) {
  std::vector<double> w;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) w.push_back(i == j ? 1.0 : 2.0);
  return w;
}

VectorSpectrumd combine(const VectorSpectrumd& a, double s, const VectorSpectrumd& b) {
  VectorSpectrumd out = a;
  for (size_t i = 0; i < out.size(); ++i) out[i].c += s * b[i].c;
  return out;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0;
  for (size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i - 1] + f[i]);
  return s;
}

std::vector<double> besov_series(const TrajectoryNorms<double>& tn, double s) {
  std::vector<double> out;
  for (Index i = 0; i < tn.per_block_lp.rows(); ++i)
    out.push_back(besov_from_blocks<double>(tn.per_block_lp.row(i).transpose().array(), tn.q_min, s, 1.0));
  return out;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

Trajectory linear_stokes_u_L(const VectorSpectrumd& u0, double nu, const std::vector<double>& times) {
  if (divergence_ratio(u0) > 1e-10) throw ConfigError("initial velocity is not divergence free");
  Trajectory out;
  for (double t : times) {
    VectorSpectrumd v;
    for (const auto& c : u0) v.push_back(heat_propagate(c, t, nu));
    out.push_back(std::move(v));
  }
  return out;
}

Trajectory transport_tau(const VectorSpectrumd& tau0, const Trajectory& drift, const Params& p,
                         const std::vector<double>& times) {
  if (drift.size() != times.size()) throw RangeError("drift must be sampled at every node");
  const Gridd& g = tau0.front().grid;
  Integrator I(g, p);
  const ArrayXd mask = dealias_mask(g);
  Trajectory out{tau0};
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    if (!(h > 0)) throw RangeError("transport nodes must increase");
    SpectralState y0{drift[k], out.back()};
    double umax = 0;
    const SpectralState N0 = I.nonlinear(y0, &umax, nullptr, Integrator::Stress);
    if (umax > 0 && h > 0.5 * g.spacing() / umax * (1 + 1e-12))
      throw StepSizeError("transport CFL violation at t=" + std::to_string(times[k]));
    const double E = std::exp(-p.a * h);
    SpectralState y1{drift[k + 1], out.back()};
    for (size_t e = 0; e < y1.tau.size(); ++e) y1.tau[e].c = E * (y0.tau[e].c + h * N0.tau[e].c);
    const SpectralState N1 = I.nonlinear(y1, nullptr, nullptr, Integrator::Stress);
    VectorSpectrumd next = out.back();
    for (size_t e = 0; e < next.size(); ++e) {
      next[e].c = E * (y0.tau[e].c + 0.5 * h * N0.tau[e].c) + 0.5 * h * N1.tau[e].c;
      next[e] = multiply(next[e], mask);
    }
    out.push_back(std::move(next));
  }
  return out;
}

TrajectoryNorms<double> trajectory_blocks(const Trajectory& tr, const std::vector<double>& times,
                                          const Partitiond& P, double p, const std::vector<double>& weights) {
  TrajectoryNorms<double> out;
  out.times = times;
  out.q_min = P.q_min;
  out.per_block_lp.resize(static_cast<Index>(tr.size()), P.count());
  const Gridd& g = P.grid;
  for (size_t i = 0; i < tr.size(); ++i) {
    if (p == 2) {
      ArrayXd e = ArrayXd::Zero(g.spectral_size());
      for (size_t c = 0; c < tr[i].size(); ++c) e += (weights.empty() ? 1.0 : weights[c]) * tr[i][c].c.abs2();
      e *= g.weight();
      for (int b = 0; b < P.count(); ++b)
        out.per_block_lp(static_cast<Index>(i), b) = std::sqrt(g.volume() * (P.phi[b].square() * e).sum());
    } else {
      out.per_block_lp.row(static_cast<Index>(i)) = block_norms(tr[i], P, {p}, weights).col(0).transpose();
    }
  }
  return out;
}

std::string PicardResult::csv() const {
  std::string s = "n,U_bar,delta_U,ratio\n";
  char buf[128];
  for (const auto& it : iterates) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", it.n, it.U_bar, it.delta, it.ratio);
    s += buf;
  }
  return s;
}

PicardResult picard_solve(const SimState& init, const PicardConfig& cfg) {
  if (!(cfg.T > 0) || !(cfg.dt > 0)) throw ConfigError("Picard needs T > 0 and dt > 0");
  if (cfg.n_max < 1) throw ConfigError("Picard needs n_max >= 1");
  const Gridd& g = init.grid();
  const int d = g.dim();
  const Params& prm = init.params;
  prm.validate();
  const Partitiond P = build_partition(g);
  const double nu = prm.nu, p = cfg.p;

  PicardResult res;
  const long K = static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9));
  for (long k = 0; k <= K; ++k) res.times.push_back(k == K ? cfg.T : k * cfg.dt);
  const auto& times = res.times;

  Integrator I(g, prm);
  SpectralState y0 = to_spectral(init);
  I.project(y0);
  const Trajectory uL = linear_stokes_u_L(y0.u, nu, times);

  const std::vector<double> tw = tensor_weights(d);
  const double tau0_norm =
      besov_from_blocks<double>(block_norms(y0.tau, P, {p}, tw).col(0).array(), P.q_min, d / p, 1.0);

  auto delta_norm = [&](const Trajectory& du) {
    const auto tn = trajectory_blocks(du, times, P, p);
    return chemin_lerner_norm(tn, kInf, BesovParamsd{d / p - 2, p, 1}) +
           nu * chemin_lerner_norm(tn, 1.0, BesovParamsd{d / p, p, 1});
  };
  auto ubar_norm = [&](const Trajectory& ub) {
    const auto tn = trajectory_blocks(ub, times, P, p);
    return max_of(besov_series(tn, d / p - 1)) + nu * trapezoid(times, besov_series(tn, d / p + 1));
  };
  auto drift_integral = [&](const Trajectory& u) {
    std::vector<double> vals;
    for (const auto& v : u) {
      VectorSpectrumd grad;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) grad.push_back(derivative(v[i], j));
      vals.push_back(besov_from_blocks<double>(block_norms(grad, P, {kInf}).col(0).array(), P.q_min, 0.0, 1.0));
    }
    return trapezoid(times, vals);
  };
  auto growth = [&](const Trajectory& tau) {
    if (!(tau0_norm > 0)) return 0.0;
    const auto tn = trajectory_blocks(tau, times, P, p, tw);
    const auto s = besov_series(tn, d / p);
    double m = 0;
    for (size_t i = 0; i < s.size(); ++i) m = std::max(m, s[i] / (tau0_norm * std::exp(-prm.a * times[i])));
    return m;
  };

  Trajectory ubar(times.size(), VectorSpectrumd(d, Spectrumd(g)));
  Trajectory u = uL;
  Trajectory tau(times.size(), y0.tau);
  PicardIterate first;
  first.tau_growth = tau0_norm > 0 ? 1.0 : 0.0;
  res.iterates.push_back(first);

  int growing = 0;
  for (int n = 0; n <= cfg.n_max; ++n) {
    Trajectory tau_next;
    try {
      tau_next = transport_tau(y0.tau, u, prm, times);
    } catch (const StepSizeError& e) {
      if (n == 0) throw;
      throw HorizonTooLarge(std::string("Picard iterates diverge: ") + e.what());
    }
    std::vector<VectorSpectrumd> F;
    for (size_t k = 0; k < times.size(); ++k) {
      SpectralState s{u[k], tau_next[k]};
      F.push_back(I.nonlinear(s, nullptr, nullptr, Integrator::Velocity).u);
    }
    Trajectory ubar_next{VectorSpectrumd(d, Spectrumd(g))};
    for (size_t k = 0; k + 1 < times.size(); ++k) {
      const double h = times[k + 1] - times[k];
      const CArrayX<double> E = heat_multiplier(g, h, nu).cast<std::complex<double>>();
      VectorSpectrumd next = ubar_next.back();
      for (int a = 0; a < d; ++a) next[a].c = E * (next[a].c + 0.5 * h * F[k][a].c) + 0.5 * h * F[k + 1][a].c;
      ubar_next.push_back(std::move(next));
    }
    Trajectory u_next, du;
    for (size_t k = 0; k < times.size(); ++k) {
      u_next.push_back(combine(uL[k], 1.0, ubar_next[k]));
      du.push_back(combine(u_next[k], -1.0, u[k]));
    }
    PicardIterate& cur = res.iterates.back();
    cur.delta = delta_norm(du);
    if (n == 0) res.floor = 1e-12 * cur.delta;
    if (n > 0) {
      const double prev = res.iterates[n - 1].delta;
      cur.ratio = (prev > res.floor && cur.delta > res.floor) ? cur.delta / prev : kNaN;
      if (cur.delta <= res.floor) res.converged = true;
      growing = (cur.delta > res.floor && cur.delta > prev) ? growing + 1 : 0;
      if (growing >= 3) throw HorizonTooLarge("Picard iterates diverge: horizon too large");
    } else {
      cur.ratio = kNaN;
      if (cur.delta == 0) res.converged = true;
    }
    if (n == cfg.n_max) break;
    PicardIterate nxt;
    nxt.n = n + 1;
    nxt.U_bar = ubar_norm(ubar_next);
    nxt.tau_growth = growth(tau_next);
    nxt.drift_int = drift_integral(u);
    res.iterates.push_back(nxt);
    ubar = std::move(ubar_next);
    u = std::move(u_next);
    tau = tau_next;
  }
  res.u = std::move(u);
  res.tau = std::move(tau);
  return res;
}

Horizon smallness_horizon(const SimState& init, double C, double epsilon, double dt, double T_cap, double p) {
  if (!(C > 0) || !(epsilon > 0) || !(dt > 0) || !(T_cap >= dt))
    throw ConfigError("smallness horizon needs C, epsilon, dt > 0 and T_cap >= dt");
  const Gridd& g = init.grid();
  const int d = g.dim();
  const double nu = init.params.nu;
  const Partitiond P = build_partition(g);
  SpectralState y = to_spectral(init);
  const long J = static_cast<long>(std::floor(T_cap / dt + 1e-9));
  std::vector<double> times;
  for (long j = 0; j <= J; ++j) times.push_back(j * dt);
  const Trajectory uL = linear_stokes_u_L(y.u, nu, times);
  const auto tn = trajectory_blocks(uL, times, P, p);
  const auto b = besov_series(tn, d / p);
  const double tau0 =
      besov_from_blocks<double>(block_norms(y.tau, P, {p}, tensor_weights(d)).col(0).array(), P.q_min, d / p, 1.0);
  const double rhs = nu * epsilon / (100 * C);
  Horizon h;
  h.rhs = rhs;
  double integral = 0;
  for (long j = 1; j <= J; ++j) {
    integral += 0.5 * dt * (b[j - 1] * b[j - 1] + b[j] * b[j]);
    const double lhs = C * integral + C * times[j] * tau0 * std::exp(nu / 2);
    if (lhs > rhs) break;
    h.T = times[j];
    h.lhs = lhs;
  }
  if (!(h.T > 0)) throw RangeError("no admissible Picard horizon above dt");
  return h;
}

}  // namespace oldb
