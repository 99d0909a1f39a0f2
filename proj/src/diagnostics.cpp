#include <cstdio>
#include <fstream>

#include "oldb/solver.hpp"

namespace oldb {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& Diagnostics::columns() {
  static const std::vector<std::string> cols{
      "time",         "u_L2_sq",         "nu_int_grad_u_L2_sq", "tau_L2",   "tau_Lp",     "u_B_inf1_m1",
      "int_u_B_inf1_1", "tau_B_inf1_0", "tau_B_p1_dp",         "u_weak_d", "tau_weak_d2"};
  return cols;
}

void Diagnostics::add(const Sample& s, double nu) {
  rows.push_back({s.time, s.u_L2_sq, nu * s.int_grad_u_sq, s.tau_L2, s.tau_Lp, s.u_B_inf1_m1, s.int_u_B_inf1_1,
                  s.tau_B_inf1_0, s.tau_B_p1_dp, s.u_weak_d, s.tau_weak_d2});
}

std::string Diagnostics::csv() const {
  std::string out;
  const auto& cols = columns();
  for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
    out += "\n";
  }
  return out;
}

void Diagnostics::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f << csv();
  if (!f) throw RuntimeFailure("write failed: " + path);
}

std::vector<double> Diagnostics::column(const std::string& name) const {
  const auto& cols = columns();
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw RangeError("no diagnostics column " + name);
  const size_t k = static_cast<size_t>(it - cols.begin());
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

namespace {

double grad_sq(const VectorSpectrumd& u) {
  const Gridd& g = u.front().grid;
  double s = 0;
  for (const auto& c : u) s += g.volume() * (g.weight() * g.xi2() * c.c.abs2()).sum();
  return s;
}

double tau_sq(const VectorSpectrumd& tau, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) s += (i == j ? 1.0 : 2.0) * l2_squared(tau[sym_index(d, i, j)]);
  return s;
}

std::vector<double> tau_weights(int d) {
  std::vector<double> w;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) w.push_back(i == j ? 1.0 : 2.0);
  return w;
}

}  // namespace

Sample measure(const SpectralState& y, const Partitiond& P, double p, double t) {
  const Gridd& g = P.grid;
  const int d = g.dim();
  Sample s;
  s.time = t;
  for (const auto& c : y.u) s.u_L2_sq += l2_squared(c);
  s.grad_u_L2_sq = grad_sq(y.u);
  s.tau_L2 = std::sqrt(tau_sq(y.tau, d));

  const SimState phys = to_physical(y, Params{}, t);
  const Fieldd tf = frobenius(phys.tau);
  s.tau_Lp = lp_norm(tf, p);
  s.symmetry = symmetry_defect(phys.tau);

  const auto ub = block_norms(y.u, P, {kInf});
  s.u_B_inf1_m1 = besov_from_blocks<double>(ub.col(0).array(), P.q_min, -1.0, 1.0);
  s.u_B_inf1_1 = besov_from_blocks<double>(ub.col(0).array(), P.q_min, 1.0, 1.0);
  const auto tb = block_norms(y.tau, P, {kInf, p}, tau_weights(d));
  s.tau_B_inf1_0 = besov_from_blocks<double>(tb.col(0).array(), P.q_min, 0.0, 1.0);
  s.tau_B_p1_dp = besov_from_blocks<double>(tb.col(1).array(), P.q_min, d / p, 1.0);

  s.u_weak_d = weak_lp_norm(magnitude(phys.u), double(d)).value;
  s.tau_weak_d2 = weak_lp_norm(tf, d / 2.0).value;
  return s;
}

RunResult run(const SimState& init, const RunConfig& cfg) {
  if (!(cfg.T >= 0)) throw ConfigError("horizon must be >= 0");
  if (!(cfg.dt > 0)) throw ConfigError("time step must be positive");
  if (cfg.sample_every < 1) throw ConfigError("sample_every must be >= 1");
  const Gridd& g = init.grid();
  const int d = g.dim();
  Integrator I(g, init.params);
  const Partitiond P = build_partition(g);
  SpectralState y = to_spectral(init);
  I.project(y);
  double t = init.t;
  const double t_end = init.t + cfg.T;
  const double nu = init.params.nu;

  double ref = max_abs(magnitude(init.u));
  if (!(ref > 0)) ref = max_abs(frobenius(init.tau));
  I.set_blowup_reference(ref);

  RunResult res;
  double ig = 0, it = 0, iB = 0;
  double g_prev = grad_sq(y.u), t_prev = tau_sq(y.tau, d);
  auto record_sample = [&](double time) {
    Sample s = measure(y, P, cfg.diag.p, time);
    if (!res.samples.empty()) {
      const Sample& q = res.samples.back();
      iB += 0.5 * (time - q.time) * (q.u_B_inf1_1 + s.u_B_inf1_1);
    }
    s.int_grad_u_sq = ig;
    s.int_tau_sq = it;
    s.int_u_B_inf1_1 = iB;
    res.invariants.max_symmetry = std::max(res.invariants.max_symmetry, s.symmetry);
    res.samples.push_back(s);
    res.diagnostics.add(s, nu);
  };
  record_sample(t);
  double u0_sq = 0;
  for (const auto& c : y.u) u0_sq += l2_squared(c);
  res.steps.push_back({t, u0_sq, t_prev, 0, 0});

  const long nsteps = cfg.T > 0 ? static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9)) : 0;
  const double t_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  size_t next_ckpt = 0;
  long k = 0, since_shrink = 0;
  double h_cur = cfg.dt;
  while (cfg.adaptive ? t < t_end - t_tol : k < nsteps) {
    const double h = cfg.adaptive ? std::min(h_cur, t_end - t) : (k + 1 == nsteps ? t_end - t : cfg.dt);
    SpectralState prev = y;
    const double t0 = t;
    try {
      I.step(y, t, h);
    } catch (const StepSizeError&) {
      if (!cfg.adaptive) throw;
      y = std::move(prev);
      t = t0;
      h_cur *= 0.5;
      since_shrink = 0;
      if (h_cur < 1e-6 * cfg.dt) {
        res.blew_up = true;
        res.blowup_time = t;
        break;
      }
      continue;
    } catch (const BlowUp& e) {
      res.blew_up = true;
      res.blowup_time = e.time > t0 ? e.time : t0 + h;
      y = std::move(prev);
      t = t0;
      break;
    }
    ++k;
    if (cfg.adaptive && ++since_shrink >= 20 && h_cur < cfg.dt) {
      h_cur = std::min(cfg.dt, 2 * h_cur);
      since_shrink = 0;
    }
    const double gn = grad_sq(y.u), tn = tau_sq(y.tau, d);
    ig += 0.5 * h * (g_prev + gn);
    it += 0.5 * h * (t_prev + tn);
    g_prev = gn;
    t_prev = tn;
    double usq = 0;
    for (const auto& c : y.u) usq += l2_squared(c);
    res.steps.push_back({t, usq, tn, ig, it});

    if (cfg.track_invariants) {
      const StepInvariants& si = I.last_invariants();
      res.invariants.max_divergence = std::max(res.invariants.max_divergence, si.divergence);
      res.invariants.max_skew = std::max(res.invariants.max_skew, si.skew);
    }
    res.invariants.steps = k;
    const bool last = cfg.adaptive ? t >= t_end - t_tol : k == nsteps;
    if (k % cfg.sample_every == 0 || last) record_sample(t);
    while (next_ckpt < cfg.checkpoint_times.size() && cfg.checkpoint_times[next_ckpt] <= t + 1e-12) {
      const std::string path = cfg.checkpoint_prefix + "_" + std::to_string(next_ckpt) + ".oldb";
      write_checkpoint(to_physical(y, init.params, t), path);
      res.checkpoints.push_back(path);
      ++next_ckpt;
    }
  }
  if (res.blew_up && res.samples.back().time < t) record_sample(t);
  res.final_state = to_physical(y, init.params, t);
  return res;
}

}  // namespace oldb
