#include "oldb/experiments.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>

#include "oldb/picard.hpp"

namespace oldb {

namespace fs = std::filesystem;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::string path_in(const ExperimentConfig& c, const std::string& name) {
  return (fs::path(c.output) / name).string();
}

std::string label(const std::string& key, double v) { return key + format_double(v); }

ordered_json environment(const ExperimentConfig& c) {
  ordered_json e;
  e["grid"] = {{"d", c.d}, {"N", c.N}, {"L", number(c.L)}};
  e["params"] = {{"nu", number(c.params.nu)},
                 {"a", number(c.params.a)},
                 {"mu", number(c.params.mu)},
                 {"b", number(c.params.b)},
                 {"friedrichs_n", c.params.friedrichs_n}};
  e["time"] = {{"dt", number(c.dt)}, {"T", number(c.T)}, {"sample_every", c.sample_every}};
  e["initial_data"] = {{"kind", c.init.kind},
                       {"seed", c.init.seed},
                       {"count", c.count},
                       {"amplitude", number(c.init.amplitude)},
                       {"tau_amplitude", number(c.init.tau_amplitude)},
                       {"q0", c.init.q0},
                       {"q1", c.init.q1},
                       {"block", c.init.block}};
  e["epsilon"] = number(c.epsilon);
  e["diag_p"] = number(c.diag_p);
  return e;
}

ordered_json calibration_json(const Calibration& cal) {
  ordered_json j;
  j["lipschitz"] = number(cal.lipschitz);
  j["transport"] = number(cal.transport);
  j["lorentz"] = number(cal.lorentz);
  j["stokes"] = number(cal.stokes);
  j["seed"] = kCalibrationSeed;
  j["count"] = kCalibrationCount;
  j["margin"] = number(kCalibrationMargin);
  return j;
}

CheckRecord record(std::string name, std::string anchor, double lhs, double rhs, double C, double tol, bool pass,
                   std::string note = {}) {
  CheckRecord r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.lhs = lhs;
  r.rhs = rhs;
  r.C = C;
  r.tolerance = tol;
  r.pass = pass;
  r.note = std::move(note);
  return r;
}

std::vector<std::uint64_t> seeds(const ExperimentConfig& c) {
  std::vector<std::uint64_t> s;
  for (int k = 0; k < c.count; ++k) s.push_back(c.init.seed + static_cast<std::uint64_t>(k));
  return s;
}

void note_dt(ExperimentOutcome& out, double dt) { out.report.environment["time"]["dt_used"].push_back(number(dt)); }

void write_run_artifacts(const ExperimentConfig& c, const RunResult& r, const std::string& tag, ExperimentOutcome& out) {
  const std::string csv = path_in(c, "diagnostics_" + tag + ".csv");
  r.diagnostics.write_csv(csv);
  out.artifacts.push_back(csv);
  const std::string ck = path_in(c, "final_" + tag + ".oldb");
  write_checkpoint(r.final_state, ck);
  out.artifacts.push_back(ck);
}

void check_existence(VerificationReport& rep, const std::string& tag, const RunResult& r, double T) {
  rep.add(record("global_existence/" + tag, "solution exists on [0, T]", r.blew_up ? r.blowup_time : T, T, 0, 0,
                 !r.blew_up, r.blew_up ? "solver blow-up before T" : ""));
}

void check_invariants(VerificationReport& rep, const std::string& tag, const RunResult& r) {
  const auto& inv = r.invariants;
  rep.add(record("symmetry/" + tag, "tau = tau^T", inv.max_symmetry, 1e-10, 0, 1e-10, inv.max_symmetry <= 1e-10,
                 "stored as unique entries; measured on the physical tensor at samples"));
  rep.add(record("divergence/" + tag, "||div u|| / ||grad u|| = 0", inv.max_divergence, 1e-10, 0, 1e-10,
                 inv.max_divergence <= 1e-10));
  rep.add(record("skew_cancellation/" + tag, "<tau w - w tau, tau> = 0", inv.max_skew, 1e-10, 0, 1e-10,
                 inv.max_skew <= 1e-10));
}

RunResult solve(const ExperimentConfig& c, const SimState& init, double T, double& dt, bool adaptive = false) {
  RunConfig rc;
  rc.T = T;
  rc.dt = dt = resolve_dt(c, init);
  rc.sample_every = c.sample_every;
  rc.diag.p = c.diag_p;
  rc.adaptive = adaptive;
  return run(init, rc);
}

// ---- experiments ----

void decay(const ExperimentConfig& c, ExperimentOutcome& out) {
  auto& rep = out.report;
  for (auto seed : seeds(c)) {
    const std::string tag = label("seed", double(seed));
    const SimState init = initial_state(c, seed, c.params);
    double dt = 0;
    const RunResult r = solve(c, init, c.T, dt);
    note_dt(out, dt);
    write_run_artifacts(c, r, tag, out);
    check_existence(rep, tag, r, c.T);
    const double a = c.params.a, nu = c.params.nu;
    const auto& st = r.steps;
    const double tau0 = std::sqrt(st.front().tau_sq), u0 = st.front().u_sq, t0 = st.front().tau_sq;
    double worst = 0;
    size_t wi = 0;
    double eratio = 0, elhs = 0, erhs = 0;
    for (size_t i = 0; i < st.size(); ++i) {
      const double e = std::exp(-a * st[i].t);
      const double err = tau0 > 0 ? std::abs(std::sqrt(st[i].tau_sq) / tau0 - e) / e : 0.0;
      if (err > worst) {
        worst = err;
        wi = i;
      }
      const double G = gamma_fn(a, nu, st[i].t);
      const double lhs = st[i].u_sq + nu * st[i].int_grad_u_sq, rhs = u0 + t0 * G * G;
      const double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
      if (i == 0 || ratio > eratio) {
        eratio = ratio;
        elhs = lhs;
        erhs = rhs;
      }
    }
    rep.add(record("tau_L2_decay/" + tag, "||tau(t)||_2 = e^{-at} ||tau0||_2", worst, 1e-6, 0, 1e-6, worst <= 1e-6,
                   "max relative error over steps, worst at t=" + format_double(st[wi].t)));
    rep.add(record("energy_mu0/" + tag, "||u(t)||^2 + nu int_0^t ||grad u||^2 <= ||u0||^2 + ||tau0||^2 Gamma(t)^2",
                   elhs, erhs, 0, 0.01, elhs <= erhs * 1.01, "worst step"));
    check_invariants(rep, tag, r);
  }
}

void energy(const ExperimentConfig& c, ExperimentOutcome& out) {
  auto& rep = out.report;
  const double a = c.params.a, nu = c.params.nu, mu = c.params.mu;
  for (auto seed : seeds(c)) {
    const std::string tag = label("seed", double(seed));
    const SimState init = initial_state(c, seed, c.params);
    double dt = 0;
    const RunResult r = solve(c, init, c.T, dt);
    note_dt(out, dt);
    write_run_artifacts(c, r, tag, out);
    check_existence(rep, tag, r, c.T);
    const double e0 = mu * r.steps.front().u_sq + r.steps.front().tau_sq;
    double wl = 0;
    for (const auto& st : r.steps)
      wl = std::max(wl, mu * st.u_sq + st.tau_sq + 2 * a * st.int_tau_sq + 2 * nu * mu * st.int_grad_u_sq);
    rep.add(record("energy_mu/" + tag,
                   "mu||u||^2 + ||tau||^2 + 2a int||tau||^2 + 2 nu mu int||grad u||^2 <= mu||u0||^2 + ||tau0||^2", wl,
                   e0, 0, 0.01, wl <= e0 * 1.01, "max of the left side over steps"));
    check_invariants(rep, tag, r);
  }
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  return (sxx > 0 && syy > 0) ? sxy * sxy / (sxx * syy) : 1.0;
}

void lipschitz(const ExperimentConfig& c, const Calibration& cal, ExperimentOutcome& out) {
  auto& rep = out.report;
  const double C = cal.lipschitz;
  for (auto seed : seeds(c)) {
    const std::string tag = label("seed", double(seed));
    const LipschitzMeasurement m = measure_lipschitz(c, seed);
    note_dt(out, m.dt);
    write_run_artifacts(c, m.run, tag, out);
    check_existence(rep, tag, m.run, c.T);
    const BoundParams bp{m.nu, m.a, 0, C};
    const double u1 = upsilon1(m.T, bp, m.norms);
    rep.add(record("lipschitz_u/" + tag, "nu int_0^T ||u||_{B^1_{inf,1}} <= Upsilon1(T)", m.nu_int_B1, u1, C, 0,
                   m.nu_int_B1 <= u1));
    const double tb = tau_besov_bound(m.T, bp, m.norms);
    rep.add(record("tau_besov/" + tag, "||tau(T)||_{B^{2/p}_{p,1}} <= ||tau0||_{B^{2/p}_{p,1}} exp{C Upsilon1(T) / nu}",
                   m.tau_Bp_T, tb, C, 0, m.tau_Bp_T <= tb));
  }

  // frozen shear: mean growth over the data sets against m T
  std::string csv = "seed,m,growth,envelope\n";
  std::vector<double> mean(c.shear.size(), 0.0), x;
  for (double m : c.shear) x.push_back(m * c.T);
  for (auto seed : seeds(c)) {
    const auto g = shear_growth(c, seed);
    for (size_t i = 0; i < g.size(); ++i) {
      const double env = std::exp(cal.transport * x[i]);
      csv += std::to_string(seed) + "," + format_double(c.shear[i]) + "," + format_double(g[i]) + "," +
             format_double(env) + "\n";
      mean[i] += g[i] / c.count;
      rep.add(record("shear_envelope/" + label("seed", double(seed)) + "/" + label("m", c.shear[i]),
                     "||tau(T)||_{B^0_{inf,1}} / ||tau0||_{B^0_{inf,1}} < e^{C m T}", g[i], env, cal.transport, 0,
                     g[i] < env));
    }
  }
  const std::string path = path_in(c, "shear.csv");
  write_file(path, csv);
  out.artifacts.push_back(path);
  const double r2 = r_squared(x, mean);
  rep.add(record("shear_linear_growth", "||tau(T)||_{B^0_{inf,1}} / ||tau0|| = alpha + beta m T, R^2 of the fit", r2,
                 0.95, 0, 0, r2 >= 0.95, "mean growth over the data sets"));
}

void picard(const ExperimentConfig& c, const Calibration& cal, ExperimentOutcome& out) {
  auto& rep = out.report;
  for (auto seed : seeds(c)) {
    const std::string tag = label("seed", double(seed));
    const SimState init = initial_state(c, seed, c.params);
    const double dt = resolve_dt(c, init);
    note_dt(out, dt);
    const Horizon h = smallness_horizon(init, cal.stokes, c.epsilon, dt, c.T, c.diag_p);
    rep.add(record("picard_horizon/" + tag,
                   "C ||u_L||^2_{L^2 B^{d/p}_{p,1}} + C T ||tau0||_{B^{d/p}_{p,1}} e^{nu/2} <= nu eps / (100 C)", h.lhs,
                   h.rhs, cal.stokes, 0, h.lhs <= h.rhs, "T=" + format_double(h.T)));
    PicardConfig pc;
    pc.T = h.T;
    pc.dt = dt;
    pc.n_max = c.picard_n_max;
    pc.p = c.diag_p;
    pc.C = cal.stokes;
    pc.epsilon = c.epsilon;
    PicardResult pr;
    try {
      pr = picard_solve(init, pc);
    } catch (const HorizonTooLarge& e) {
      rep.add(record("picard_contraction/" + tag, "delta U^n <= 1/2 delta U^{n-1}", kInf, 0.55, cal.stokes, 0.05,
                     false, e.what()));
      continue;
    }
    const std::string path = path_in(c, "picard_" + tag + ".csv");
    write_file(path, pr.csv());
    out.artifacts.push_back(path);

    double worst = 0;
    int finite = 0;
    for (const auto& it : pr.iterates)
      if (it.n >= 2 && std::isfinite(it.ratio)) {
        worst = std::max(worst, it.ratio);
        ++finite;
      }
    rep.add(record("picard_contraction/" + tag, "delta U^n <= 1/2 delta U^{n-1}", worst, 0.55, cal.stokes, 0.05,
                   worst <= 0.55,
                   std::to_string(finite) + " ratios above the roundoff floor for n >= 2"));

    double growth = 0, allowed = 1, worst_q = -1;
    for (const auto& it : pr.iterates)
      if (it.n >= 1) {
        const double env = std::exp(cal.transport * it.drift_int);
        if (it.tau_growth / env > worst_q) {
          worst_q = it.tau_growth / env;
          growth = it.tau_growth;
          allowed = env;
        }
      }
    const bool grow_ok = growth <= allowed * (1 + 1e-12);
    rep.add(record("picard_tau_transport/" + tag,
                   "||tau^n(t)||_{B^{d/p}_{p,1}} <= ||tau0|| e^{-at} exp{C int ||grad u^{n-1}||_{B^0_{inf,1}}}", growth,
                   allowed, cal.transport, 1e-12, grow_ok, "worst iterate"));

    RunConfig rc;
    rc.T = h.T;
    rc.dt = dt;
    rc.sample_every = c.sample_every;
    rc.diag.p = c.diag_p;
    const RunResult direct = run(init, rc);
    write_run_artifacts(c, direct, tag, out);
    check_existence(rep, tag, direct, h.T);
    const VectorSpectrumd uT = forward(direct.final_state.u);
    double diff = 0;
    for (size_t a = 0; a < uT.size(); ++a) diff += l2_squared(Spectrumd(uT[a].grid, uT[a].c - pr.u.back()[a].c));
    diff = std::sqrt(diff);
    const double dlast = pr.iterates.back().delta;
    const double tol = 10 * (dt * dt + dlast);
    rep.add(record("picard_vs_direct/" + tag, "||u^{n_max}(T) - u(T)||_2 <= 10 (dt^2 + delta U^{n_max})", diff, tol,
                   0, 0, diff <= tol));
  }
}

void lorentz3d(const ExperimentConfig& c, const Calibration& cal, ExperimentOutcome& out) {
  auto& rep = out.report;
  for (auto seed : seeds(c)) {
    const std::string tag = label("seed", double(seed));
    const LorentzMeasurement m = measure_lorentz(c, seed);
    note_dt(out, m.dt);
    write_run_artifacts(c, m.run, tag, out);
    check_existence(rep, tag, m.run, c.T);
    const double rhs = cal.lorentz * (m.u0 + m.tau0 / m.nu);
    rep.add(record("lorentz_u/" + tag, "sup_t ||u||_{L^{3,inf}} <= C (||u0||_{L^{3,inf}} + ||tau0||_{L^{3/2,inf}} / nu)",
                   m.sup_u, rhs, cal.lorentz, 0, m.sup_u <= rhs,
                   "data scaled by " + format_double(m.scale) + " to the smallness condition"));
    rep.add(record("lorentz_tau/" + tag, "sup_t ||tau||_{L^{3/2,inf}} = ||tau0||_{L^{3/2,inf}}", m.sup_tau,
                   m.tau0 * (1 + 1e-4), 0, 1e-4, m.sup_tau <= m.tau0 * (1 + 1e-4)));
  }
}

void noncorot(const ExperimentConfig& c, const Calibration& cal, ExperimentOutcome& out) {
  auto& rep = out.report;
  std::vector<double> mus = c.mu_values.empty() ? std::vector<double>{c.params.mu} : c.mu_values;
  std::sort(mus.begin(), mus.end());
  std::vector<double> bounds;
  std::string csv = "mu,lower_bound,observed,blew_up\n";
  for (double mu : mus) {
    Params p = c.params;
    p.mu = mu;
    const std::string tag = label("mu", mu);
    const SimState init = initial_state(c, c.init.seed, p);
    const InitialNorms n = initial_norms(init, 2);
    const double lb = lifespan_lower_bound(BoundParams{p.nu, p.a, mu, cal.lipschitz}, n);
    bounds.push_back(lb);
    const double T_run = std::isfinite(lb) ? std::max(c.T, 1.01 * lb) : c.T;
    double dt = 0;
    const RunResult r = solve(c, init, T_run, dt, true);
    note_dt(out, dt);
    write_run_artifacts(c, r, tag, out);
    const double observed = r.blew_up ? r.blowup_time : r.final_state.t;
    csv += format_double(mu) + "," + format_double(lb) + "," + format_double(observed) + "," +
           (r.blew_up ? "1" : "0") + "\n";
    rep.add(record("lifespan/" + tag, "T_lower(mu) <= T_observed", lb, observed, cal.lipschitz, 0, observed >= lb,
                   r.blew_up ? "blow-up observed" : "no blow-up up to the run horizon"));
  }
  const std::string path = path_in(c, "lifespan.csv");
  write_file(path, csv);
  out.artifacts.push_back(path);
  if (bounds.size() > 1) {
    double worst = 0;
    bool ok = true;
    for (size_t i = 1; i < bounds.size(); ++i) {
      const double q = bounds[i] / bounds[i - 1];
      worst = std::max(worst, q);
      if (!(bounds[i] < bounds[i - 1])) ok = false;
    }
    rep.add(record("lifespan_monotone", "T_lower(mu) strictly decreasing in mu", worst, 1, cal.lipschitz, 0, ok,
                   "largest ratio of consecutive bounds"));
  }
}

void lifespan(const ExperimentConfig& c, ExperimentOutcome& out) {
  auto& rep = out.report;
  for (double g : {0.5, 1.0, 2.0, 4.0}) {
    const GronwallResult r = gronwall_lifespan({1.0}, {0.0}, {g}, {});
    const double exact = std::sqrt(2 / g);
    const double err = std::abs(r.T_max - exact) / exact;
    rep.add(record("gronwall_constant/" + label("c", g), "T_max = sqrt(2/c) for g2 = 0, g3 = c", err, 1e-8, 0, 1e-8,
                   err <= 1e-8, "T_max=" + format_double(r.T_max)));
  }
  std::mt19937_64 rng(c.init.seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::string csv = "triple,t,extremal,bound\n";
  for (int i = 0; i < 10; ++i) {
    const Polynomial g1{0, U(rng), U(rng)};
    const Polynomial g2{U(rng), U(rng)};
    const Polynomial g3{U(rng), U(rng), U(rng)};
    const double Tm = gronwall_lifespan(g1, g2, g3, {}).T_max;
    const double T = 0.99 * Tm;
    const GronwallCurve f = gronwall_extremal(g1, g2, g3, T, 2000);
    const GronwallResult b = gronwall_lifespan(g1, g2, g3, f.t);
    double worst = 0;
    for (size_t k = 0; k < f.t.size(); ++k) {
      if (k % 20 == 0)
        csv += std::to_string(i) + "," + format_double(f.t[k]) + "," + format_double(f.f[k]) + "," +
               format_double(b.bound[k]) + "\n";
      if (f.f[k] == 0 && b.bound[k] == 0) continue;
      worst = std::max(worst, f.f[k] / b.bound[k]);
    }
    const bool reached = f.t.back() >= T * (1 - 1e-12);
    rep.add(record("gronwall_domination/" + std::to_string(i), "f(t) <= g1 / (1 - K(t)) exp{int_0^t g2}", worst, 1, 0,
                   1e-9, reached && worst <= 1 + 1e-9,
                   reached ? "T_max=" + format_double(Tm) : "extremal blew up before 0.99 T_max"));
  }
  const std::string path = path_in(c, "gronwall.csv");
  write_file(path, csv);
  out.artifacts.push_back(path);
}

void toolbox(const ExperimentConfig& c, ExperimentOutcome& out) {
  auto& rep = out.report;
  const Gridd g = c.grid();
  const Partitiond P = build_partition(g);
  const ArrayXd cov = P.coverage();
  double worst = 0;
  for (Index i = 0; i < cov.size(); ++i)
    if (P.radius(i) >= P.covered_lo() && P.radius(i) <= P.covered_hi())
      worst = std::max(worst, std::abs(cov(i) - 1));
  rep.add(record("partition_of_unity", "sum_q phi(2^{-q} xi) = 1 on the covered shell", worst, 1e-12, 0, 1e-12,
                 worst <= 1e-12));
  double overlap = 0;
  for (int q = P.q_min; q <= P.q_max; ++q)
    for (int j = q + 2; j <= P.q_max; ++j) overlap = std::max(overlap, (P.block(q) * P.block(j)).abs().maxCoeff());
  rep.add(record("block_orthogonality", "phi_q phi_j = 0 for |q - j| >= 2", overlap, 0, 0, 0, overlap == 0));

  std::mt19937_64 rng(c.init.seed);
  auto band_pair_member = [&] {
    Fieldd f(g);
    for (int q = P.q_min + 1; q <= P.q_max - 1; ++q) f.v += random_block(P, q, rng).v;
    f.v /= f.v.abs().maxCoeff();
    return f;
  };
  const Fieldd f0 = band_pair_member();
  const Spectrumd fs = forward(f0);
  double dd = 0;
  for (int q = P.q_min; q <= P.q_max; ++q)
    for (int j = q + 2; j <= P.q_max; ++j)
      dd = std::max(dd, inverse(multiply(multiply(fs, P.block(j)), P.block(q))).v.abs().maxCoeff());
  rep.add(record("block_products", "Delta_q Delta_j f = 0 for |q - j| >= 2", dd, 0, 0, 0, dd == 0));

  for (int k = 0; k < 5; ++k) {
    const Fieldd f = band_pair_member(), h = band_pair_member();
    const auto parts = bony_decompose(f, h, P);
    const double res = (parts.Tfg.v + parts.Tgf.v + parts.R.v - f.v * h.v).abs().maxCoeff();
    rep.add(record("bony/" + std::to_string(k), "fg = T_f g + T_g f + R(f, g)", res, 1e-10, 0, 1e-10, res <= 1e-10,
                   "sup-normalised band-limited pair"));
  }

  std::string csv = "p,q,c,C\n";
  const double c_min = 0.9 * 9.0 / 16.0;
  for (double p : {2.0, 4.0, kInf})
    for (int q = std::max(0, P.q_min); q <= std::min(4, P.q_max); ++q) {
      const DecayFit<double> fit = measure_block_decay(P, q, p, 1.0, 3, c.init.seed + 1000 * q);
      csv += format_double(p) + "," + std::to_string(q) + "," + format_double(fit.c) + "," + format_double(fit.C) + "\n";
      const std::string tag = "p" + format_double(p) + "/q" + std::to_string(q);
      rep.add(record("heat_decay_rate/" + tag, "||e^{t Lap} Delta_q f||_p <= C e^{-c t 4^q} ||Delta_q f||_p, c", fit.c,
                     c_min, 0, 0, fit.c >= c_min, "lower limit 0.9 (3/4)^2"));
      rep.add(record("heat_decay_constant/" + tag, "||e^{t Lap} Delta_q f||_p <= C e^{-c t 4^q} ||Delta_q f||_p, C",
                     fit.C, 1.1, 0, 0, fit.C <= 1.1));
    }
  const std::string path = path_in(c, "heat_decay.csv");
  write_file(path, csv);
  out.artifacts.push_back(path);
}

}  // namespace

SimState initial_state(const ExperimentConfig& c, std::uint64_t seed, const Params& p) {
  InitialDataSpec spec = c.init;
  spec.seed = seed;
  return make_initial(c.grid(), p, spec);
}

ExperimentOutcome run_experiment(const ExperimentConfig& c, const Calibration& cal) {
  c.validate();
  if (!c.sweep.empty()) throw ConfigError("run_experiment takes one configuration; expand the sweep first");
  std::error_code ec;
  fs::create_directories(c.output, ec);
  if (ec) throw RuntimeFailure(c.output + ": cannot create output directory: " + ec.message());
  ExperimentOutcome out;
  out.report.experiment = c.experiment;
  out.report.environment = environment(c);
  out.report.calibration = calibration_json(cal);
  const std::string& e = c.experiment;
  if (e == "decay")
    decay(c, out);
  else if (e == "energy")
    energy(c, out);
  else if (e == "lipschitz")
    lipschitz(c, cal, out);
  else if (e == "picard")
    picard(c, cal, out);
  else if (e == "lorentz3d")
    lorentz3d(c, cal, out);
  else if (e == "noncorot")
    noncorot(c, cal, out);
  else if (e == "lifespan")
    lifespan(c, out);
  else
    toolbox(c, out);
  const std::string path = path_in(c, "report.json");
  emit_report(out.report, path);
  out.artifacts.push_back(path);
  return out;
}

int exit_status(const ExperimentOutcome& o) { return o.pass() ? 0 : 1; }

LipschitzMeasurement measure_lipschitz(const ExperimentConfig& c, std::uint64_t seed) {
  LipschitzMeasurement m;
  const SimState init = initial_state(c, seed, c.params);
  m.run = solve(c, init, c.T, m.dt);
  m.norms = initial_norms(init, c.diag_p);
  m.T = c.T;
  m.nu = c.params.nu;
  m.a = c.params.a;
  m.blew_up = m.run.blew_up;
  m.nu_int_B1 = m.nu * m.run.samples.back().int_u_B_inf1_1;
  m.tau_Bp_T = m.run.samples.back().tau_B_p1_dp;
  return m;
}

double lipschitz_required_C(const LipschitzMeasurement& m) {
  if (m.blew_up) return kInf;
  auto ok = [&](double C) {
    const BoundParams bp{m.nu, m.a, 0, C};
    return m.nu_int_B1 <= upsilon1(m.T, bp, m.norms) && m.tau_Bp_T <= tau_besov_bound(m.T, bp, m.norms);
  };
  double lo = 1e-6, hi = 1e3;
  if (ok(lo)) return lo;
  if (!ok(hi)) return kInf;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> shear_growth(const ExperimentConfig& c, std::uint64_t seed) {
  const Gridd g(2, c.shear_N, c.L);
  const Partitiond P = build_partition(g);
  InitialDataSpec spec = c.init;
  spec.kind = "single-block";
  spec.block = 0;
  spec.seed = seed;
  const SimState s = make_initial(g, c.params, spec);
  const SpectralState y = to_spectral(s);
  const double b0 = measure(y, P, 2, 0).tau_B_inf1_0;
  const double m_max = *std::max_element(c.shear.begin(), c.shear.end());
  double dt = std::min(c.dt > 0 ? c.dt : 0.01, 0.25 * g.spacing() / m_max);
  const long K = static_cast<long>(std::ceil(c.T / dt - 1e-9));
  std::vector<double> times;
  for (long k = 0; k <= K; ++k) times.push_back(c.T * double(k) / double(K));
  std::vector<double> out;
  const double w = 2 * std::numbers::pi / c.L;
  for (double m : c.shear) {
    VectorFieldd u;
    u.c.push_back(sample(g, [&](const Point<double>& x) { return m * std::sin(w * x[1]); }));
    u.c.push_back(Fieldd(g));
    u.divergence_free = true;
    const VectorSpectrumd us = forward(u);
    const Trajectory tr = transport_tau(y.tau, Trajectory(times.size(), us), c.params, times);
    out.push_back(measure(SpectralState{us, tr.back()}, P, 2, c.T).tau_B_inf1_0 / b0);
  }
  return out;
}

double transport_required_C(const ExperimentConfig& c, const std::vector<double>& growth) {
  double C = 0;
  for (size_t i = 0; i < growth.size(); ++i) C = std::max(C, std::log(std::max(growth[i], 1.0)) / (c.shear[i] * c.T));
  return C;
}

LorentzMeasurement measure_lorentz(const ExperimentConfig& c, std::uint64_t seed) {
  LorentzMeasurement m;
  m.nu = c.params.nu;
  SimState init = initial_state(c, seed, c.params);
  const Gridd& g = init.grid();
  const int d = g.dim();
  const double uw = weak_lp_norm(init.u, double(d)).value, tw = weak_lp_norm(init.tau, d / 2.0).value;
  const double size = uw + tw / m.nu;
  m.scale = size > 0 ? c.epsilon * m.nu / size : 1.0;
  for (auto& f : init.u.c) f.v *= m.scale;
  for (auto& f : init.tau.e) f.v *= m.scale;
  m.run = solve(c, init, c.T, m.dt);
  m.blew_up = m.run.blew_up;
  m.u0 = m.run.samples.front().u_weak_d;
  m.tau0 = m.run.samples.front().tau_weak_d2;
  for (const auto& s : m.run.samples) {
    m.sup_u = std::max(m.sup_u, s.u_weak_d);
    m.sup_tau = std::max(m.sup_tau, s.tau_weak_d2);
  }
  return m;
}

double lorentz_required_C(const LorentzMeasurement& m) {
  if (m.blew_up) return kInf;
  const double den = m.u0 + m.tau0 / m.nu;
  return den > 0 ? m.sup_u / den : 0.0;
}

double stokes_required_C(const ExperimentConfig& c, std::uint64_t seed) {
  const SimState init = initial_state(c, seed, c.params);
  const Gridd& g = init.grid();
  const double p = c.diag_p, d = g.dim(), nu = c.params.nu;
  const Partitiond P = build_partition(g);
  const SpectralState y = to_spectral(init);
  const long K = std::max<long>(1, static_cast<long>(std::ceil(c.T / 1e-3 - 1e-9)));
  std::vector<double> times;
  for (long k = 0; k <= K; ++k) times.push_back(c.T * double(k) / double(K));
  const auto tn = trajectory_blocks(linear_stokes_u_L(y.u, nu, times), times, P, p);
  const double sup = chemin_lerner_norm<double>(tn, kInf, {d / p - 1, p, 1});
  const double integral = chemin_lerner_norm<double>(tn, 1.0, {d / p + 1, p, 1});
  const double u0 = besov_from_blocks<double>(block_norms(y.u, P, {p}).col(0).array(), P.q_min, d / p - 1, 1.0);
  return u0 > 0 ? (sup + nu * integral) / u0 : 0.0;
}

Calibration calibrate(const ExperimentConfig& lipschitz, const ExperimentConfig& lorentz,
                      const ExperimentConfig& picard, std::uint64_t seed, int count, double margin) {
  Calibration cal;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    cal.lipschitz = std::max(cal.lipschitz, lipschitz_required_C(measure_lipschitz(lipschitz, s)));
    cal.transport = std::max(cal.transport, transport_required_C(lipschitz, shear_growth(lipschitz, s)));
    cal.lorentz = std::max(cal.lorentz, lorentz_required_C(measure_lorentz(lorentz, s)));
    cal.stokes = std::max(cal.stokes, stokes_required_C(picard, s));
  }
  cal.lipschitz *= margin;
  cal.transport *= margin;
  cal.lorentz *= margin;
  cal.stokes *= margin;
  return cal;
}

GronwallCurve gronwall_extremal(const Polynomial& g1, const Polynomial& g2, const Polynomial& g3, double T,
                                int steps) {
  // state (H, F) with H = int g2 f, F = int f^2 and f = g1 + H + g3 F
  auto f = [&](double t, double H, double F) { return poly_eval(g1, t) + H + poly_eval(g3, t) * F; };
  auto rhs = [&](double t, double H, double F) {
    const double v = f(t, H, F);
    return std::pair{poly_eval(g2, t) * v, v * v};
  };
  GronwallCurve out;
  double H = 0, F = 0;
  const double h = T / steps;
  out.t.push_back(0);
  out.f.push_back(f(0, 0, 0));
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const auto [a1, b1] = rhs(t, H, F);
    const auto [a2, b2] = rhs(t + h / 2, H + h / 2 * a1, F + h / 2 * b1);
    const auto [a3, b3] = rhs(t + h / 2, H + h / 2 * a2, F + h / 2 * b2);
    const auto [a4, b4] = rhs(t + h, H + h * a3, F + h * b3);
    H += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    F += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    const double v = f((k + 1) * h, H, F);
    if (!std::isfinite(v)) break;
    out.t.push_back((k + 1) * h);
    out.f.push_back(v);
  }
  return out;
}

}  // namespace oldb
