#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "oldb/initial_data.hpp"
#include "support.hpp"

using namespace oldb;
using namespace oldb::test;

namespace {

SimState zero_state(const Gridd& g, const Params& p) {
  SimState s;
  s.params = p;
  s.u = VectorFieldd(g);
  s.tau = TensorFieldd(g);
  return s;
}

SimState band_state(const Gridd& g, const Params& p, std::uint64_t seed, double ua = 0.5, double ta = 0.5) {
  InitialDataSpec spec;
  spec.seed = seed;
  spec.amplitude = ua;
  spec.tau_amplitude = ta;
  spec.q0 = 0;
  spec.q1 = 1;
  return make_initial(g, p, spec);
}

double tau_l2(const TensorFieldd& t) { return lp_norm(t, 2.0); }

}  // namespace

TEST_CASE("symmetric storage indices") {
  CHECK(sym_count(2) == 3);
  CHECK(sym_count(3) == 6);
  CHECK(sym_index(2, 0, 0) == 0);
  CHECK(sym_index(2, 1, 0) == 1);
  CHECK(sym_index(2, 1, 1) == 2);
  CHECK(sym_index(3, 0, 2) == 2);
  CHECK(sym_index(3, 1, 1) == 3);
  CHECK(sym_index(3, 2, 1) == 4);
  CHECK(sym_index(3, 2, 2) == 5);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((Params{0.0, 0, 0, 0, 0}).validate(), ConfigError);
  CHECK_THROWS_AS((Params{1.0, -1, 0, 0, 0}).validate(), ConfigError);
  CHECK_THROWS_AS((Params{1.0, 0, -0.1, 0, 0}).validate(), ConfigError);
  CHECK_THROWS_AS((Params{1.0, 0, 0, 1.5, 0}).validate(), ConfigError);
  CHECK_NOTHROW((Params{1.0, 0.5, 0.5, -1, 4}).validate());
}

TEST_CASE("tau right-hand side") {
  const Gridd g(2, 32, 2 * kPi);
  // u = 0: pure damping
  SimState s = zero_state(g, Params{1.0, 0.7, 0.3, 0.4, 0});
  s.tau = band_tensor(g, 5, 3);
  const TensorFieldd r = rhs_tau(s);
  for (int i = 0; i < 4; ++i) CHECK(linf(r.e[i].v + 0.7 * s.tau.e[i].v) < 1e-13);

  // locally rigid rotation at the origin, tau = diag(l1, l2)
  SimState rot = zero_state(g, Params{1.0, 0, 0, 0, 0});
  rot.u[0] = sample(g, [](const Point<double>& x) { return -std::sin(x[1]); });
  rot.u[1] = sample(g, [](const Point<double>& x) { return std::sin(x[0]); });
  const double l1 = 2.0, l2 = -0.5;
  rot.tau(0, 0).v.setConstant(l1);
  rot.tau(1, 1).v.setConstant(l2);
  const TensorFieldd rr = rhs_tau(rot);
  // w = [[0,-1],[1,0]] at the origin: w tau - tau w = (l1 - l2) [[0,1],[1,0]]
  CHECK(std::abs(rr(0, 0).v(0)) < 1e-13);
  CHECK(std::abs(rr(1, 1).v(0)) < 1e-13);
  CHECK(rr(0, 1).v(0) == doctest::Approx(l1 - l2).epsilon(1e-12));
  CHECK(rr(1, 0).v(0) == doctest::Approx(l1 - l2).epsilon(1e-12));

  // trace: d/dt tr tau = -u.grad tr tau - a tr tau when b = mu = 0
  for (int d : {2, 3}) {
    const Gridd h(d, 16, 2 * kPi);
    SimState t = zero_state(h, Params{1.0, 0.3, 0, 0, 0});
    t.u = band_vector(h, 2.5, 7);
    t.tau = band_tensor(h, 2.5, 8);
    const TensorFieldd rt = rhs_tau(t);
    Fieldd tr(h), rtr(h);
    for (int i = 0; i < d; ++i) {
      tr.v += t.tau(i, i).v;
      rtr.v += rt(i, i).v;
    }
    const VectorFieldd gt = gradient(tr);
    ArrayXd adv = ArrayXd::Zero(h.size());
    for (int k = 0; k < d; ++k) adv += t.u[k].v * gt[k].v;
    CHECK(linf(rtr.v + adv + 0.3 * tr.v) < 1e-12);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) CHECK(linf(rt(i, j).v - rt(j, i).v) == 0.0);
  }

  // mu D source with tau = 0
  SimState m = zero_state(g, Params{1.0, 0, 0.8, 0, 0});
  m.u = band_vector(g, 5, 9);
  const TensorFieldd rm = rhs_tau(m);
  const TensorFieldd D = deformation_tensor(m.u);
  for (int i = 0; i < 4; ++i) CHECK(linf(rm.e[i].v - 0.8 * D.e[i].v) < 1e-12);
}

TEST_CASE("velocity right-hand side") {
  const Gridd g(2, 32, 2 * kPi);
  // Taylor-Green: u.grad u is a gradient, so the projected nonlinearity vanishes
  InitialDataSpec tg;
  tg.kind = "taylor-green";
  tg.tau_amplitude = 0;
  const SimState s = make_initial(g, Params{}, tg);
  const VectorFieldd r = rhs_u(s);
  CHECK(linf(r[0].v) < 1e-13);
  CHECK(linf(r[1].v) < 1e-13);

  // constant isotropic stress is inert
  SimState c = s;
  for (int i = 0; i < 2; ++i) c.tau(i, i).v.setConstant(3.0);
  const VectorFieldd rc = rhs_u(c);
  CHECK(linf(rc[0].v) < 1e-13);

  // u = 0: P div tau
  SimState z = zero_state(g, Params{});
  z.tau = band_tensor(g, 6, 4);
  const VectorFieldd rz = rhs_u(z);
  VectorFieldd div(g);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) div[i].v += gradient(z.tau(i, j))[j].v;
  const VectorFieldd pd = leray_project(div);
  for (int i = 0; i < 2; ++i) CHECK(linf(rz[i].v - pd[i].v) < 1e-12);
  CHECK(divergence_ratio(forward(rz)) < 1e-12);

  // shear flow (sin y, 0) with tau = 0 is a steady nonlinear state
  SimState sh = zero_state(g, Params{});
  sh.u[0] = sample(g, [](const Point<double>& x) { return std::sin(x[1]); });
  CHECK(linf(rhs_u(sh)[0].v) < 1e-14);
}

TEST_CASE("exact decay modes") {
  const Gridd g(2, 32, 2 * kPi);
  SimState s = zero_state(g, Params{1.0, 0.9, 0, 0, 0});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.tau(i, j).v.setConstant(i == j ? 1.5 : -0.25);
  SimState cur = s;
  for (int k = 0; k < 10; ++k) cur = step(cur, 0.05);
  CHECK(cur.t == doctest::Approx(0.5));
  CHECK(linf(cur.u[0].v) == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(linf(cur.tau.e[i].v - std::exp(-0.45) * s.tau.e[i].v) < 1e-14);

  // single shear mode: nonlinearity vanishes, the integrating factor is exact
  SimState m = zero_state(g, Params{0.3, 0, 0, 0, 0});
  m.u[0] = sample(g, [](const Point<double>& x) { return 0.8 * std::cos(3 * x[1]); });
  RunConfig rc;
  rc.T = 1.0;
  rc.dt = 0.01;
  rc.sample_every = 50;
  const RunResult r = run(m, rc);
  CHECK(linf(r.final_state.u[0].v - std::exp(-0.3 * 9) * m.u[0].v) < 1e-10);
  CHECK(linf(r.final_state.u[1].v) < 1e-14);
}

TEST_CASE("second-order convergence") {
  const Gridd g(2, 32, 2 * kPi);
  const SimState s = band_state(g, Params{0.5, 0.2, 0.3, 0.2, 0}, 21, 1.0, 1.0);
  auto solve = [&](double dt) {
    RunConfig rc;
    rc.T = 0.4;
    rc.dt = dt;
    rc.sample_every = 1000;
    rc.track_invariants = false;
    return run(s, rc).final_state;
  };
  const SimState ref = solve(0.4 / 512);
  std::vector<double> err;
  for (double dt : {0.4 / 16, 0.4 / 32, 0.4 / 64}) {
    const SimState a = solve(dt);
    double e = 0;
    for (int i = 0; i < 2; ++i) e += (a.u[i].v - ref.u[i].v).square().sum();
    for (int i = 0; i < 4; ++i) e += (a.tau.e[i].v - ref.tau.e[i].v).square().sum();
    err.push_back(std::sqrt(e));
  }
  for (size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i - 1] / err[i];
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("step-size and blow-up signals") {
  const Gridd g(2, 32, 2 * kPi);
  SimState s = zero_state(g, Params{});
  s.u[0] = sample(g, [](const Point<double>& x) { return 10 * std::sin(x[1]); });
  CHECK(cfl_limit(s) == doctest::Approx(0.5 * g.spacing() / 10).epsilon(1e-3));
  CHECK_THROWS_AS(step(s, 0.05), StepSizeError);
  CHECK_NOTHROW(step(s, 0.009));

  SimState bad = s;
  bad.tau(0, 1).v(5) = std::numeric_limits<double>::quiet_NaN();
  bad.tau(1, 0).v(5) = bad.tau(0, 1).v(5);
  CHECK_THROWS_AS(step(bad, 0.001), BlowUp);
  try {
    step(bad, 0.001);
  } catch (const BlowUp& e) {
    CHECK(e.last_valid.grid().same_as(g));
  }
  RunConfig rc;
  rc.T = 0.01;
  rc.dt = 0.001;
  const RunResult r = run(bad, rc);
  CHECK(r.blew_up);
  CHECK(r.blowup_time > 0);
}

TEST_CASE("conformation norms decay exactly in the corotational case") {
  const Gridd g(2, 64, 2 * kPi);
  for (double a : {0.0, 1.0}) {
    const SimState s = band_state(g, Params{1.0, a, 0, 0, 0}, 3);
    RunConfig rc;
    rc.T = 0.5;
    rc.dt = 1e-3;
    rc.sample_every = 100;
    const RunResult r = run(s, rc);
    const double f = std::exp(-a * 0.5);
    CHECK(tau_l2(r.final_state.tau) == doctest::Approx(f * tau_l2(s.tau)).epsilon(1e-6));
    CHECK(lp_norm(r.final_state.tau, 4.0) == doctest::Approx(f * lp_norm(s.tau, 4.0)).epsilon(1e-2));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(lp_norm(r.final_state.tau, inf) == doctest::Approx(f * lp_norm(s.tau, inf)).epsilon(2e-2));
    CHECK(r.invariants.max_divergence <= 1e-10);
    CHECK(r.invariants.max_skew <= 1e-10);
    CHECK(r.invariants.max_symmetry == 0.0);
  }
}

TEST_CASE("energy estimates") {
  const Gridd g(2, 32, 2 * kPi);
  for (double a : {0.0, 0.5}) {
    const double nu = 0.7;
    const SimState s = band_state(g, Params{nu, a, 0, 0, 0}, 5, 0.8, 0.8);
    RunConfig rc;
    rc.T = 1;
    rc.dt = 2e-3;
    rc.sample_every = 25;
    const RunResult r = run(s, rc);
    const double u0 = r.steps.front().u_sq, t0 = r.steps.front().tau_sq;
    for (const auto& st : r.steps) {
      const double gamma2 = a > 0 ? -std::expm1(-2 * a * st.t) / (2 * a * nu) : st.t / nu;
      CHECK(st.u_sq + nu * st.int_grad_u_sq <= u0 + t0 * gamma2 + 1e-12);
    }
  }
  // mixed energy identity for mu > 0, b = 0, with and without the Friedrichs truncation
  for (int fn : {0, 6}) {
    const double nu = 0.7, a = 0.4, mu = 0.5;
    const SimState s = band_state(g, Params{nu, a, mu, 0, fn}, 6, 0.8, 0.8);
    RunConfig rc;
    rc.T = 1;
    rc.dt = 2e-3;
    rc.sample_every = 50;
    const RunResult r = run(s, rc);
    const double e0 = mu * r.steps.front().u_sq + r.steps.front().tau_sq;
    double worst = 0;
    for (const auto& st : r.steps) {
      const double lhs = mu * st.u_sq + st.tau_sq + 2 * a * st.int_tau_sq + 2 * nu * mu * st.int_grad_u_sq;
      worst = std::max(worst, std::abs(lhs - e0) / e0);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("diagnostics and checkpoints") {
  const Gridd g(2, 32, 2 * kPi);
  const SimState s = band_state(g, Params{1.0, 0.2, 0, 0, 0}, 8);
  RunConfig rc;
  rc.T = 0.2;
  rc.dt = 0.01;
  rc.sample_every = 5;
  rc.checkpoint_times = {0.1};
  rc.checkpoint_prefix = "ckpt_test";
  const RunResult r = run(s, rc);
  CHECK(r.diagnostics.rows.size() == 5);
  const std::string csv = r.diagnostics.csv();
  CHECK(csv.rfind("time,u_L2_sq,nu_int_grad_u_L2_sq,tau_L2,tau_Lp,u_B_inf1_m1,int_u_B_inf1_1,tau_B_inf1_0,"
                  "tau_B_p1_dp,u_weak_d,tau_weak_d2\n",
                  0) == 0);
  for (const auto& row : r.diagnostics.rows)
    for (double v : row) CHECK(v >= 0);
  const auto nuint = r.diagnostics.column("nu_int_grad_u_L2_sq");
  const auto bint = r.diagnostics.column("int_u_B_inf1_1");
  for (size_t i = 1; i < nuint.size(); ++i) {
    CHECK(nuint[i] >= nuint[i - 1]);
    CHECK(bint[i] >= bint[i - 1]);
  }
  CHECK_THROWS_AS(r.diagnostics.column("nope"), RangeError);

  RunConfig zero = rc;
  zero.T = 0;
  zero.checkpoint_times.clear();
  CHECK(run(s, zero).diagnostics.rows.size() == 1);

  REQUIRE(r.checkpoints.size() == 1);
  const SimState back = read_checkpoint(r.checkpoints[0]);
  CHECK(back.t == doctest::Approx(0.1));
  CHECK(back.params.a == 0.2);
  write_checkpoint(back, "ckpt_copy.oldb");
  const SimState again = read_checkpoint("ckpt_copy.oldb");
  for (int i = 0; i < 2; ++i) CHECK((again.u[i].v == back.u[i].v).all());
  for (int i = 0; i < 4; ++i) CHECK((again.tau.e[i].v == back.tau.e[i].v).all());
  std::ifstream f("ckpt_copy.oldb", std::ios::binary);
  char magic[4];
  f.read(magic, 4);
  CHECK(std::string(magic, 4) == "OLDB");
  f.seekg(0, std::ios::end);
  CHECK(static_cast<long>(f.tellg()) == 4 + 3 * 4 + 6 * 8 + 6 * 32 * 32 * 8);
  std::remove("ckpt_copy.oldb");
  std::remove(r.checkpoints[0].c_str());
  std::ofstream junk("junk.oldb");
  junk << "XXXX";
  junk.close();
  CHECK_THROWS_AS(read_checkpoint("junk.oldb"), RuntimeFailure);
  std::remove("junk.oldb");
}

TEST_CASE("initial data generators") {
  const Gridd g(2, 64, 2 * kPi);
  InitialDataSpec spec;
  spec.seed = 42;
  spec.amplitude = 0.3;
  spec.tau_amplitude = 0.2;
  spec.q0 = 1;
  spec.q1 = 2;
  const SimState a = make_initial(g, Params{}, spec), b = make_initial(g, Params{}, spec);
  CHECK((a.u[0].v == b.u[0].v).all());
  CHECK(rms(magnitude(a.u)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rms(frobenius(a.tau)) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(divergence_ratio(forward(a.u)) < 1e-12);
  CHECK(symmetry_defect(a.tau) == 0.0);
  const Partitiond P = build_partition(g);
  // spectrum confined to blocks 1..2
  const Spectrumd s0 = forward(a.u[0]);
  double outside = 0;
  for (Index i = 0; i < s0.c.size(); ++i) {
    const double r = P.radius(i);
    if (r < 0.75 * 2 || r > 8.0 / 3.0 * 4) outside = std::max(outside, std::abs(s0.c(i)));
  }
  CHECK(outside < 1e-15);
  spec.q1 = 9;
  CHECK_THROWS_AS(make_initial(g, Params{}, spec), ConfigError);
  spec.kind = "vortex";
  CHECK_THROWS_AS(make_initial(g, Params{}, spec), ConfigError);
  InitialDataSpec tg;
  tg.kind = "taylor-green";
  const SimState t = make_initial(Gridd(3, 16, 2 * kPi), Params{}, tg);
  CHECK(divergence_ratio(forward(t.u)) < 1e-14);
}
