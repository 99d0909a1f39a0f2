#include "oldb/solver.hpp"

#include <cmath>

namespace oldb {

void Params::validate() const {
  if (!(nu > 0)) throw ConfigError("params.nu must be positive");
  if (!(a >= 0)) throw ConfigError("params.a must be >= 0");
  if (!(mu >= 0)) throw ConfigError("params.mu must be >= 0");
  if (!(b >= -1 && b <= 1)) throw ConfigError("params.b must lie in [-1, 1]");
  if (friedrichs_n < 0) throw ConfigError("params.friedrichs_n must be >= 0");
}

int sym_count(int d) { return d * (d + 1) / 2; }

int sym_index(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

SpectralState to_spectral(const SimState& s) {
  const int d = s.grid().dim();
  SpectralState y;
  y.u = forward(s.u);
  y.tau.resize(sym_count(d));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Fieldd e(s.grid());
      e.v = 0.5 * (s.tau(i, j).v + s.tau(j, i).v);
      y.tau[sym_index(d, i, j)] = forward(e);
    }
  return y;
}

SimState to_physical(const SpectralState& y, const Params& p, double t) {
  const Gridd& g = y.u.front().grid;
  const int d = g.dim();
  SimState s;
  s.t = t;
  s.params = p;
  s.u = inverse(y.u);
  s.u.divergence_free = true;
  s.tau = TensorFieldd(g);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      s.tau(i, j) = inverse(y.tau[sym_index(d, i, j)]);
      if (j != i) s.tau(j, i) = s.tau(i, j);
    }
  s.tau.symmetric = true;
  return s;
}

BlowUp::BlowUp(double t, SimState last)
    : RuntimeFailure("solution blew up at t=" + std::to_string(t)), time(t), last_valid(std::move(last)) {}

Integrator::Integrator(const Gridd& g, const Params& p) : g_(g), p_(p) {
  p_.validate();
  dealias_ = dealias_mask(g_);
  if (p_.friedrichs_n > 0) friedrichs_ = friedrichs_mask(g_, p_.friedrichs_n);
}

SpectralState Integrator::nonlinear(const SpectralState& y, double* max_u, double* skew, Parts parts) const {
  const int d = g_.dim(), m = sym_count(d);
  const Index n = g_.size();
  const bool trunc = p_.friedrichs_n > 0;
  const bool want_u = parts & Velocity, want_tau = parts & Stress;

  std::vector<Spectrumd> uf = y.u;
  if (trunc)
    for (auto& c : uf) c = multiply(c, friedrichs_);

  std::vector<Fieldd> u(d), G(d * d), T(m), dT(m * d);
  for (int a = 0; a < d; ++a) u[a] = inverse(y.u[a]);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G[i * d + j] = inverse(derivative(uf[i], j));
  if (want_tau)
    for (int e = 0; e < m; ++e) {
      T[e] = inverse(y.tau[e]);
      for (int k = 0; k < d; ++k) dT[e * d + k] = inverse(derivative(y.tau[e], k));
    }

  std::vector<Fieldd> Nt(want_tau ? m : 0, Fieldd(g_)), Nu(want_u ? d : 0, Fieldd(g_));
  ArrayXd skew_density(n), umag(n), gmag(n);
  int idx[3][3];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) idx[i][j] = sym_index(d, i, j);
  const double b = p_.b;

#pragma omp parallel for schedule(static)
  for (Index x = 0; x < n; ++x) {
    double w[3][3], D[3][3], t[3][3], c[3][3], s[3][3];
    double u2 = 0, g2 = 0;
    for (int i = 0; i < d; ++i) {
      u2 += u[i].v(x) * u[i].v(x);
      for (int j = 0; j < d; ++j) {
        const double gij = G[i * d + j].v(x), gji = G[j * d + i].v(x);
        g2 += gij * gij;
        w[i][j] = 0.5 * (gij - gji);
        D[i][j] = 0.5 * (gij + gji);
        t[i][j] = want_tau ? T[idx[i][j]].v(x) : 0.0;
      }
    }
    // c = tau w - w tau, s = D tau + tau D
    double sk = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double cij = 0, sij = 0;
        for (int k = 0; k < d; ++k) {
          cij += t[i][k] * w[k][j] - w[i][k] * t[k][j];
          sij += D[i][k] * t[k][j] + t[i][k] * D[k][j];
        }
        c[i][j] = cij;
        s[i][j] = sij;
        sk += cij * t[i][j];
      }
    for (int i = 0; i < d && want_tau; ++i)
      for (int j = i; j < d; ++j) {
        const int e = idx[i][j];
        double adv = 0;
        for (int k = 0; k < d; ++k) adv += u[k].v(x) * dT[e * d + k].v(x);
        Nt[e].v(x) = -adv - c[i][j] - b * s[i][j];
      }
    for (int i = 0; i < d && want_u; ++i) {
      double adv = 0;
      for (int j = 0; j < d; ++j) adv += u[j].v(x) * G[i * d + j].v(x);
      Nu[i].v(x) = -adv;
    }
    skew_density(x) = sk;
    umag(x) = u2;
    gmag(x) = g2;
  }

  SpectralState out;
  const double mu = p_.mu;
  for (int i = 0; i < d && want_tau; ++i)
    for (int j = i; j < d; ++j) {
      Spectrumd r = multiply(forward(Nt[idx[i][j]]), dealias_);
      if (mu != 0) r.c += (0.5 * mu) * (derivative(uf[i], j).c + derivative(uf[j], i).c);
      out.tau.push_back(std::move(r));
    }
  for (int i = 0; i < d && want_u; ++i) {
    Spectrumd r = multiply(forward(Nu[i]), dealias_);
    Spectrumd div(g_);
    for (int j = 0; j < d; ++j) div.c += derivative(y.tau[idx[i][j]], j).c;
    r.c += div.c;
    if (trunc) r = multiply(r, friedrichs_);
    out.u.push_back(std::move(r));
  }
  if (want_u) {
    leray_in_place(out.u);
    for (auto& c : out.u) c.c(0) = 0;
  }

  if (max_u) *max_u = std::sqrt(umag.maxCoeff());
  if (skew) {
    double tau_sq = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) tau_sq += l2_squared(y.tau[idx[i][j]]);
    const double gi = std::sqrt(gmag.maxCoeff());
    const double num = std::abs(skew_density.sum() * g_.cell_volume());
    *skew = (gi > 0 && tau_sq > 0) ? num / (gi * tau_sq) : 0.0;
  }
  return out;
}

void Integrator::project(SpectralState& y) const {
  leray_in_place(y.u);
  for (auto& c : y.u) {
    c.c(0) = 0;
    c = multiply(c, dealias_);
    if (p_.friedrichs_n > 0) c = multiply(c, friedrichs_);
  }
  for (auto& c : y.tau) c = multiply(c, dealias_);
}

namespace {

bool finite(const SpectralState& y) {
  for (const auto& c : y.u)
    if (!c.c.allFinite()) return false;
  for (const auto& c : y.tau)
    if (!c.c.allFinite()) return false;
  return true;
}

}  // namespace

void Integrator::step(SpectralState& y, double& t, double dt) {
  if (!(dt > 0)) throw StepSizeError("time step must be positive");
  double umax = 0, skew = 0;
  const SpectralState N0 = nonlinear(y, &umax, &skew);
  if (!std::isfinite(umax) || (blowup_ref_ > 0 && umax > 1e6 * blowup_ref_))
    throw BlowUp(t, SimState{});
  const double limit = umax > 0 ? 0.5 * g_.spacing() / umax : std::numeric_limits<double>::infinity();
  if (dt > limit * (1 + 1e-12))
    throw StepSizeError("CFL violation: dt=" + std::to_string(dt) + " exceeds " + std::to_string(limit) +
                        " at t=" + std::to_string(t));

  const CArrayX<double> Eu = (-p_.nu * dt * g_.xi2()).exp().cast<std::complex<double>>();
  const double Et = std::exp(-p_.a * dt);
  const int d = g_.dim(), m = sym_count(d);

  SpectralState ys = y;
  for (int a = 0; a < d; ++a) ys.u[a].c = Eu * (y.u[a].c + dt * N0.u[a].c);
  for (int e = 0; e < m; ++e) ys.tau[e].c = Et * (y.tau[e].c + dt * N0.tau[e].c);
  const SpectralState N1 = nonlinear(ys);
  for (int a = 0; a < d; ++a) y.u[a].c = Eu * (y.u[a].c + 0.5 * dt * N0.u[a].c) + 0.5 * dt * N1.u[a].c;
  for (int e = 0; e < m; ++e) y.tau[e].c = Et * (y.tau[e].c + 0.5 * dt * N0.tau[e].c) + 0.5 * dt * N1.tau[e].c;
  project(y);
  if (!finite(y)) throw BlowUp(t + dt, SimState{});
  t += dt;
  inv_.divergence = divergence_ratio(y.u);
  inv_.skew = skew;
  inv_.symmetry = 0;
}

TensorFieldd rhs_tau(const SimState& s) {
  const Gridd& g = s.grid();
  Integrator I(g, s.params);
  const SpectralState y = to_spectral(s);
  const SpectralState N = I.nonlinear(y);
  SpectralState full = y;
  for (size_t e = 0; e < y.tau.size(); ++e) full.tau[e].c = N.tau[e].c - s.params.a * y.tau[e].c;
  return to_physical(full, s.params, s.t).tau;
}

VectorFieldd rhs_u(const SimState& s) {
  Integrator I(s.grid(), s.params);
  const SpectralState N = I.nonlinear(to_spectral(s));
  VectorFieldd r = inverse(N.u);
  r.divergence_free = true;
  return r;
}

double cfl_limit(const SimState& s) {
  const double umax = max_abs(magnitude(s.u));
  return umax > 0 ? 0.5 * s.grid().spacing() / umax : std::numeric_limits<double>::infinity();
}

SimState step(const SimState& s, double dt) {
  Integrator I(s.grid(), s.params);
  SpectralState y = to_spectral(s);
  double t = s.t;
  try {
    I.step(y, t, dt);
  } catch (const BlowUp& e) {
    throw BlowUp(e.time, s);
  }
  return to_physical(y, s.params, t);
}

}  // namespace oldb
