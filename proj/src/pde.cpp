#include "slwlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slwlab/format.hpp"

namespace slwlab {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup: return "blowup";
    default: return "instability";
  }
}

namespace {

// Workspace confined to one evolve call; owns the transform plans.
struct Stepper {
  const ModelParams& p;
  const Grid1D grid;
  const double gamma;
  const bool dealias;
  Dft dft;
  std::vector<std::complex<double>> cu, cf;
  std::vector<double> lap, fnl;
  int keep;  // largest mode kept by the 2/3 rule

  Stepper(const ModelParams& p_, const Grid1D& g, double gamma_, bool dealias_)
      : p(p_), grid(g), gamma(gamma_), dealias(dealias_), dft(g.size),
        cu(static_cast<size_t>(g.size / 2 + 1)),
        cf(static_cast<size_t>(g.size / 2 + 1)),
        lap(static_cast<size_t>(g.size)), fnl(static_cast<size_t>(g.size)),
        keep(g.size / 3) {}

  // dv/dt into `dv`; du/dt is just v.  Also reports sum_j xi^2 |u_hat_j|^2
  // (raw DFT magnitudes) for the cheap per-step energy proxy.
  void rhs_v(const std::vector<double>& u, const std::vector<double>& v,
             std::vector<double>& dv) {
    const int M = grid.size;
    dft.forward(u.data(), cu.data());
    for (int j = 0; j <= M / 2; ++j) {
      const double xi = grid.xi(j);
      cu[static_cast<size_t>(j)] *= -xi * xi;
    }
    dft.inverse(cu.data(), lap.data());
    for (int i = 0; i < M; ++i)
      fnl[static_cast<size_t>(i)] =
          eval_nonlinearity(p, u[static_cast<size_t>(i)], v[static_cast<size_t>(i)]);
    if (dealias) {
      dft.forward(fnl.data(), cf.data());
      for (int j = keep + 1; j <= M / 2; ++j) cf[static_cast<size_t>(j)] = 0.0;
      dft.inverse(cf.data(), fnl.data());
    }
    const double g2 = gamma * gamma;
    for (int i = 0; i < M; ++i)
      dv[static_cast<size_t>(i)] = g2 * lap[static_cast<size_t>(i)] + fnl[static_cast<size_t>(i)];
  }
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct RkScratch {
  std::vector<double> ku1, kv1, ku2, kv2, ku3, kv3, ku4, kv4, tu, tv;
  explicit RkScratch(size_t n)
      : ku1(n), kv1(n), ku2(n), kv2(n), ku3(n), kv3(n), ku4(n), kv4(n), tu(n), tv(n) {}
};

// One classical RK4 step (u,v) -> (u2,v2).
void rk4_step(Stepper& st, RkScratch& w, const std::vector<double>& u,
              const std::vector<double>& v, double h, std::vector<double>& u2,
              std::vector<double>& v2) {
  const size_t n = u.size();
  // k1
  st.rhs_v(u, v, w.kv1);
  for (size_t i = 0; i < n; ++i) w.ku1[i] = v[i];
  // k2
  for (size_t i = 0; i < n; ++i) {
    w.tu[i] = u[i] + 0.5 * h * w.ku1[i];
    w.tv[i] = v[i] + 0.5 * h * w.kv1[i];
  }
  st.rhs_v(w.tu, w.tv, w.kv2);
  for (size_t i = 0; i < n; ++i) w.ku2[i] = w.tv[i];
  // k3
  for (size_t i = 0; i < n; ++i) {
    w.tu[i] = u[i] + 0.5 * h * w.ku2[i];
    w.tv[i] = v[i] + 0.5 * h * w.kv2[i];
  }
  st.rhs_v(w.tu, w.tv, w.kv3);
  for (size_t i = 0; i < n; ++i) w.ku3[i] = w.tv[i];
  // k4
  for (size_t i = 0; i < n; ++i) {
    w.tu[i] = u[i] + h * w.ku3[i];
    w.tv[i] = v[i] + h * w.kv3[i];
  }
  st.rhs_v(w.tu, w.tv, w.kv4);
  for (size_t i = 0; i < n; ++i) w.ku4[i] = w.tv[i];

  const double c = h / 6.0;
  for (size_t i = 0; i < n; ++i) {
    u2[i] = u[i] + c * (w.ku1[i] + 2.0 * w.ku2[i] + 2.0 * w.ku3[i] + w.ku4[i]);
    v2[i] = v[i] + c * (w.kv1[i] + 2.0 * w.kv2[i] + 2.0 * w.kv3[i] + w.kv4[i]);
  }
}

void check_guard(const Grid1D& g, const std::vector<double>& u,
                 const std::vector<double>& v, const SolverConfig& cfg, double t) {
  const double floor_u = std::max(cfg.guard_floor, cfg.guard_floor_rel * max_abs(u));
  const double floor_v = std::max(cfg.guard_floor, cfg.guard_floor_rel * max_abs(v));
  for (int i = 0; i < g.size; ++i) {
    if (std::abs(g.x(i)) <= g.guard_radius()) continue;
    if (std::abs(u[static_cast<size_t>(i)]) > floor_u ||
        std::abs(v[static_cast<size_t>(i)]) > floor_v)
      throw std::runtime_error("guard band violated at t = " + format_double(t) +
                               "; enlarge the domain length L");
  }
}

}  // namespace

EvolveResult evolve(const ModelParams& p, const WaveState& init,
                    const SolverConfig& cfg) {
  p.validate();
  if (!(init.gamma > 0.0) || init.gamma > 1.0)
    throw std::invalid_argument("evolve: gamma must lie in (0, 1]");
  if (!(init.u.grid == init.v.grid))
    throw std::invalid_argument("evolve: u and v must share one grid");
  if (!(cfg.t_end > init.t)) throw std::invalid_argument("evolve: t_end must exceed t0");
  if (cfg.dt == 0.0 && !(cfg.cfl > 0.0))
    throw std::invalid_argument("evolve: cfl must be positive");

  const Grid1D grid = init.u.grid;
  const double dx = grid.dx();
  Stepper st(p, grid, init.gamma, cfg.dealias);
  RkScratch w(static_cast<size_t>(grid.size));

  // event times: sorted samples within (t0, t_end], plus t_end
  std::vector<double> events = cfg.sample_times;
  events.push_back(cfg.t_end);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  EvolveResult res;
  std::vector<double> u = init.u.values, v = init.v.values;
  std::vector<double> u2(u.size()), v2(v.size());
  double t = init.t;

  auto record = [&](double tt) {
    res.samples.push_back({tt, Field{grid, u}, Field{grid, v}, init.gamma});
    if (cfg.enforce_guard) check_guard(grid, u, v, cfg, tt);
  };
  record(t);

  auto auto_dt = [&]() {
    const double stiff = 1.0 + pow_abs(max_abs(v), p.l - 1.0) * pow_abs(max_abs(u), p.k);
    return cfg.cfl * dx / std::max(init.gamma, stiff);
  };

  auto energy0 = [&]() {
    double e = 0.0;
    for (size_t i = 0; i < v.size(); ++i) e += v[i] * v[i];
    // gradient part via the spectrum of u (cheap, reuses the plan)
    st.dft.forward(u.data(), st.cu.data());
    double ge = 0.0;
    for (int j = 0; j <= grid.size / 2; ++j) {
      const double xi = grid.xi(j);
      const double mult = (j == 0 || j == grid.size / 2) ? 1.0 : 2.0;
      ge += mult * xi * xi * std::norm(st.cu[static_cast<size_t>(j)]);
    }
    return 0.5 * dx * e + 0.5 * init.gamma * init.gamma * ge * dx / grid.size;
  };

  size_t next_event = 0;
  while (next_event < events.size() && events[next_event] <= t) ++next_event;
  double e_prev = energy0();

  while (next_event < events.size()) {
    const double target = events[next_event];
    double h = cfg.dt > 0.0 ? cfg.dt : auto_dt();
    bool landed = false;
    if (t + h >= target - 1e-14 * std::max(1.0, std::abs(target))) {
      h = target - t;
      landed = true;
    }
    rk4_step(st, w, u, v, h, u2, v2);
    ++res.steps;

    if (max_abs(v2) >= cfg.blowup_cap) {
      // bisection on the step length for the cap crossing
      double lo = 0.0, hi = h;
      for (int it = 0; it < 50 && hi - lo > 1e-15 * std::max(1.0, t); ++it) {
        const double mid = 0.5 * (lo + hi);
        rk4_step(st, w, u, v, mid, u2, v2);
        (max_abs(v2) >= cfg.blowup_cap ? hi : lo) = mid;
      }
      res.status = RunStatus::blowup;
      res.blowup_t = t + 0.5 * (lo + hi);
      res.diagnostic = "max|v| reached the blow-up cap " + format_double(cfg.blowup_cap);
      return res;
    }

    u.swap(u2);
    v.swap(v2);
    t = landed ? target : t + h;

    const double e_now = energy0();
    if (e_now > 10.0 * e_prev + 1e-300) {
      res.status = RunStatus::instability;
      res.diagnostic = "energy grew more than tenfold in one step at t = " +
                       format_double(t) + " (dt too large or under-resolved)";
      return res;
    }
    e_prev = e_now;

    if (landed) {
      record(t);
      ++next_event;
    }
  }
  return res;
}

EnergyReport energy_gamma_m(const Field& w, const Field& w_t, double gamma, int m) {
  if (m < 0) throw std::invalid_argument("energy order m must be >= 0");
  if (!(w.grid == w_t.grid)) throw std::invalid_argument("energy: grid mismatch");
  const int M = w.grid.size;
  const auto cw = spectrum(w);
  const auto cv = spectrum(w_t);
  EnergyReport rep;
  rep.m = m;
  rep.per_order.resize(static_cast<size_t>(m) + 1, 0.0);
  const double dxi = 2.0 * std::acos(-1.0) / w.grid.length;
  for (int j = 0; j <= M / 2; ++j) {
    const double xi = w.grid.xi(j);
    const double mult = (j == 0 || j == M / 2) ? 1.0 : 2.0;
    double x2p = 1.0;  // xi^(2p)
    for (int pord = 0; pord <= m; ++pord) {
      const double ev = 0.5 * mult * x2p * std::norm(cv[static_cast<size_t>(j)]);
      const double eu = 0.5 * gamma * gamma * mult * x2p * xi * xi *
                        std::norm(cw[static_cast<size_t>(j)]);
      rep.per_order[static_cast<size_t>(pord)] += (ev + eu) * dxi;
      x2p *= xi * xi;
    }
  }
  for (double e : rep.per_order) rep.total += e;
  return rep;
}

double discrepancy_vs_ode(const Field& u, const Field& v, const Field& ou,
                          const Field& ov, int m) {
  if (!(u.grid == ou.grid) || !(v.grid == ov.grid) || !(u.grid == v.grid))
    throw std::invalid_argument("discrepancy: grid mismatch");
  Field du = u, dv = v;
  for (size_t i = 0; i < du.values.size(); ++i) {
    du.values[i] -= ou.values[i];
    dv.values[i] -= ov.values[i];
  }
  return sobolev_norm(du, {static_cast<double>(m + 1), false, 1}) +
         sobolev_norm(dv, {static_cast<double>(m), false, 1});
}

double support_radius(const WaveState& state, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("support floor must be positive");
  const double r = std::max(state.u.support_radius(floor),
                            state.v.support_radius(floor));
  if (r >= state.u.grid.guard_radius())
    throw std::runtime_error("support touches the guard band at t = " +
                             format_double(state.t) + "; experiment invalid");
  return r;
}

}  // namespace slwlab
