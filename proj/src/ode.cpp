#include "slwlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "slwlab/format.hpp"

namespace slwlab {

namespace {

constexpr double kPlateauVelocityFloor = 1e-12;
constexpr double kBlowupVelocityCap = 1e15;

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepResult {
  double u;
  double err;
};

// One trial step of the scalar autonomous ODE u' = f(u).
template <class F>
StepResult dopri_step(const F& f, double u, double k1, double h) {
  const double k2 = f(u + h * a21 * k1);
  const double k3 = f(u + h * (a31 * k1 + a32 * k2));
  const double k4 = f(u + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const double k5 = f(u + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const double k6 = f(u + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const double u5 = u + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const double k7 = f(u5);
  const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {u5, std::abs(err)};
}

// Integrate u' = f(u) from (t0, u0) to t1 with local error <= tol per step.
// No sample recording; used for dense evaluation.
template <class F>
double integrate_to(const F& f, double t0, double u0, double t1, double tol) {
  double t = t0, u = u0;
  double h = t1 - t0;
  if (h <= 0.0) return u0;
  while (t < t1) {
    h = std::min(h, t1 - t);
    const double k1 = f(u);
    const StepResult s = dopri_step(f, u, k1, h);
    const double scale = tol * (1.0 + std::abs(u));
    if (s.err <= scale || h <= t1 * std::numeric_limits<double>::epsilon()) {
      t += h;
      u = s.u;
      if (t >= t1) break;
      const double grow = s.err > 0.0 ? 0.9 * std::pow(scale / s.err, 0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(scale / s.err, 0.2));
    }
    if (h <= 0.0) break;
  }
  return u;
}

double pow_signed_exponent(double base, double expo) {
  return expo == 0.0 ? 1.0 : std::pow(base, expo);
}

}  // namespace

std::string to_string(TrajStatus s) {
  switch (s) {
    case TrajStatus::global: return "global";
    case TrajStatus::plateau: return "plateau";
    default: return "blowup";
  }
}

double velocity(const ModelParams& p, double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("velocity: monotone branch requires u >= 0");
  const double kp1 = p.k + 1.0;
  if (p.l == 2.0) {
    const double w = std::pow(u, kp1) / kp1;
    return p.sign == Sign::defocusing ? std::exp(-w) : std::exp(w);
  }
  const double coef = (p.sign == Sign::defocusing ? (p.l - 2.0) : (2.0 - p.l)) / kp1;
  const double base = 1.0 + coef * std::pow(u, kp1);
  if (base <= 0.0) {
    // defocusing l<2 plateau, or focusing l>2 at the velocity pole
    if (p.sign == Sign::defocusing) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::pow(base, 1.0 / (2.0 - p.l));
}

double plateau_limit(const ModelParams& p) {
  if (p.sign != Sign::defocusing || p.l >= 2.0)
    throw std::invalid_argument("plateau_limit: defocusing l < 2 only");
  return std::pow((p.k + 1.0) / (2.0 - p.l), 1.0 / (p.k + 1.0));
}

double velocity_pole(const ModelParams& p) {
  if (p.sign != Sign::focusing || p.l <= 2.0)
    throw std::invalid_argument("velocity_pole: focusing l > 2 only");
  return std::pow((p.k + 1.0) / (p.l - 2.0), 1.0 / (p.k + 1.0));
}

double conserved_quantity(const ModelParams& p, double u, double v) {
  const double kp1 = p.k + 1.0;
  const double uterm = std::pow(std::abs(u), kp1) / kp1;
  const double usign = p.sign == Sign::defocusing ? 1.0 : -1.0;
  if (p.l == 2.0) return std::log(std::abs(v)) + usign * uterm;
  return std::pow(std::abs(v), 2.0 - p.l) / (2.0 - p.l) + usign * uterm;
}

OdeTrajectory OdeTrajectory::integrate_base(const ModelParams& p, double t_end,
                                            double tol) {
  p.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  OdeTrajectory traj;
  traj.params_ = p;
  traj.tol_ = tol;
  traj.t_ = {0.0};
  traj.u_ = {0.0};
  traj.v_ = {velocity(p, 0.0)};
  traj.run(t_end);
  return traj;
}

void OdeTrajectory::run(double t_end) {
  const ModelParams p = params_;
  auto f = [&p](double u) { return velocity(p, u); };
  double t = t_.back();
  double u = u_.back();
  if (status_ != TrajStatus::global) return;  // plateau/blowup: nothing left to do
  double h = std::min(0.01, t_end - t);
  if (h <= 0.0) return;
  while (t < t_end) {
    h = std::min(h, t_end - t);
    const double k1 = f(u);
    if (k1 < kPlateauVelocityFloor && p.sign == Sign::defocusing) {
      status_ = TrajStatus::plateau;
      return;
    }
    if (k1 > kBlowupVelocityCap || h <= t * std::numeric_limits<double>::epsilon()) {
      status_ = TrajStatus::blowup;
      blowup_estimate_ = t + tail_time_from(u);
      return;
    }
    const StepResult s = dopri_step(f, u, k1, h);
    const double scale = tol_ * (1.0 + std::abs(u));
    if (s.err <= scale) {
      t += h;
      u = s.u;
      t_.push_back(t);
      u_.push_back(u);
      v_.push_back(f(u));
      const double grow = s.err > 0.0 ? 0.9 * std::pow(scale / s.err, 0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(scale / s.err, 0.2));
    }
  }
}

double OdeTrajectory::coverage() const {
  if (status_ == TrajStatus::plateau) return std::numeric_limits<double>::infinity();
  return t_.back();
}

bool OdeTrajectory::covers(double t) const { return t <= coverage(); }

void OdeTrajectory::ensure_coverage(double t) {
  if (covers(t)) return;
  if (synthetic_)
    throw std::runtime_error("rescaled trajectory cannot extend coverage; extend the base");
  if (status_ == TrajStatus::blowup)
    throw std::runtime_error("trajectory blows up at t ~ " + format_double(blowup_estimate_) +
                             "; no coverage at t = " + format_double(t));
  run(t);
  if (!covers(t) && status_ == TrajStatus::global)
    throw std::runtime_error("integration stalled before t = " + format_double(t));
  if (!covers(t) && status_ == TrajStatus::blowup)
    throw std::runtime_error("trajectory blows up at t ~ " + format_double(blowup_estimate_) +
                             "; no coverage at t = " + format_double(t));
}

double OdeTrajectory::u_at(double t) const {
  if (t < 0.0) throw std::invalid_argument("u_at: t must be >= 0");
  if (!covers(t))
    throw std::runtime_error("u_at: t = " + format_double(t) + " beyond coverage " +
                             format_double(coverage()) + "; call ensure_coverage first");
  if (synthetic_ || status_ == TrajStatus::plateau) {
    if (!t_.empty() && t >= t_.back()) return u_.back();
  }
  // bracketing sample below t
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(0, (it - t_.begin()) - 1));
  if (t == t_[i]) return u_[i];
  if (synthetic_) {
    // dense output for synthetic trajectories: cubic Hermite on the bracket
    const size_t j = std::min(i + 1, t_.size() - 1);
    if (j == i) return u_[i];
    const double dt = t_[j] - t_[i], th = (t - t_[i]) / dt;
    const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th),
                 h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
    return h00 * u_[i] + h10 * dt * v_[i] + h01 * u_[j] + h11 * dt * v_[j];
  }
  const ModelParams p = params_;
  auto f = [&p](double u) { return velocity(p, u); };
  return integrate_to(f, t_[i], u_[i], t, tol_);
}

double OdeTrajectory::v_at(double t) const {
  if (synthetic_) {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(0, (it - t_.begin()) - 1));
    if (t == t_[i]) return v_[i];
  }
  return velocity(params_, u_at(t));
}

double OdeTrajectory::blowup_estimate() const {
  if (status_ != TrajStatus::blowup)
    throw std::logic_error("blowup_estimate: trajectory did not blow up");
  return blowup_estimate_;
}

namespace {

// Adaptive Simpson quadrature of a smooth integrand.
template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb, double m,
                   double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace

// Remaining time integral_u^(umax) du/f for a focusing trajectory that was
// stopped near the singularity.
double tail_time_from_impl(const ModelParams& p, double u_from, double tol) {
  auto inv_f = [&p](double u) { return 1.0 / velocity(p, u); };
  if (p.l > 2.0) {
    const double ustar = velocity_pole(p);
    return adaptive_simpson(inv_f, std::min(u_from, ustar), ustar, tol);
  }
  // l <= 2: integrable tail to infinity; double the cap until converged
  double total = 0.0, lo = u_from, hi = std::max(2.0 * u_from, u_from + 32.0);
  for (int i = 0; i < 60; ++i) {
    const double piece = adaptive_simpson(inv_f, lo, hi, tol * 0.25);
    total += piece;
    if (piece < tol * std::max(1.0, total)) break;
    lo = hi;
    hi *= 2.0;
  }
  return total;
}

// member helper lives outside the class body to reuse the quadrature above
double OdeTrajectory::tail_time_from(double u_from) {
  return tail_time_from_impl(params_, u_from, tol_ * 1e2);
}

BlowupReport blowup_time(const ModelParams& p, double tol, double u_cap0) {
  p.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  auto inv_f = [&p](double u) { return 1.0 / velocity(p, u); };

  BlowupReport rep;
  rep.status = TrajStatus::blowup;
  const bool finite_pole = p.sign == Sign::focusing && p.l > 2.0;
  const double qtol = tol * 1e-2;

  if (finite_pole) {
    const double ustar = velocity_pole(p);
    const double T = adaptive_simpson(inv_f, 0.0, ustar, qtol);
    rep.caps = {ustar};
    rep.T_at_cap = {T};
    rep.T_quadrature = T;
    rep.T_est = T;
    rep.u_cap = ustar;
    rep.richardson_order = 0;
  } else {
    double cap = std::max(1.0, u_cap0 / 16.0);
    double T = adaptive_simpson(inv_f, 0.0, cap, qtol);
    rep.caps = {cap};
    rep.T_at_cap = {T};
    double prev_inc = std::numeric_limits<double>::infinity();
    int doublings = 0;
    for (; doublings < 48; ++doublings) {
      const double cap2 = 2.0 * cap;
      const double inc = adaptive_simpson(inv_f, cap, cap2, qtol);
      cap = cap2;
      T += inc;
      rep.caps.push_back(cap);
      rep.T_at_cap.push_back(T);
      const bool shrinking = inc < prev_inc;
      if (cap >= u_cap0 && inc < tol * std::max(1.0, T)) {
        // geometric tail extrapolation from the last two increments
        double t_extra = 0.0;
        if (prev_inc > 0.0 && inc > 0.0 && inc / prev_inc < 0.9)
          t_extra = inc * (inc / prev_inc) / (1.0 - inc / prev_inc);
        rep.T_quadrature = T;
        rep.T_est = T + t_extra;
        rep.u_cap = cap;
        rep.richardson_order = doublings + 1;
        break;
      }
      if (cap > 1e9 && !shrinking) {
        rep.status = TrajStatus::global;  // non-integrable tail: no blow-up
        rep.T_quadrature = rep.T_est = std::numeric_limits<double>::infinity();
        rep.u_cap = cap;
        rep.richardson_order = doublings + 1;
        break;
      }
      prev_inc = inc;
    }
    if (rep.T_at_cap.size() >= 48 || (rep.T_est == 0.0 && rep.status == TrajStatus::blowup)) {
      rep.T_quadrature = T;
      rep.T_est = T;
      rep.u_cap = cap;
      rep.richardson_order = static_cast<int>(rep.caps.size()) - 1;
    }
  }

  if (rep.status == TrajStatus::blowup) {
    // independent route: adaptive time stepping of u' = f(u) up to the cap
    auto f = [&p](double u) { return velocity(p, u); };
    const double u_target = finite_pole ? 0.999 * velocity_pole(p)
                                        : std::min(rep.u_cap, 40.0);
    double t = 0.0, u = 0.0, h = 1e-3;
    for (long step = 0; step < 2000000 && u < u_target; ++step) {
      const double k1 = f(u);
      StepResult s = dopri_step(f, u, k1, h);
      const double scale = tol * 0.1 * (1.0 + std::abs(u));
      if (s.err <= scale) {
        if (s.u > u_target) {  // clip the final step by bisection on h
          double lo = 0.0, hi = h;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (dopri_step(f, u, k1, mid).u > u_target) hi = mid; else lo = mid;
          }
          t += 0.5 * (lo + hi);
          u = u_target;
          break;
        }
        t += h;
        u = s.u;
        const double grow = s.err > 0.0 ? 0.9 * std::pow(scale / s.err, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
      } else {
        h *= std::max(0.2, 0.9 * std::pow(scale / s.err, 0.2));
      }
    }
    rep.T_integrator = t + tail_time_from_impl(p, u, qtol);
  } else {
    rep.T_integrator = std::numeric_limits<double>::infinity();
  }
  return rep;
}

OdeTrajectory rescale_trajectory(OdeTrajectory& base, double psi, int N,
                                 const ModelParams& p,
                                 std::span<const double> times) {
  if (!(psi >= 0.0)) throw std::invalid_argument("rescale_trajectory: psi must be >= 0");
  if (N < 1) throw std::invalid_argument("rescale_trajectory: N must be >= 1");
  OdeTrajectory out;
  out.params_ = p;
  out.tol_ = base.tol();
  out.synthetic_ = true;
  out.status_ = base.status();
  out.t_.assign(times.begin(), times.end());
  out.u_.resize(out.t_.size());
  out.v_.resize(out.t_.size());
  if (psi == 0.0) {  // convention: u_0 = 0
    std::fill(out.u_.begin(), out.u_.end(), 0.0);
    std::fill(out.v_.begin(), out.v_.end(), 0.0);
    return out;
  }
  const double b = N * (p.k + p.l - 1.0);
  const double a = N * (p.l - 2.0);
  const double tscale = std::pow(psi, b);
  const double uscale = pow_signed_exponent(psi, -a);
  const double vscale = std::pow(psi, N * (p.k + 1.0));
  double tmax = 0.0;
  for (double t : out.t_) {
    if (t < 0.0) throw std::invalid_argument("rescale_trajectory: times must be >= 0");
    tmax = std::max(tmax, t * tscale);
  }
  base.ensure_coverage(tmax);
  for (size_t i = 0; i < out.t_.size(); ++i) {
    const double s = out.t_[i] * tscale;
    out.u_[i] = base.u_at(s) * uscale;
    out.v_[i] = base.v_at(s) * vscale;
  }
  return out;
}

OdeTrajectory rescale_focusing(const OdeTrajectory& base, double a,
                               std::span<const double> times) {
  if (!(a > 0.0)) throw std::invalid_argument("rescale_focusing: a must be > 0");
  if (base.status() != TrajStatus::blowup)
    throw std::invalid_argument("rescale_focusing: base trajectory must blow up");
  const double T = base.blowup_estimate();
  OdeTrajectory out;
  out.params_ = base.params();
  out.tol_ = base.tol();
  out.synthetic_ = true;
  out.status_ = TrajStatus::blowup;
  out.blowup_estimate_ = a;
  out.t_.assign(times.begin(), times.end());
  out.u_.resize(out.t_.size());
  out.v_.resize(out.t_.size());
  for (size_t i = 0; i < out.t_.size(); ++i) {
    const double s = out.t_[i] * T / a;
    if (!base.covers(s))
      throw std::runtime_error("rescale_focusing: requested time too close to blow-up");
    out.u_[i] = base.u_at(s);
    out.v_[i] = base.v_at(s) * (T / a);
  }
  return out;
}

void dump_trajectory_csv(const OdeTrajectory& traj, std::ostream& os) {
  os << "t,u,u_t\n";
  const auto& t = traj.times();
  const auto& u = traj.u();
  const auto& v = traj.u_t();
  for (size_t i = 0; i < t.size(); ++i)
    os << format_double(t[i]) << ',' << format_double(u[i]) << ','
       << format_double(v[i]) << '\n';
}

}  // namespace slwlab
