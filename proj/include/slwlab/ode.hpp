#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "slwlab/model.hpp"

namespace slwlab {

enum class TrajStatus { global, plateau, blowup };

std::string to_string(TrajStatus s);

// Velocity f(u) of the first-order reduction u' = f(u) on the monotone
// branch (data (0,1), u >= 0).  Defocusing l < 2 clamps to 0 at the
// plateau; focusing l > 2 has a pole at finite u (derivative blow-up).
double velocity(const ModelParams& p, double u);

// ((k+1)/(2-l))^(1/(k+1)), the u-limit for defocusing l < 2.
double plateau_limit(const ModelParams& p);

// ((k+1)/(l-2))^(1/(k+1)), the pole of f for focusing l > 2.
double velocity_pole(const ModelParams& p);

// I(u, v) on the monotone branch; constant along trajectories.
double conserved_quantity(const ModelParams& p, double u, double v);

// Sampled solution of u'' = F(u, u') with data (0,1), integrated through
// the conserved-quantity reduction u' = f(u).  Samples are the accepted
// steps of an adaptive embedded 5(4) pair; dense evaluation re-integrates
// locally from the bracketing sample.
class OdeTrajectory {
 public:
  static OdeTrajectory integrate_base(const ModelParams& p, double t_end,
                                      double tol = 1e-10);

  const ModelParams& params() const { return params_; }
  double tol() const { return tol_; }
  TrajStatus status() const { return status_; }
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& u_t() const { return v_; }

  // Largest time with sampled coverage.  Plateau trajectories answer
  // for all t (the tail is constant to solver precision); blow-up
  // trajectories only up to the last step before the singularity.
  double coverage() const;
  bool covers(double t) const;
  // Integrate further so that [0, t] is covered.  No-op when already
  // covered; throws for blow-up trajectories asked past the singularity.
  void ensure_coverage(double t);

  double u_at(double t) const;
  double v_at(double t) const;

  // Estimated blow-up time (status blowup only): time reached plus the
  // quadrature of the remaining 1/f tail.
  double blowup_estimate() const;

  friend OdeTrajectory rescale_trajectory(OdeTrajectory& base, double psi,
                                          int N, const ModelParams& p,
                                          std::span<const double> times);
  friend OdeTrajectory rescale_focusing(const OdeTrajectory& base, double a,
                                        std::span<const double> times);

 private:
  OdeTrajectory() = default;
  void run(double t_end);
  double tail_time_from(double u_from);

  ModelParams params_;
  double tol_ = 1e-10;
  TrajStatus status_ = TrajStatus::global;
  std::vector<double> t_, u_, v_;
  double blowup_estimate_ = 0.0;
  bool synthetic_ = false;  // built by a rescaling, not by integration
};

struct BlowupReport {
  TrajStatus status;     // blowup, or global when 1/f is not integrable
  double T_est;          // tail-extrapolated estimate (status blowup)
  double T_quadrature;   // plain quadrature at the final cap
  double T_integrator;   // independent route: adaptive time-stepping to the cap
  double u_cap;          // final cap used
  int richardson_order;  // number of cap doublings performed
  std::vector<double> caps;
  std::vector<double> T_at_cap;
};

// T = integral_0^umax du/f(u) by adaptive quadrature with cap doubling,
// cross-checked against the adaptive integrator.
BlowupReport blowup_time(const ModelParams& p, double tol = 1e-8,
                         double u_cap0 = 30.0);

// u_psi(t) = u_1(t psi^(N(k+l-1))) psi^(-N(l-2)), sampled at the given
// times.  psi = 0 yields the zero trajectory.  Extends base coverage as
// needed (never extrapolates).
OdeTrajectory rescale_trajectory(OdeTrajectory& base, double psi, int N,
                                 const ModelParams& p,
                                 std::span<const double> times);

// u_a(t) = u_T(T t / a): same blow-up profile with lifespan a and data
// (0, T/a).  base must have status blowup.
OdeTrajectory rescale_focusing(const OdeTrajectory& base, double a,
                               std::span<const double> times);

// CSV dump: header t,u,u_t, 17 significant digits, LF endings.
void dump_trajectory_csv(const OdeTrajectory& traj, std::ostream& os);

}  // namespace slwlab
