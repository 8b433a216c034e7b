#pragma once

#include <string>
#include <vector>

#include "slwlab/model.hpp"
#include "slwlab/spectral.hpp"

namespace slwlab {

struct WaveState {
  double t = 0.0;
  Field u;
  Field v;  // = u_t
  double gamma = 1.0;
};

enum class RunStatus { completed, blowup, instability };

std::string to_string(RunStatus s);

struct SolverConfig {
  double dt = 0.0;    // 0 = auto: cfl*dx / max(gamma, 1 + max|v|^(l-1) max|u|^k)
  double t_end = 1.0;
  double cfl = 0.5;
  bool dealias = true;  // 2/3-rule filter on the nonlinear term
  double blowup_cap = 1e6;
  bool enforce_guard = true;
  double guard_floor = 1e-12;
  double guard_floor_rel = 1e-9;  // relative to the current max amplitude
  std::vector<double> sample_times;  // sorted ascending; 0 and t_end implied
};

struct EvolveResult {
  std::vector<WaveState> samples;
  RunStatus status = RunStatus::completed;
  double blowup_t = 0.0;  // bisection-refined t* when status == blowup
  long steps = 0;
  std::string diagnostic;
};

// Classical 4th-order one-step integration of (u, v)' = (v, gamma^2 u_xx +
// F(u, v)) with the spectral Laplacian.  Aborts with status blowup once
// max|v| crosses the cap (t* refined by bisection on the last step) and
// with status instability when the gamma-energy grows more than tenfold in
// one step.
EvolveResult evolve(const ModelParams& p, const WaveState& init,
                    const SolverConfig& cfg);

struct EnergyReport {
  std::vector<double> per_order;  // E_gamma(d^j w), j = 0..m
  double total = 0.0;             // E_{gamma,m}
  int m = 0;
};

// E_gamma(d^j w) = int 1/2 |d^j w_t|^2 + (gamma^2/2) |d^(j+1) w|^2 dx,
// derivatives spectral.
EnergyReport energy_gamma_m(const Field& w, const Field& w_t, double gamma, int m);

// ||u - ou||_{H^(m+1)} + ||v - ov||_{H^m} (inhomogeneous orders).
double discrepancy_vs_ode(const Field& u, const Field& v, const Field& ou,
                          const Field& ov, int m);

// Radius of the smallest centered interval containing all samples with
// |u| or |v| above the floor.  Throws when the support touches the guard
// band (the experiment is then invalid).
double support_radius(const WaveState& state, double floor = 1e-12);

}  // namespace slwlab
