#pragma once

#include <stdexcept>
#include <string>

namespace slwlab {

enum class Sign { defocusing, focusing };

std::string to_string(Sign s);
Sign sign_from_string(const std::string& s);

// Equation family parameters for  box_gamma u = -+ |u|^k |u_t|^(l-1) u_t.
// n enters only through norm/exponent formulas; the solver itself is 1D.
struct ModelParams {
  double k = 0.0;
  double l = 0.0;
  int n = 1;
  Sign sign = Sign::defocusing;

  bool k_is_integer() const;
  bool l_is_integer() const;
  // Throws std::invalid_argument unless k,l >= 0, k+l > 1, n >= 1,
  // and (defocusing => l >= 1).
  void validate() const;
};

struct Exponents {
  double alpha;     // (l-2)/(k+l-1)
  double s_c;       // n/2 + alpha
  double s_tilde;   // (n+1)/4 + (l-1)/(k+l-1)
};

Exponents derive_exponents(const ModelParams& p);

// F(u, v) with v = u_t.  Branch by parity for integer k; the generic
// |u|^k |v|^(l-1) v form otherwise.  l = 0 uses the pure-power form
// |u|^(k-1) u.  Sign: - defocusing, + focusing.
double eval_nonlinearity(const ModelParams& p, double u, double v);

// |x|^p with the p = 0 case pinned to 1 (so |u|^0 = 1 even at u = 0)
// and the continuous extension 0^p = 0 for p > 0.
double pow_abs(double x, double p);

// Smoothness order of the time-ODE solution: u_1 in C^(m0+2).
// cap is returned for integer k, l with k+l odd; otherwise the binding
// non-smooth factor decides, clamped at 0 (smooth factors excluded:
// the k term only participates for k > 0, the l term only for l not in {0,1}).
int compute_m0(const ModelParams& p, int cap = 8);

struct NmChoice {
  int N;
  int m;
};

// Smallest admissible energy order m = floor((n+2)/2) and the smallest
// rescaling power N with N(k+1) > m+2.
NmChoice choose_N_m(int m0, double k, int n);

}  // namespace slwlab
