#include "slwlab/model.hpp"

#include <cmath>

namespace slwlab {

namespace {
bool is_integer(double x) {
  return std::isfinite(x) && x == std::floor(x);
}
}  // namespace

std::string to_string(Sign s) {
  return s == Sign::defocusing ? "defocusing" : "focusing";
}

Sign sign_from_string(const std::string& s) {
  if (s == "defocusing") return Sign::defocusing;
  if (s == "focusing") return Sign::focusing;
  throw std::invalid_argument("sign must be 'defocusing' or 'focusing', got '" + s + "'");
}

bool ModelParams::k_is_integer() const { return is_integer(k); }
bool ModelParams::l_is_integer() const { return is_integer(l); }

void ModelParams::validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be finite and >= 0");
  if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("l must be finite and >= 0");
  if (!(k + l > 1.0)) throw std::invalid_argument("degenerate family: k+l must exceed 1");
  if (n < 1) throw std::invalid_argument("spatial dimension n must be >= 1");
  if (sign == Sign::defocusing && l < 1.0)
    throw std::invalid_argument("defocusing family requires l >= 1");
}

Exponents derive_exponents(const ModelParams& p) {
  p.validate();
  const double denom = p.k + p.l - 1.0;
  Exponents e;
  e.alpha = (p.l - 2.0) / denom;
  e.s_c = 0.5 * p.n + e.alpha;
  e.s_tilde = 0.25 * (p.n + 1.0) + (p.l - 1.0) / denom;
  return e;
}

double pow_abs(double x, double p) {
  if (p == 0.0) return 1.0;
  return std::pow(std::abs(x), p);
}

double eval_nonlinearity(const ModelParams& p, double u, double v) {
  const double sgn = p.sign == Sign::defocusing ? -1.0 : 1.0;
  if (p.l == 0.0) return sgn * pow_abs(u, p.k - 1.0) * u;
  const bool odd_k = p.k_is_integer() && (static_cast<long>(p.k) % 2 == 1);
  if (odd_k) return sgn * pow_abs(u, p.k - 1.0) * u * pow_abs(v, p.l);
  return sgn * pow_abs(u, p.k) * pow_abs(v, p.l - 1.0) * v;
}

int compute_m0(const ModelParams& p, int cap) {
  p.validate();
  if (cap < 3) throw std::invalid_argument("m0 cap must be >= 3");
  if (p.k_is_integer() && p.l_is_integer() &&
      (static_cast<long>(p.k + p.l) % 2 == 1))
    return cap;
  int m0 = cap;
  bool any = false;
  if (p.k > 0.0) {
    m0 = std::min(m0, static_cast<int>(std::floor(p.k - 1.0)));
    any = true;
  }
  if (p.l != 0.0 && p.l != 1.0) {
    m0 = std::min(m0, static_cast<int>(std::floor(p.l - 1.0)));
    any = true;
  }
  if (!any) return cap;
  return std::max(0, m0);
}

NmChoice choose_N_m(int m0, double k, int n) {
  const int m = (n + 2) / 2;
  if (m0 < m)
    throw std::invalid_argument("insufficient nonlinearity regularity: m0 < floor((n+2)/2)");
  int N = static_cast<int>(std::floor((m + 2) / (k + 1.0))) + 1;
  while (N * (k + 1.0) <= m + 2.0) ++N;
  return {N, m};
}

}  // namespace slwlab
