#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <vector>

#include "slwlab/model.hpp"

namespace slwlab {

// Uniform periodic grid on [-L/2, L/2).  Compact-support fields must
// vanish on the outer 25% of the domain (|x| > 0.375 L) so wrap-around
// never contaminates finite-speed experiments.
struct Grid1D {
  double length = 0.0;
  int size = 0;

  static Grid1D make(double L, int M);
  double dx() const { return length / size; }
  double x(int i) const { return -0.5 * length + i * dx(); }
  double xi(int j) const;  // frequency of mode j in [0, size/2]
  double guard_radius() const { return 0.375 * length; }
  bool operator==(const Grid1D& o) const { return length == o.length && size == o.size; }
};

struct Field {
  Grid1D grid;
  std::vector<double> values;

  double max_abs() const;
  // outermost |x| with |value| > floor; 0 when empty
  double support_radius(double floor = 0.0) const;
};

Field zero_field(const Grid1D& g);

struct SobolevOrder {
  double s = 0.0;
  bool homogeneous = false;
  int n_eff = 1;  // dimension used in the moment-condition threshold
};

// FFTW r2c/c2r pair for one transform size.  Plan creation is serialized
// internally (FFTW planning is not thread-safe); each instance owns its
// buffers, so distinct instances may execute concurrently.
class Dft {
 public:
  explicit Dft(int n);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  int size() const { return n_; }
  // raw DFT sums: out[j] = sum_i in[i] exp(-2 pi i j k / n), j = 0..n/2
  void forward(const double* in, std::complex<double>* out);
  // inverse of forward, normalized by 1/n
  void inverse(const std::complex<double>* in, double* out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_;
};

// Continuum-normalized spectrum: fhat(xi_j) = dx/sqrt(2 pi) * DFT_j,
// j = 0..M/2, so that sum_j |fhat|^2 * (2 pi / L) (with conjugate modes
// counted twice) equals the quadrature L^2 integral exactly.
std::vector<std::complex<double>> spectrum(const Field& f);

// Discrete H^s / Hdot^s norm.  Homogeneous orders drop the zero mode and
// for s <= -n_eff/2 require numerically zero mean ("moment condition
// violated" otherwise).
double sobolev_norm(const Field& f, const SobolevOrder& ord);

// height * exp(1 - 1/(1 - ((x-center)/radius)^2)) inside the support.
Field bump(const Grid1D& g, double center, double radius, double height);

// C-infinity plateau: value = height for |x-center| <= inner, smooth
// monotone decay to 0 at outer.
Field plateau_bump(const Grid1D& g, double center, double inner, double outer,
                   double height);

// sum_{j=0..q} (-1)^j C(q,j) base(x - jD): DFT vanishes to order q at 0.
// D is rounded to a whole number of grid cells so the cancellation of the
// low moments is exact.
Field moment_data(const Field& base, int q, double spacing);

// Row of 2m+1 equal-radius bumps placed symmetrically about `center`:
// 2m positives of `height` and one central negative of 2m*height, spacing
// spacing_factor*radius.  Zero mean and zero odd moments exactly (moment
// order 2) while int |phi|^(k+l-1) phi stays away from zero; this is the
// signed widely-spaced-support combination used as norm-inflation data.
Field signed_bump_row(const Grid1D& g, double center, double radius,
                      double height, int positive_count, double spacing_factor);

Field spectral_derivative(const Field& f, int order);

// Trigonometric interpolant of a field treated as compactly supported on
// the line: evaluates the band-limited extension inside [-L/2, L/2) and 0
// beyond.  Modes below coeff_floor (relative) are dropped.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field& f, double coeff_floor = 1e-15);
  double operator()(double y) const;

 private:
  double length_, x0_;
  int size_;
  std::vector<std::complex<double>> coeff_;  // modes 0..jmax
  bool has_nyquist_ = false;
  std::complex<double> nyquist_{0.0, 0.0};
};

struct RescaledField {
  Field field;
  bool cubic_fallback = false;
};

// g(x) = lambda^(-(k+1)/(k+l-1)) phi(gamma x / lambda), sampled on
// out_grid (defaults to phi's grid) by band-limited interpolation; falls
// back to cubic interpolation when the stretch factor exceeds M/8.
RescaledField rescale_data(const Field& phi, double gamma, double lambda,
                           const ModelParams& p,
                           const Grid1D* out_grid = nullptr);

struct ScaledPair {
  Field u;
  Field v;
  bool cubic_fallback = false;
};

// u^(gamma,lambda) component map at a fixed time: u scaled by lambda^alpha,
// v = u_t by lambda^(alpha-1), space by gamma/lambda.  The t = 0 slice of
// the v component reproduces rescale_data exactly.
ScaledPair scale_two_param(const Field& u, const Field& v, double gamma,
                           double lambda, const ModelParams& p,
                           const Grid1D* out_grid = nullptr);

// lambda^(-(k+1)/(k+l-1)) (lambda/gamma)^(n/2-(s-1)), the data-norm law up
// to its fixed constant.  moment_q is the declared vanishing-moment order
// of the data; required when s-1 <= -n/2.
double predict_data_norm(const ModelParams& p, double s, double gamma,
                         double lambda, int moment_q = 0);

void dump_field_csv(const Field& f, std::ostream& os);
void dump_spectrum_csv(const Field& f, std::ostream& os);

}  // namespace slwlab
