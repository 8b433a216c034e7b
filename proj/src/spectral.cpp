#include "slwlab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>

#include "slwlab/format.hpp"

namespace slwlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2Pi = 2.5066282746310002;

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

Grid1D Grid1D::make(double L, int M) {
  if (!(L > 0.0)) throw std::invalid_argument("grid length must be positive");
  if (!power_of_two(M)) throw std::invalid_argument("grid size must be a power of two");
  return {L, M};
}

double Grid1D::xi(int j) const { return 2.0 * kPi * j / length; }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double Field::support_radius(double floor) const {
  double r = 0.0;
  for (int i = 0; i < grid.size; ++i)
    if (std::abs(values[i]) > floor) r = std::max(r, std::abs(grid.x(i)));
  return r;
}

Field zero_field(const Grid1D& g) {
  return {g, std::vector<double>(static_cast<size_t>(g.size), 0.0)};
}

// ---------------------------------------------------------------------------
// FFTW wrapper

struct Dft::Impl {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

namespace {
std::mutex g_fftw_plan_mutex;
}

Dft::Dft(int n) : impl_(new Impl), n_(n) {
  if (!power_of_two(n)) throw std::invalid_argument("Dft size must be a power of two");
  impl_->real = fftw_alloc_real(n);
  impl_->cplx = fftw_alloc_complex(n / 2 + 1);
  std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
  impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->cplx, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r_1d(n, impl_->cplx, impl_->real, FFTW_ESTIMATE);
}

Dft::~Dft() {
  if (!impl_) return;
  std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->cplx);
  fftw_free(impl_->real);
}

void Dft::forward(const double* in, std::complex<double>* out) {
  std::copy(in, in + n_, impl_->real);
  fftw_execute(impl_->fwd);
  const int nc = n_ / 2 + 1;
  for (int j = 0; j < nc; ++j)
    out[j] = {impl_->cplx[j][0], impl_->cplx[j][1]};
}

void Dft::inverse(const std::complex<double>* in, double* out) {
  const int nc = n_ / 2 + 1;
  for (int j = 0; j < nc; ++j) {
    impl_->cplx[j][0] = in[j].real();
    impl_->cplx[j][1] = in[j].imag();
  }
  fftw_execute(impl_->bwd);
  const double inv = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = impl_->real[i] * inv;
}

// ---------------------------------------------------------------------------

std::vector<std::complex<double>> spectrum(const Field& f) {
  Dft dft(f.grid.size);
  std::vector<std::complex<double>> c(static_cast<size_t>(f.grid.size / 2 + 1));
  dft.forward(f.values.data(), c.data());
  const double scale = f.grid.dx() / kSqrt2Pi;
  for (auto& z : c) z *= scale;
  return c;
}

double sobolev_norm(const Field& f, const SobolevOrder& ord) {
  const int M = f.grid.size;
  const auto c = spectrum(f);
  if (ord.homogeneous && 2.0 * ord.s <= -static_cast<double>(ord.n_eff)) {
    double peak = 0.0;
    for (const auto& z : c) peak = std::max(peak, std::abs(z));
    if (std::abs(c[0]) > 1e-9 * peak && peak > 0.0)
      throw std::invalid_argument(
          "moment condition violated: homogeneous order s <= -n/2 needs zero mean");
  }
  double sum = 0.0;
  for (int j = M / 2; j >= 0; --j) {  // small high modes first
    if (ord.homogeneous && j == 0) continue;
    const double xi = f.grid.xi(j);
    const double w = ord.homogeneous ? std::pow(std::abs(xi), 2.0 * ord.s)
                                     : std::pow(1.0 + xi * xi, ord.s);
    const double mult = (j == 0 || j == M / 2) ? 1.0 : 2.0;
    sum += mult * std::norm(c[static_cast<size_t>(j)]) * w;
  }
  return std::sqrt(sum * 2.0 * kPi / f.grid.length);
}

Field bump(const Grid1D& g, double center, double radius, double height) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  if (std::abs(center) + radius > g.guard_radius())
    throw std::invalid_argument("bump support collides with the guard band");
  Field f = zero_field(g);
  for (int i = 0; i < g.size; ++i) {
    const double y = (g.x(i) - center) / radius;
    if (std::abs(y) < 1.0)
      f.values[static_cast<size_t>(i)] = height * std::exp(1.0 - 1.0 / (1.0 - y * y));
  }
  return f;
}

namespace {
// C-infinity step: 1 for q <= 0, 0 for q >= 1.
double smooth_step_down(double q) {
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - q));
  const double b = std::exp(-1.0 / q);
  return a / (a + b);
}
}  // namespace

Field plateau_bump(const Grid1D& g, double center, double inner, double outer,
                   double height) {
  if (!(0.0 < inner && inner < outer))
    throw std::invalid_argument("plateau_bump needs 0 < inner < outer");
  if (std::abs(center) + outer > g.guard_radius())
    throw std::invalid_argument("plateau support collides with the guard band");
  Field f = zero_field(g);
  for (int i = 0; i < g.size; ++i) {
    const double r = std::abs(g.x(i) - center);
    if (r < outer)
      f.values[static_cast<size_t>(i)] =
          height * smooth_step_down((r - inner) / (outer - inner));
  }
  return f;
}

Field moment_data(const Field& base, int q, double spacing) {
  if (q < 0) throw std::invalid_argument("moment order q must be >= 0");
  if (q == 0) return base;
  const Grid1D& g = base.grid;
  const long shift = std::lround(spacing / g.dx());
  if (shift <= 0) throw std::invalid_argument("moment spacing must exceed one cell");
  // support of the shifted stack must stay inside the guard band
  double hi = 0.0;
  bool any = false;
  for (int i = 0; i < g.size; ++i)
    if (base.values[static_cast<size_t>(i)] != 0.0) {
      hi = g.x(i);
      any = true;
    }
  if (any && hi + q * shift * g.dx() > g.guard_radius())
    throw std::invalid_argument(
        "insufficient room: shifted copies would leave the guard band");
  Field f = zero_field(g);
  for (int j = 0; j <= q; ++j) {
    const double coef = ((j % 2) ? -1.0 : 1.0) * binom(q, j);
    const long off = j * shift;
    for (long i = off; i < g.size; ++i)
      f.values[static_cast<size_t>(i)] +=
          coef * base.values[static_cast<size_t>(i - off)];
  }
  return f;
}

Field signed_bump_row(const Grid1D& g, double center, double radius,
                      double height, int positive_count, double spacing_factor) {
  if (positive_count < 2 || positive_count % 2 != 0)
    throw std::invalid_argument("positive_count must be even and >= 2");
  if (!(spacing_factor > 2.0))
    throw std::invalid_argument("spacing_factor must exceed 2 (disjoint supports)");
  const double D = spacing_factor * radius;
  const double extent = (positive_count / 2) * D + radius;
  if (std::abs(center) + extent > g.guard_radius())
    throw std::invalid_argument("bump row collides with the guard band");
  Field f = zero_field(g);
  auto add = [&](double c, double h) {
    for (int i = 0; i < g.size; ++i) {
      const double y = (g.x(i) - c) / radius;
      if (std::abs(y) < 1.0)
        f.values[static_cast<size_t>(i)] += h * std::exp(1.0 - 1.0 / (1.0 - y * y));
    }
  };
  add(center, -positive_count * height);
  for (int j = 1; j <= positive_count / 2; ++j) {
    add(center + j * D, height);
    add(center - j * D, height);
  }
  return f;
}

Field spectral_derivative(const Field& f, int order) {
  if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
  if (order == 0) return f;
  const int M = f.grid.size;
  Dft dft(M);
  std::vector<std::complex<double>> c(static_cast<size_t>(M / 2 + 1));
  dft.forward(f.values.data(), c.data());
  for (int j = 0; j <= M / 2; ++j) {
    std::complex<double> m{0.0, f.grid.xi(j)};
    std::complex<double> w{1.0, 0.0};
    for (int p = 0; p < order; ++p) w *= m;
    c[static_cast<size_t>(j)] *= w;
  }
  if (M % 2 == 0 && order % 2 == 1) c[static_cast<size_t>(M / 2)] = 0.0;  // odd-derivative Nyquist
  Field out = zero_field(f.grid);
  dft.inverse(c.data(), out.values.data());
  return out;
}

// ---------------------------------------------------------------------------

TrigInterpolant::TrigInterpolant(const Field& f, double coeff_floor)
    : length_(f.grid.length), x0_(f.grid.x(0)), size_(f.grid.size) {
  Dft dft(size_);
  std::vector<std::complex<double>> c(static_cast<size_t>(size_ / 2 + 1));
  dft.forward(f.values.data(), c.data());
  double peak = 0.0;
  for (const auto& z : c) peak = std::max(peak, std::abs(z));
  int jmax = 0;
  for (int j = 0; j < size_ / 2; ++j)
    if (std::abs(c[static_cast<size_t>(j)]) > coeff_floor * peak) jmax = j;
  coeff_.assign(c.begin(), c.begin() + jmax + 1);
  if (std::abs(c[static_cast<size_t>(size_ / 2)]) > coeff_floor * peak) {
    has_nyquist_ = true;
    nyquist_ = c[static_cast<size_t>(size_ / 2)];
  }
}

double TrigInterpolant::operator()(double y) const {
  if (std::abs(y) >= 0.5 * length_) return 0.0;  // compact support on the line
  const double theta = 2.0 * kPi * (y - x0_) / length_;
  const std::complex<double> rot{std::cos(theta), std::sin(theta)};
  std::complex<double> w{1.0, 0.0};
  double acc = coeff_[0].real();
  for (size_t j = 1; j < coeff_.size(); ++j) {
    w *= rot;
    acc += 2.0 * (coeff_[j] * w).real();
  }
  if (has_nyquist_) {
    const double th2 = 0.5 * size_ * theta;
    acc += (nyquist_ * std::complex<double>{std::cos(th2), std::sin(th2)}).real();
  }
  return acc / size_;
}

namespace {

double cubic_interp(const Field& f, double y) {
  if (std::abs(y) >= 0.5 * f.grid.length) return 0.0;
  const double dx = f.grid.dx();
  const double s = (y - f.grid.x(0)) / dx;
  const long i1 = std::lround(std::floor(s));
  const double th = s - i1;
  auto at = [&](long i) -> double {
    if (i < 0 || i >= f.grid.size) return 0.0;
    return f.values[static_cast<size_t>(i)];
  };
  const double p0 = at(i1 - 1), p1 = at(i1), p2 = at(i1 + 1), p3 = at(i1 + 2);
  // Catmull-Rom
  return p1 + 0.5 * th * (p2 - p0 +
           th * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
           th * (3.0 * (p1 - p2) + p3 - p0)));
}

struct StretchSpec {
  double factor;     // gamma / lambda >= 1
  bool cubic;
};

StretchSpec stretch_spec(const Field& in, double gamma, double lambda) {
  if (!(lambda > 0.0) || !(lambda <= gamma) || !(gamma <= 1.0))
    throw std::invalid_argument("rescaling requires 0 < lambda <= gamma <= 1");
  const double b = gamma / lambda;
  return {b, b > in.grid.size / 8.0};
}

Field stretch_field(const Field& in, const Grid1D& out_grid, double b,
                    double amplitude, bool cubic) {
  Field out = zero_field(out_grid);
  const double reach = 0.5 * in.grid.length / b;
  if (in.support_radius(0.0) / b > out_grid.guard_radius())
    throw std::runtime_error(
        "rescaled support exceeds the guard band; enlarge the domain length L");
  if (cubic) {
    for (int i = 0; i < out_grid.size; ++i) {
      const double x = out_grid.x(i);
      if (std::abs(x) <= reach)
        out.values[static_cast<size_t>(i)] = amplitude * cubic_interp(in, b * x);
    }
    return out;
  }
  TrigInterpolant interp(in);
  for (int i = 0; i < out_grid.size; ++i) {
    const double x = out_grid.x(i);
    if (std::abs(x) <= reach)
      out.values[static_cast<size_t>(i)] = amplitude * interp(b * x);
  }
  return out;
}

}  // namespace

RescaledField rescale_data(const Field& phi, double gamma, double lambda,
                           const ModelParams& p, const Grid1D* out_grid) {
  p.validate();
  const StretchSpec sp = stretch_spec(phi, gamma, lambda);
  const Grid1D g = out_grid ? *out_grid : phi.grid;
  const double amp = std::pow(lambda, -(p.k + 1.0) / (p.k + p.l - 1.0));
  return {stretch_field(phi, g, sp.factor, amp, sp.cubic), sp.cubic};
}

ScaledPair scale_two_param(const Field& u, const Field& v, double gamma,
                           double lambda, const ModelParams& p,
                           const Grid1D* out_grid) {
  p.validate();
  if (!(u.grid == v.grid)) throw std::invalid_argument("scale_two_param: grid mismatch");
  const StretchSpec sp = stretch_spec(u, gamma, lambda);
  const Grid1D g = out_grid ? *out_grid : u.grid;
  const double alpha = derive_exponents(p).alpha;
  ScaledPair out;
  out.u = stretch_field(u, g, sp.factor, std::pow(lambda, alpha), sp.cubic);
  out.v = stretch_field(v, g, sp.factor, std::pow(lambda, alpha - 1.0), sp.cubic);
  out.cubic_fallback = sp.cubic;
  return out;
}

double predict_data_norm(const ModelParams& p, double s, double gamma,
                         double lambda, int moment_q) {
  p.validate();
  if (!(lambda > 0.0) || !(lambda <= gamma))
    throw std::invalid_argument("predict_data_norm requires 0 < lambda <= gamma");
  const double half_n = 0.5 * p.n;
  if (s - 1.0 <= -half_n && !(moment_q > -(s - 1.0) - half_n))
    throw std::invalid_argument(
        "moment condition violated: need moment order q > -(s-1) - n/2");
  return std::pow(lambda, -(p.k + 1.0) / (p.k + p.l - 1.0)) *
         std::pow(lambda / gamma, half_n - (s - 1.0));
}

void dump_field_csv(const Field& f, std::ostream& os) {
  os << "x,value\n";
  for (int i = 0; i < f.grid.size; ++i)
    os << format_double(f.grid.x(i)) << ','
       << format_double(f.values[static_cast<size_t>(i)]) << '\n';
}

void dump_spectrum_csv(const Field& f, std::ostream& os) {
  os << "xi,abs_fhat\n";
  const auto c = spectrum(f);
  for (int j = 0; j <= f.grid.size / 2; ++j)
    os << format_double(f.grid.xi(j)) << ','
       << format_double(std::abs(c[static_cast<size_t>(j)])) << '\n';
}

}  // namespace slwlab
