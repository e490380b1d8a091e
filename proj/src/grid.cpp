#include "rollwave/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace rollwave {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Signed frequency of DFT bin m on an n-point grid.
inline int signed_freq(int m, int n) { return m <= n / 2 ? m : m - n; }

CField dft(const Field& f) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out;
  Eigen::VectorXd in = f.matrix();
  fft.fwd(out, in);
  return out.array() / static_cast<double>(f.size());
}

Field idft(const CField& c) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd in = (c * static_cast<double>(c.size())).matrix();
  Eigen::VectorXcd out;
  fft.inv(out, in);
  return out.real().array();
}
}  // namespace

Grid::Grid(int n) : n_(n) {
  if (!power_of_two(n) || n < 16)
    throw RegimeError("grid size must be a power of two >= 16");
}

Field Grid::nodes() const {
  Field y(n_);
  for (int i = 0; i < n_; ++i) y[i] = static_cast<double>(i) / n_;
  return y;
}

void Grid::require_finite(const Field& f) {
  if (!f.isFinite().all()) throw NumericError("non-finite field");
}

CField Grid::spectrum(const Field& f) const {
  if (f.size() != n_) throw NumericError("field size mismatch");
  return dft(f);
}

Field Grid::from_spectrum(const CField& c) const { return idft(c); }

Field Grid::diff(const Field& f, int order) const {
  require_finite(f);
  CField c = dft(f);
  for (int m = 0; m < n_; ++m) {
    double freq = kTwoPi * signed_freq(m, n_);
    if (m == n_ / 2 && (order % 2 == 1)) {
      c[m] = 0.0;  // Nyquist mode has no odd derivative on the grid
      continue;
    }
    c[m] *= std::pow(Complex(0.0, freq), order);
  }
  return idft(c);
}

CField Grid::diff(const CField& f, int order) const {
  CField re = diff(Field(f.real()), order).cast<Complex>();
  CField im = diff(Field(f.imag()), order).cast<Complex>();
  return re + Complex(0.0, 1.0) * im;
}

Grid::Antiderivative Grid::antiderivative(const Field& f) const {
  require_finite(f);
  CField c = dft(f);
  double ramp = c[0].real();
  c[0] = 0.0;
  for (int m = 1; m < n_; ++m) {
    if (m == n_ / 2) {
      // cos(pi n y) integrates to sin(pi n y)/(pi n), zero at all nodes
      c[m] = 0.0;
      continue;
    }
    double freq = kTwoPi * signed_freq(m, n_);
    c[m] /= Complex(0.0, freq);
  }
  Field periodic = idft(c);
  periodic -= periodic[0];  // pin I(f)(0) = 0
  return {periodic, ramp};
}

Field Grid::resample(const Field& f, int m) const {
  if (m == n_) return f;
  CField c = dft(f);
  CField out = CField::Zero(m);
  int keep = std::min(n_, m) / 2;
  out[0] = c[0];
  for (int j = 1; j < keep; ++j) {
    out[j] = c[j];
    out[m - j] = c[n_ - j];
  }
  // split the Nyquist mode symmetrically when upsampling
  if (m > n_) {
    out[keep] = 0.5 * c[n_ / 2];
    out[m - keep] = 0.5 * c[n_ / 2];
  }
  return idft(out);
}

double Grid::eval(const Field& f, double y) const {
  return FieldSeries(*this, f)(y);
}

Field Grid::translate(const Field& f, double shift) const {
  CField c = dft(f);
  for (int m = 0; m < n_; ++m) {
    if (m == n_ / 2) {
      c[m] *= std::cos(kTwoPi * (n_ / 2) * shift);
      continue;
    }
    double freq = kTwoPi * signed_freq(m, n_);
    c[m] *= std::exp(Complex(0.0, -freq * shift));
  }
  return idft(c);
}

Field Grid::filter(const Field& f, double alpha, int p) const {
  CField c = dft(f);
  int mmax = n_ / 2;
  for (int m = 0; m < n_; ++m) {
    double frac = std::abs(signed_freq(m, n_)) / static_cast<double>(mmax);
    c[m] *= std::exp(-alpha * std::pow(frac, p));
  }
  return idft(c);
}

Mat Grid::diff_matrix(int order) const {
  Mat d(n_, n_);
  Field e = Field::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    e[j] = 1.0;
    d.col(j) = diff(e, order).matrix();
    e[j] = 0.0;
  }
  return d;
}

FieldSeries::FieldSeries(const Grid& g, const Field& f) {
  CField c = g.spectrum(f);
  int n = g.size();
  coef_.resize(n / 2 + 1);
  for (int m = 0; m <= n / 2; ++m) coef_[m] = c[m];
}

double FieldSeries::operator()(double y) const {
  return derivative(y, 0);
}

double FieldSeries::derivative(double y, int order) const {
  int half = static_cast<int>(coef_.size()) - 1;
  double acc = order == 0 ? coef_[0].real() : 0.0;
  const Complex w1 = std::exp(Complex(0.0, kTwoPi * y));
  Complex w = w1;
  for (int m = 1; m < half; ++m) {
    Complex factor(1.0, 0.0);
    for (int o = 0; o < order; ++o) factor *= Complex(0.0, kTwoPi * m);
    acc += 2.0 * (factor * coef_[m] * w).real();
    w *= w1;
  }
  // Nyquist: real cosine mode; odd derivatives dropped, matching Grid::diff
  if (order % 2 == 0) {
    double w = kTwoPi * half;
    double ny = std::cos(w * y) * std::pow(w, order);
    if (order % 4 == 2) ny = -ny;
    acc += coef_[half].real() * ny;
  }
  return acc;
}

}  // namespace rollwave
