#pragma once

#include "rollwave/types.hpp"

namespace rollwave {

// Uniform Fourier collocation grid on [0,1). All calculus (derivative,
// antiderivative, mean, interpolation) uses the discrete Fourier
// representation, so mean(diff(f)) = 0 exactly and derivatives are exact
// for band-limited fields.
class Grid {
 public:
  explicit Grid(int n);

  int size() const { return n_; }
  double spacing() const { return 1.0 / n_; }
  Field nodes() const;

  Field diff(const Field& f, int order = 1) const;
  CField diff(const CField& f, int order = 1) const;

  // I(f)(y) = int_0^y f. Returned as ramp * y + periodic with
  // periodic(0) = 0 and ramp = mean(f).
  struct Antiderivative {
    Field periodic;
    double ramp = 0.0;
  };
  Antiderivative antiderivative(const Field& f) const;

  static double mean(const Field& f) { return f.mean(); }

  // <f;g> = int_0^1 f g, the L^2_per pairing at the discrete level.
  static double inner(const Field& f, const Field& g) {
    return (f * g).mean();
  }

  CField spectrum(const Field& f) const;      // full-length DFT / n
  Field from_spectrum(const CField& c) const; // inverse, real part

  // Trigonometric interpolation.
  Field resample(const Field& f, int m) const;
  double eval(const Field& f, double y) const;
  Field translate(const Field& f, double shift) const;  // f(y - shift)

  // Damps high modes: multiply mode m by exp(-alpha (|m|/m_max)^p).
  Field filter(const Field& f, double alpha = 36.0, int p = 16) const;

  // Dense differentiation matrix (consistent with diff()).
  Mat diff_matrix(int order) const;

  static void require_finite(const Field& f);

 private:
  int n_;
};

// Trig-series evaluator for repeated off-grid sampling of one field.
class FieldSeries {
 public:
  FieldSeries() = default;
  FieldSeries(const Grid& g, const Field& f);
  double operator()(double y) const;
  double derivative(double y, int order = 1) const;
  int modes() const { return static_cast<int>(coef_.size()); }

 private:
  CVec coef_;  // one-sided coefficients c_0..c_{n/2}
};

}  // namespace rollwave
