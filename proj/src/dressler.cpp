#include "rollwave/dressler.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

namespace rollwave {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Integrand {
  double froude;
  // Denominator h^2 - (F^-2 + 2 F^-1) h + F^-2; positive for h > h_m.
  double denom(double h) const {
    double fi = 1.0 / froude;
    return h * h - (fi * fi + 2.0 * fi) * h + fi * fi;
  }
  double weight(double h) const { return (h * h + h + 1.0) / denom(h); }
};

}  // namespace

double dressler_speed(double froude, double qbar) {
  if (!(froude > 2.0)) throw RegimeError("outside Dressler regime");
  if (qbar < 0.0) throw RegimeError("outside Dressler regime: qbar < 0");
  return std::cbrt(qbar) * (std::cbrt(froude) + std::pow(froude, -2.0 / 3.0));
}

double hmin_threshold(double froude) {
  if (!(froude > 0.0)) throw RegimeError("Froude number must be positive");
  return 1.0 / froude +
         (1.0 + std::sqrt(1.0 + 4.0 * froude)) / (2.0 * froude * froude);
}

double rh_conjugate(double h_plus) {
  if (!(h_plus > 0.0)) throw RegimeError("height must be positive");
  // positive root of h+ x^2 + h+^2 x - 2 = 0
  return (-h_plus * h_plus +
          std::sqrt(h_plus * h_plus * h_plus * h_plus + 8.0 * h_plus)) /
         (2.0 * h_plus);
}

DresslerWave dressler_wave(double froude, double qbar, double h_plus,
                           double quad_tol) {
  if (!(froude > 2.0)) throw RegimeError("outside Dressler regime");
  double hm = hmin_threshold(froude);
  if (!(h_plus > hm)) throw RegimeError("below minimum height");

  DresslerWave w;
  w.froude = froude;
  w.qbar = qbar;
  w.h_plus = h_plus;
  w.h_minus = rh_conjugate(h_plus);
  w.height_scale = std::pow(qbar * froude, 2.0 / 3.0);
  w.c_star = dressler_speed(froude, qbar);

  Integrand ig{froude};
  if (ig.denom(h_plus) <= 0.0 || ig.denom(w.h_minus) <= 0.0)
    throw NumericError("quadrature through critical point");

  double err = 0.0;
  double P = Quad::integrate([&](double h) { return ig.weight(h); }, h_plus,
                             w.h_minus, 12, quad_tol, &err);
  double Q = Quad::integrate([&](double h) { return ig.weight(h) * h; },
                             h_plus, w.h_minus, 12, quad_tol, &err);
  double f2 = froude * froude;
  if (P <= 0.0) throw NumericError("degenerate Dressler period");
  w.k = f2 / (w.height_scale * P);
  w.mean_height = w.height_scale * Q / P;
  return w;
}

double DresslerWave::position_of_height(double h) const {
  Integrand ig{froude};
  double err = 0.0;
  double part = Quad::integrate([&](double s) { return ig.weight(s); }, h_plus,
                                h, 12, 1e-12, &err);
  return height_scale / (froude * froude) * part;
}

double DresslerWave::height_at_position(double x) const {
  double length = 1.0 / k;
  if (x <= 0.0) return h_plus;
  if (x >= length) return h_minus;
  Integrand ig{froude};
  double scale = height_scale / (froude * froude);
  double lo = h_plus, hi = h_minus;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * h_minus; ++it) {
    double mid = 0.5 * (lo + hi);
    if (position_of_height(mid) < x)
      lo = mid;
    else
      hi = mid;
    // Newton polish once bracketed tightly: dx/dh = scale * weight(h)
    if (hi - lo < 1e-6) {
      double h = 0.5 * (lo + hi);
      for (int j = 0; j < 4; ++j) {
        double r = position_of_height(h) - x;
        h -= r / (scale * ig.weight(h));
        h = std::clamp(h, h_plus, h_minus);
      }
      return h;
    }
  }
  return 0.5 * (lo + hi);
}

Field DresslerWave::sample_profile(const Grid& grid) const {
  int n = grid.size();
  Field out(n);
  double length = 1.0 / k;
  // Cumulative table h -> x on a fine grid, then invert per sample.
  const int table = 512;
  std::vector<double> hs(table + 1), xs(table + 1);
  Integrand ig{froude};
  double scale = height_scale / (froude * froude);
  double err = 0.0;
  hs[0] = h_plus;
  xs[0] = 0.0;
  for (int i = 1; i <= table; ++i) {
    hs[i] = h_plus + (h_minus - h_plus) * i / table;
    double piece = Quad::integrate([&](double s) { return ig.weight(s); },
                                   hs[i - 1], hs[i], 10, 1e-12, &err);
    xs[i] = xs[i - 1] + scale * piece;
  }
  for (int i = 0; i < n; ++i) {
    double x = length * i / n;
    // locate in the monotone table
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    int j = std::clamp<int>(static_cast<int>(it - xs.begin()), 1, table);
    double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    double h = hs[j - 1] + t * (hs[j] - hs[j - 1]);
    for (int nw = 0; nw < 3; ++nw) {
      double r = (xs[j - 1] +
                  scale * Quad::integrate(
                              [&](double s) { return ig.weight(s); },
                              hs[j - 1], h, 10, 1e-12, &err)) -
                 x;
      h -= r / (scale * ig.weight(h));
      h = std::clamp(h, h_plus, h_minus);
    }
    out[i] = height_scale * h;
  }
  return out;
}

double dressler_hplus_for_wavenumber(double froude, double qbar, double k,
                                     double tol) {
  if (!(k > 0.0)) throw RegimeError("wavenumber must be positive");
  double hm = hmin_threshold(froude);
  double lo = hm * (1.0 + 1e-9), hi = 1.0 - 1e-12;
  // k is increasing in h_plus: k -> 0 at h_m, k -> infinity at 1.
  auto k_of = [&](double hp) { return dressler_wave(froude, qbar, hp).k; };
  if (k_of(lo) > k || k_of(hi) < k)
    throw RegimeError("wavenumber outside Dressler range");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    (k_of(mid) < k ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rollwave
