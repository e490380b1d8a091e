#include "rollwave/whitham.hpp"

#include <cmath>

namespace rollwave {

WhithamQuasilinear assemble_whitham(const AveragedQuantities& avg) {
  if (!avg.evolution_ok) throw RegimeError("not evolution-type");
  WhithamQuasilinear sys;
  sys.A0 << 1.0, 0.0, avg.dM_dk, avg.dM_dq;
  sys.A1 << -avg.domega_dk, -avg.domega_dq, avg.dN_dk, avg.dN_dq;
  // det(A1 - s A0) = 0, a 2x2 quadratic
  double a = sys.A0.determinant();
  double b = -(sys.A1(0, 0) * sys.A0(1, 1) - sys.A1(0, 1) * sys.A0(1, 0) +
               sys.A0(0, 0) * sys.A1(1, 1) - sys.A0(0, 1) * sys.A1(1, 0));
  double c = sys.A1.determinant();
  double disc = b * b - 4.0 * a * c;
  sys.hyperbolic = disc > 0.0 && std::abs(a) > 0.0;
  if (sys.hyperbolic) {
    double s0 = (-b - std::sqrt(disc)) / (2.0 * a);
    double s1 = (-b + std::sqrt(disc)) / (2.0 * a);
    sys.speeds = {std::min(s0, s1), std::max(s0, s1)};
  }
  return sys;
}

ComovingRoots comoving_roots(const AveragedQuantities& avg, double k_star) {
  // det of [[l + k dc_dk, k dc_dq], [l (dM_dk - M/k), l dM_dq - 1]] in l
  double a = avg.dM_dq;
  double b = k_star * avg.dc_dk * avg.dM_dq - 1.0 -
             k_star * avg.dc_dq * (avg.dM_dk - avg.M / k_star);
  double c = -k_star * avg.dc_dk;
  ComovingRoots out;
  Complex disc = Complex(b * b - 4.0 * a * c, 0.0);
  Complex sq = std::sqrt(disc);
  out.lambda0 = {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)};
  out.real_distinct =
      disc.real() > 0.0 && std::abs(out.lambda0[0] - out.lambda0[1]) > 0.0;
  if (out.real_distinct && out.lambda0[0].real() > out.lambda0[1].real())
    std::swap(out.lambda0[0], out.lambda0[1]);
  for (int j = 0; j < 2; ++j) {
    // mode from the first equation: (l + k dc_dk) k0 + k dc_dq q0 = 0
    Complex l = out.lambda0[j];
    Eigen::Vector2cd mode(Complex(-k_star * avg.dc_dq, 0.0),
                          l + k_star * avg.dc_dk);
    if (mode.norm() < 1e-14) mode << 1.0, 0.0;
    out.modes[j] = mode / mode.norm();
  }
  return out;
}

DispersionCQ dispersion_cq(const AveragedQuantities& avg, double k_star) {
  if (!avg.cparam_ok) throw RegimeError("cparam violated: use (k,qbar) route");
  // chart change (k,qbar) -> (c,qbar) at fixed qbar resp. fixed c
  double dk_dc = 1.0 / avg.dc_dk;
  double dL_dc = -dk_dc / (k_star * k_star);
  double dk_dq_cfix = -avg.dc_dq / avg.dc_dk;
  double dL_dq_cfix = -dk_dq_cfix / (k_star * k_star);
  double dM_dc = avg.dM_dk * dk_dc;
  double dM_dq_cfix = avg.dM_dq + avg.dM_dk * dk_dq_cfix;

  // Determinant of the (c,qbar) plane-wave system for modes
  // e^{lambda t + k nu x}, scaled so the nu^2 coefficient is one.
  DispersionCQ d;
  d.a = (dL_dc * dM_dq_cfix - dL_dq_cfix * dM_dc) / k_star;
  d.b = -(dL_dc + dM_dq_cfix / k_star + avg.M * dL_dq_cfix);
  Complex disc(d.b * d.b - 4.0 * d.a, 0.0);
  Complex sq = std::sqrt(disc);
  d.root_ratios = {(-d.b - sq) / (2.0 * d.a), (-d.b + sq) / (2.0 * d.a)};
  d.hyperbolic = disc.real() > 0.0;
  return d;
}

}  // namespace rollwave
