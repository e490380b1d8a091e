#pragma once

#include "rollwave/operators.hpp"

#include <array>

namespace rollwave {

// Quasilinear form A0 dU/dt + A1 dU/dx = 0 for U = (k, qbar), built from
// the averaged flux data at one point.
struct WhithamQuasilinear {
  Eigen::Matrix2d A0;
  Eigen::Matrix2d A1;
  // lab-frame characteristic speeds, ascending
  std::array<double, 2> speeds{};
  bool hyperbolic = false;
};

WhithamQuasilinear assemble_whitham(const AveragedQuantities& avg);

// Roots lambda^0_j of the co-moving dispersion written in the (k,qbar)
// chart: lambda^0 k0 + k* dc(k0,q0) = 0, lambda^0 (dM(k0,q0) - M k0/k*) = q0.
// Lab speeds satisfy s_j = c* - lambda^0_j.
struct ComovingRoots {
  std::array<Complex, 2> lambda0{};
  std::array<Eigen::Vector2cd, 2> modes{};  // (k0, qbar0)
  bool real_distinct = false;
};

ComovingRoots comoving_roots(const AveragedQuantities& avg, double k_star);

// Dispersion of the Whitham system in the (c,qbar) parametrization:
// D(lambda,nu) = a lambda^2 + b lambda nu + nu^2 with the displayed
// coefficients; requires cparam (dc_dk != 0).
struct DispersionCQ {
  double a = 0.0;  // lambda^2 coefficient
  double b = 0.0;  // lambda nu coefficient (c-coefficient of nu^2 is 1)
  std::array<Complex, 2> root_ratios{};  // lambda/nu solutions
  bool hyperbolic = false;

  Complex eval(Complex lambda, Complex nu) const {
    return a * lambda * lambda + b * lambda * nu + nu * nu;
  }
};

DispersionCQ dispersion_cq(const AveragedQuantities& avg, double k_star);

}  // namespace rollwave
