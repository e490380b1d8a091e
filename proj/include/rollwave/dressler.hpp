#pragma once

#include "rollwave/grid.hpp"
#include "rollwave/types.hpp"

namespace rollwave {

// Closed-form inviscid (delta = 0) roll-waves. All heights are in the
// nondimensional variables h = H / H_c with H_c = (qbar F)^{2/3}; the
// smooth branch runs from h_plus up to the Rankine-Hugoniot conjugate
// h_minus with a Lax shock closing the period.
struct DresslerWave {
  double froude = 0.0;
  double qbar = 0.0;
  double h_plus = 0.0;
  double h_minus = 0.0;
  double height_scale = 0.0;  // H_c
  double c_star = 0.0;
  double k = 0.0;
  double mean_height = 0.0;  // dimensional: H_c * Q(h+)/P(h+)

  // x(h): position along the smooth branch, x(h_plus) = 0, x(h_minus) = 1/k.
  double position_of_height(double h) const;
  // h(x) on [0, 1/k), inverse of the above.
  double height_at_position(double x) const;

  // Dimensional profile sampled on y = k x in [0,1), shock at y = 0.
  Field sample_profile(const Grid& grid) const;
};

double dressler_speed(double froude, double qbar);
double hmin_threshold(double froude);
double rh_conjugate(double h_plus);

DresslerWave dressler_wave(double froude, double qbar, double h_plus,
                           double quad_tol = 1e-10);

// Smallest admissible wavenumber is 0 (h_plus -> h_m); largest is infinity
// (h_plus -> 1). Finds h_plus with k(h_plus) = k by bisection.
double dressler_hplus_for_wavenumber(double froude, double qbar, double k,
                                     double tol = 1e-12);

}  // namespace rollwave
