#pragma once

#include "rollwave/operators.hpp"

#include <vector>

namespace rollwave {

// Bloch-Floquet analysis of the linearized operator about one profile:
// [A_check(l) f](y) = e^{-ily} [A (e^{il .} f)](y), discretized densely on
// the 2n Fourier-collocation unknowns (h, q).
class BlochWorkspace {
 public:
  explicit BlochWorkspace(const ProfileOperators& ops);

  const ProfileOperators& ops() const { return ops_; }
  int n() const { return n_; }

  CMat bloch_matrix(Complex il) const;  // pass il = i*l
  CMat bloch_matrix_real0() const;      // A_check(0), real entries promoted

  // (h,q) pairs as stacked 2n vectors
  CVec translation_mode() const;  // (H', Q')
  static double pair_inner_weight() { return 1.0; }

  struct JordanReport {
    double sigma_min = 0.0;
    double sigma_second = 0.0;
    double sigma_ratio = 0.0;           // second / smallest
    double left_kernel_residual = 0.0;  // |(1,0)^T A_check(0)| scaled
    double right_kernel_residual = 0.0;
    double generalized_residual = 0.0;  // |A u - (H',Q')|
    double rung2_pairing = 0.0;         // |<(1,0), u>| (nonzero => height 2)
    bool height_two = false;
  };
  JordanReport jordan_structure() const;

  struct CriticalPoint {
    double l = 0.0;
    std::array<Complex, 2> lambda{};
    std::array<CVec, 2> right{};
    std::array<CVec, 2> left{};  // biorthonormal: <left_i, right_j> = d_ij
    CMat subspace;               // orthonormal basis of the 2-dim subspace
    double gap_third = 0.0;      // |third smallest eigenvalue|
    double residual = 0.0;       // max ||A v - lambda v|| / ||A||
  };
  // Track the two critical curves over an l-grid (branch-matched by
  // eigenvector overlap).
  std::vector<CriticalPoint> critical_curves(
      const std::vector<double>& l_grid) const;

  // Projective distances of the predicted expansion vectors to the
  // computed critical subspace, with fitted decay exponents.
  struct ExpansionCheck {
    std::vector<double> l, d1, d2;
    double exponent1 = 0.0, exponent2 = 0.0;
    double dist_at_zero = 0.0;  // kernel vs (H',Q'), projective
  };
  ExpansionCheck eigenvector_expansion(
      const std::vector<CriticalPoint>& curve) const;

 private:
  const ProfileOperators& ops_;
  int n_;
  Mat d1_;
  Field gh_, gq_, sh_, sq_;  // dG/dh, dG/dq, dS/dh, dS/dq on the profile

  CriticalPoint critical_at(double l, const CMat* prev_basis) const;
};

// discrete L^2_per pairing of stacked (h,q) vectors
Complex pair_inner(const CVec& a, const CVec& b);

// log-log least-squares slope, ignoring points within `guard` times the
// per-point noise floor (at least min_points are kept, largest first).
double fit_slope_above_floor(const std::vector<double>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& floor,
                             double guard = 4.0, int min_points = 4);

std::vector<double> geometric_grid(double lo, double hi, int count);

}  // namespace rollwave
