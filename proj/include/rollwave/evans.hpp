#pragma once

#include "rollwave/operators.hpp"
#include "rollwave/whitham.hpp"

namespace rollwave {

using Mat3c = Eigen::Matrix3cd;
using Vec3c = Eigen::Vector3cd;

struct MonodromyOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
};

// Evans function machinery for one profile: the spectral ODE
// Y' = A(lambda) Y in the co-moving frame with Y = (q, h, h'), its
// monodromy over one period [0, L], and the low-frequency expansion.
class EvansWorkspace {
 public:
  explicit EvansWorkspace(const ProfileOperators& ops);

  const RollWaveProfile& profile() const { return ops_.profile(); }
  double period() const { return L_; }

  Mat3c coefficient_matrix(Complex lambda, double x) const;
  // integral of tr A(lambda) over one period (affine in lambda)
  Complex trace_integral(Complex lambda) const;

  Mat3c monodromy(Complex lambda, MonodromyOptions opt = {}) const;
  Mat3c monodromy_backward(Complex lambda, MonodromyOptions opt = {}) const;

  // det Psi(L; lambda) as a product of sub-period transfer determinants;
  // avoids the eps ||Psi||^3 cancellation floor of one 3x3 determinant.
  Complex monodromy_det(Complex lambda, int pieces = 4,
                        MonodromyOptions opt = {}) const;

  Complex evans(Complex lambda, Complex sigma, MonodromyOptions opt = {}) const;
  Complex evans(const Mat3c& psi, Complex sigma) const;

  // Floquet multiplier of the decaying profile-equation mode, closed form.
  double rho_formula() const;
  // Same multiplier from the backward monodromy at lambda = 0.
  double rho_numeric(MonodromyOptions opt = {}) const;

  // Special solutions at lambda = 0 used by the expansion, evaluated at x.
  Vec3c translation_solution(double x) const;       // (c H', H', H'')
  Vec3c qbar_direction_solution(double x) const;    // (c dH - 1, dH, dH')

  // Decaying Floquet solution h2 of the lambda = 0 system: value/slope at
  // the period ends, its mean over [0, L], and the multiplier actually used.
  struct FloquetData {
    double h2_0 = 0.0, h2p_0 = 0.0;   // h2(0), h2'(0)
    double h2_L = 0.0, h2p_L = 0.0;
    double mean = 0.0;                // <h2>_L
    double rho = 0.0;
  };
  FloquetData floquet_h2(MonodromyOptions opt = {}) const;

  // Appendix determinant det((T(lambda,nu), Z)) reduced to 3x3, and the
  // raw 4x4 as an independent cross-check.
  Complex appendix_det3(Complex lambda, Complex nu) const;
  Complex appendix_det4(Complex lambda, Complex nu) const;

  // (c,qbar)-chart scalars shared with the dispersion.
  struct ChartData {
    double dL_dc, dL_dq;    // q-derivative at fixed c
    double dM_dc, dM_dq;
    double dqk_dc, dqk_dq;  // dk/dc, dk/dq at fixed c
  };
  const ChartData& chart() const { return chart_; }

 private:
  const ProfileOperators& ops_;
  double L_;
  double k_, c_, delta_;
  double a3_mean_ = 0.0;
  FieldSeries H_, dGq_y_, dGh_y_, a1_, a2_, a3_, beta_;
  FieldSeries dHk_, dHq_;  // (k,qbar)-chart parameter derivative fields
  ChartData chart_{};
  mutable std::optional<FloquetData> h2_cache_;
};

struct EvansExpansion {
  Complex gamma;                    // E(lambda, e^nu) ~ gamma D(lambda, nu)
  std::array<Complex, 3> gamma_by_coeff;  // per-quadratic-coefficient ratios
  double gamma_spread = 0.0;        // max pairwise relative disagreement
  double linear_part = 0.0;         // |const+linear| relative to quadratic
  std::array<double, 2> disp_coeffs{};    // D = a l^2 + b l nu + nu^2
  std::vector<double> radii;
  std::vector<double> max_residual;  // max |E - gamma D| per radius
  double slope = 0.0;                // log-log fit of the above
};

struct ExpansionOptions {
  double radius = 1e-3;
  int samples_per_axis = 5;          // 5x5 polydisc tensor
  std::vector<double> slope_radii = {1e-2, 1e-3, 1e-4};
  MonodromyOptions ode{1e-12, 5e-15};
};

EvansExpansion evans_expansion(const EvansWorkspace& ws,
                               const DispersionCQ& disp,
                               ExpansionOptions opt = {});

}  // namespace rollwave
