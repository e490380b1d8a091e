#pragma once

#include "rollwave/operators.hpp"
#include "rollwave/whitham.hpp"

#include <vector>

namespace rollwave {

// Fields produced by the second-order modulation algebra. The
// antiderivative I applied to a nonzero-mean integrand leaves a
// y-proportional residue which, after d/dq G, is always a multiple of
// y A^qbar(y): value(y) = periodic(y) + ramp * y * A^qbar(y).
struct RampedField {
  CField periodic;
  Complex ramp{0.0, 0.0};

  RampedField& operator+=(const RampedField& o) {
    periodic += o.periodic;
    ramp += o.ramp;
    return *this;
  }
};

// B_T, B_X and the grouped family B[lambda0] at one profile.
class SecondOrderData {
 public:
  explicit SecondOrderData(const ProfileOperators& ops);

  const ProfileOperators& ops() const { return ops_; }

  // direction (a, b) in (k, qbar)
  RampedField B_T(Complex a, Complex b) const;
  RampedField B_X(Complex a, Complex b) const;
  RampedField B_X_hat(Complex a, Complex b) const;  // B_X - c B_T

  // grouped family with dc substituted by -lambda0 a / k (first-order
  // relation): B[lambda0](a,b) = B0 + lambda0 B1 + lambda0^2 B2
  RampedField B0(Complex a, Complex b) const;
  RampedField B1(Complex a, Complex b) const;
  RampedField B2(Complex a, Complex b) const;
  RampedField B_lambda(Complex lambda0, Complex a, Complex b) const;

  // scalar reductions; they require a ramp-free field
  Complex p(const RampedField& f) const;
  Complex mean_K(const RampedField& f) const;  // <K f>

  // <I(f)> with I(f)(0) = 0 and the y-average of the ramp taken as 1/2
  Complex mean_I(const CField& f) const;
  Complex mean_I_of_dH(Complex a, Complex b) const;
  double mean_I_of_H() const;   // <I(H)>
  static double mean_I_of_one() { return 0.5; }

  // R0 for given slow derivatives dT = (dT k, dT qbar), dX = (dX k, dX qbar)
  RampedField R0(const Eigen::Vector2cd& dT, const Eigen::Vector2cd& dX) const;

 private:
  const ProfileOperators& ops_;
  Grid grid_;
  double ramp_guard_ = 1e-6;

  CField dH(Complex a, Complex b) const;
  CField dQ(Complex a, Complex b) const;
  Complex dc(Complex a, Complex b) const;
  // (1/k) dG_q[I(f)] with the ramp residue split off
  RampedField dGq_I(const CField& f) const;
};

struct SecondOrderEigen {
  std::array<Complex, 2> lambda0{};
  std::array<Complex, 2> lambda1{};
  std::array<Eigen::Vector2cd, 2> mode0{};
  std::array<Eigen::Vector2cd, 2> mode1{};  // gauge: mode1 orthogonal to mode0

  Complex mu(int branch, double l, double k_star) const {
    Complex il(0.0, l);
    return k_star * il * (lambda0[branch] + il * lambda1[branch]);
  }
};

SecondOrderEigen second_order_eigen(const SecondOrderData& data);

// lambda1 recomputed with a different gauge for (k1, qbar1); used to verify
// gauge invariance.
std::array<Complex, 2> second_order_lambda1_gauge(const SecondOrderData& data,
                                                  double mix);

}  // namespace rollwave
