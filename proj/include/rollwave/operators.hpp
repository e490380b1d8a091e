#pragma once

#include "rollwave/profile.hpp"

#include <Eigen/LU>

#include <memory>

namespace rollwave {

// Averaged quantities M, N, omega, c and their (k,qbar)-Jacobian: the
// Whitham flux data at one point of the wave family.
struct AveragedQuantities {
  double M = 0.0, N = 0.0, omega = 0.0, c = 0.0;
  double dM_dk = 0.0, dM_dq = 0.0;
  double dN_dk = 0.0, dN_dq = 0.0;
  double domega_dk = 0.0, domega_dq = 0.0;
  double dc_dk = 0.0, dc_dq = 0.0;
  bool evolution_ok = false;  // dM_dq != 0
  bool cparam_ok = false;     // dc_dk != 0 and dc_dq != 0
};

struct ParameterDerivatives {
  Field dH_dk, dH_dq;  // normalization-compatible: dH(0) = mean(dH)
  double dc_dk = 0.0, dc_dq = 0.0;
  double domega_dk = 0.0, domega_dq = 0.0;
  Field dQ_dk, dQ_dq;
};

// The abstract linear machinery around a converged profile: L, its adjoint
// null vector, the projectors p and Pi, the pseudo-inverse K and the
// parameter-derivative solves.
class ProfileOperators {
 public:
  explicit ProfileOperators(const RollWaveProfile& profile,
                            double flag_threshold = 1e-8);

  const RollWaveProfile& profile() const { return prof_; }
  const Grid& grid() const { return grid_; }

  const Mat& L() const { return L_; }
  Field apply_L(const Field& f) const;
  Field apply_L_adjoint(const Field& f) const;

  const Field& adjoint_null() const { return htilde_; }  // <Htilde;H'> = 1
  const Field& Hprime() const { return hp_; }

  double p(const Field& f) const;
  Field Pi(const Field& f) const;
  Field K(const Field& f) const;

  const Field& A_omega() const { return a_omega_; }
  const Field& A_qbar() const { return a_qbar_; }
  const Field& A_khat() const { return a_khat_; }
  Field A_k() const { return a_khat_ + prof_.c * a_omega_; }

  const ParameterDerivatives& derivatives() const { return derivs_; }
  AveragedQuantities averaged() const;

  // Two smallest singular values of the discrete L (kernel diagnostics).
  std::pair<double, double> smallest_singular_pair() const;

 private:
  RollWaveProfile prof_;
  Grid grid_;
  double flag_threshold_;
  Mat L_;
  Field hp_;       // H*'
  Field htilde_;   // adjoint null vector
  Field a_omega_, a_qbar_, a_khat_;
  double pairing_ = 0.0;  // <Htilde; A_omega>
  Eigen::PartialPivLU<Mat> k_lu_;  // bordered [[L, A_omega],[Htilde^T/n, 0]]
  ParameterDerivatives derivs_;

  Field solve_ranged(const Field& rhs) const;  // K with kernel part removed
};

// Two smallest singular values of a dense matrix, via SVD for small sizes
// and LU-based inverse iteration with deflation for large ones.
std::pair<double, double> smallest_singular_pair(const Mat& A);
std::pair<double, double> smallest_singular_pair(const CMat& A);

}  // namespace rollwave
