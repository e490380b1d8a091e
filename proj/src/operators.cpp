#include "rollwave/operators.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace rollwave {

namespace {

// Inverse iteration on (A^T A)^-1 with deflation for the second value.
template <typename Matrix>
std::pair<double, double> smallest_pair_iterative(const Matrix& A) {
  using Scalar = typename Matrix::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Eigen::PartialPivLU<Matrix> lu(A);
  Eigen::PartialPivLU<Matrix> lut(Matrix(A.adjoint()));
  int n = static_cast<int>(A.rows());

  auto iterate = [&](Vector v, const Vector* deflate) {
    double sigma = 0.0;
    for (int it = 0; it < 60; ++it) {
      if (deflate) v -= (*deflate) * (deflate->adjoint() * v);
      v.normalize();
      Vector w = lut.solve(v);   // w = A^-T v
      Vector z = lu.solve(w);    // z = A^-1 w
      if (deflate) z -= (*deflate) * (deflate->adjoint() * z);
      double nz = z.norm();
      sigma = 1.0 / std::sqrt(nz);
      v = z / nz;
    }
    if (deflate) v -= (*deflate) * (deflate->adjoint() * v);
    v.normalize();
    return std::make_pair(sigma, v);
  };

  Vector v0 = Vector::Zero(n);
  for (int i = 0; i < n; ++i)
    v0[i] = Scalar(std::cos(0.7 * i + 0.3));  // deterministic start
  auto [s1, v1] = iterate(v0, nullptr);
  Vector v0b = Vector::Zero(n);
  for (int i = 0; i < n; ++i) v0b[i] = Scalar(std::sin(1.3 * i + 0.1));
  auto [s2, v2] = iterate(v0b, &v1);
  if (s2 < s1) std::swap(s1, s2);
  return {s1, s2};
}

}  // namespace

std::pair<double, double> smallest_singular_pair(const Mat& A) {
  if (A.rows() <= 1024) {
    Eigen::BDCSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    return {s[s.size() - 1], s[s.size() - 2]};
  }
  return smallest_pair_iterative(A);
}

std::pair<double, double> smallest_singular_pair(const CMat& A) {
  if (A.rows() <= 1024) {
    Eigen::BDCSVD<CMat> svd(A);
    const auto& s = svd.singularValues();
    return {s[s.size() - 1], s[s.size() - 2]};
  }
  return smallest_pair_iterative(A);
}

ProfileOperators::ProfileOperators(const RollWaveProfile& profile,
                                   double flag_threshold)
    : prof_(profile), grid_(profile.n()), flag_threshold_(flag_threshold) {
  const auto& p = prof_.params;
  const auto& key = prof_.key;
  double k = key.k, c = prof_.c;
  const Field& H = prof_.H;
  const Field& Q = prof_.Q;

  ProfileSolver solver(prof_.n());
  L_ = solver.linearized_matrix(p, key, H, c);
  hp_ = grid_.diff(H, 1);

  // A-fields per their defining displays.
  a_omega_ = 2.0 * c * hp_ + calG_dq(grid_, p, k, H, Q, H) / k;
  a_qbar_ = calG_dq(grid_, p, k, H, Q, Field(Field::Ones(prof_.n())));
  a_khat_ = -c * c * hp_ - calG_dk(grid_, p, k, H, Q);

  int n = prof_.n();

  // Adjoint null vector via a bordered solve; normalization <Htilde;H'> = 1
  // is built into the border row.
  {
    Mat B = Mat::Zero(n + 1, n + 1);
    B.topLeftCorner(n, n) = L_.transpose();
    B.col(n).head(n) = hp_.matrix();
    B.row(n).head(n) = hp_.matrix().transpose() / n;
    Eigen::PartialPivLU<Mat> lu(B);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs[n] = 1.0;
    Eigen::VectorXd sol = lu.solve(rhs);
    htilde_ = sol.head(n).array();
  }

  pairing_ = Grid::inner(htilde_, a_omega_);
  if (std::abs(pairing_) < 1e-12)
    throw NumericError("A^omega in range: parametrization assumption fails");

  // Pseudo-inverse K = L^-1 Pi through one bordered factorization.
  {
    Mat B = Mat::Zero(n + 1, n + 1);
    B.topLeftCorner(n, n) = L_;
    B.col(n).head(n) = a_omega_.matrix();
    B.row(n).head(n) = htilde_.matrix().transpose() / n;
    k_lu_.compute(B);
    double piv_min = k_lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    double piv_max = k_lu_.matrixLU().diagonal().cwiseAbs().maxCoeff();
    if (!(piv_min > 1e-14 * piv_max))
      throw NumericError("unexpected degeneracy");
  }

  // Parameter derivatives from the linearized solves (LLc route):
  //   L[dH] = -k dc A^omega + (direction k) A^k_hat + (direction q) A^qbar
  double dc_dk = this->p(a_khat_) / k;
  double dc_dq = this->p(a_qbar_) / k;
  auto solve_direction = [&](const Field& a, double dc) {
    Field rhs = a - k * dc * a_omega_;
    Field h0 = solve_ranged(rhs);
    // kernel component fixed by the differentiated normalization
    double alpha = -(h0[0] - h0.mean()) / hp_[0];
    return Field(h0 + alpha * hp_);
  };
  derivs_.dc_dk = dc_dk;
  derivs_.dc_dq = dc_dq;
  derivs_.domega_dk = -c - k * dc_dk;
  derivs_.domega_dq = -k * dc_dq;
  derivs_.dH_dk = solve_direction(a_khat_, dc_dk);
  derivs_.dH_dq = solve_direction(a_qbar_, dc_dq);
  derivs_.dQ_dk = dc_dk * H + c * derivs_.dH_dk;
  derivs_.dQ_dq = dc_dq * H + c * derivs_.dH_dq - 1.0;
}

Field ProfileOperators::apply_L(const Field& f) const {
  const auto& p = prof_.params;
  double k = prof_.key.k, c = prof_.c;
  return k * c * c * grid_.diff(f, 1) +
         calG_dh(grid_, p, k, prof_.H, prof_.Q, f) +
         c * calG_dq(grid_, p, k, prof_.H, prof_.Q, f);
}

Field ProfileOperators::apply_L_adjoint(const Field& f) const {
  return (L_.transpose() * f.matrix()).array();
}

double ProfileOperators::p(const Field& f) const {
  return Grid::inner(htilde_, f) / pairing_;
}

Field ProfileOperators::Pi(const Field& f) const {
  return f - p(f) * a_omega_;
}

Field ProfileOperators::solve_ranged(const Field& rhs) const {
  int n = prof_.n();
  Eigen::VectorXd b(n + 1);
  b.head(n) = rhs.matrix();
  b[n] = 0.0;
  Eigen::VectorXd sol = k_lu_.solve(b);
  return sol.head(n).array();
}

Field ProfileOperators::K(const Field& f) const { return solve_ranged(f); }

AveragedQuantities ProfileOperators::averaged() const {
  AveragedQuantities avg;
  avg.c = prof_.c;
  avg.omega = prof_.omega;
  avg.M = prof_.H.mean();
  avg.N = prof_.c * avg.M - prof_.key.qbar;
  avg.dc_dk = derivs_.dc_dk;
  avg.dc_dq = derivs_.dc_dq;
  avg.domega_dk = derivs_.domega_dk;
  avg.domega_dq = derivs_.domega_dq;
  avg.dM_dk = derivs_.dH_dk.mean();
  avg.dM_dq = derivs_.dH_dq.mean();
  avg.dN_dk = avg.dc_dk * avg.M + prof_.c * avg.dM_dk;
  avg.dN_dq = avg.dc_dq * avg.M + prof_.c * avg.dM_dq - 1.0;
  avg.evolution_ok = std::abs(avg.dM_dq) > flag_threshold_;
  avg.cparam_ok = std::abs(avg.dc_dk) > flag_threshold_ &&
                  std::abs(avg.dc_dq) > flag_threshold_;
  return avg;
}

std::pair<double, double> ProfileOperators::smallest_singular_pair() const {
  return rollwave::smallest_singular_pair(L_);
}

}  // namespace rollwave
