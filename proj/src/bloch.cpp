#include "rollwave/bloch.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace rollwave {

Complex pair_inner(const CVec& a, const CVec& b) {
  return a.dot(b) / static_cast<double>(a.size() / 2);
}

double fit_slope_above_floor(const std::vector<double>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& floor, double guard,
                             int min_points) {
  int n = static_cast<int>(x.size());
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (y[i] > guard * floor[i]) keep.push_back(i);
  if (static_cast<int>(keep.size()) < min_points) {
    keep.clear();
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return x[a] > x[b]; });
    keep.assign(idx.begin(), idx.begin() + std::min(n, min_points));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i : keep) {
    double a = std::log(x[i]), b = std::log(std::max(y[i], 1e-300));
    sx += a; sy += b; sxx += a * a; sxy += a * b;
  }
  double m = static_cast<double>(keep.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return g;
}

BlochWorkspace::BlochWorkspace(const ProfileOperators& ops)
    : ops_(ops), n_(ops.profile().n()) {
  const auto& prof = ops.profile();
  d1_ = ops.grid().diff_matrix(1);
  const Field& H = prof.H;
  const Field& Q = prof.Q;
  double F = prof.params.froude;
  gh_ = -Q * Q / (H * H) + H / (F * F);
  gq_ = 2.0 * Q / H;
  sh_ = 1.0 + 2.0 * Q * Q / (H * H * H);
  sq_ = -2.0 * Q / (H * H);
}

CMat BlochWorkspace::bloch_matrix(Complex il) const {
  const auto& prof = ops_.profile();
  double k = prof.key.k, c = prof.c, omega = prof.omega;
  double delta = prof.params.viscosity;
  CMat Dl = d1_.cast<Complex>();
  Dl.diagonal().array() += il;

  CMat A(2 * n_, 2 * n_);
  // mass row: k d_y (c h - q)
  A.topLeftCorner(n_, n_) = (k * c) * Dl;
  A.topRightCorner(n_, n_) = (-k) * Dl;
  // momentum row: dG_h[h] + dG_q[q] - omega d_y q
  CMat Ph = (-k) * Dl * gh_.matrix().asDiagonal().toDenseMatrix().cast<Complex>();
  Ph.diagonal() += sh_.matrix().cast<Complex>();
  CMat Pq = (delta * k * k) * (Dl * Dl) -
            k * Dl * gq_.matrix().asDiagonal().toDenseMatrix().cast<Complex>() -
            omega * Dl;
  Pq.diagonal() += sq_.matrix().cast<Complex>();
  A.bottomLeftCorner(n_, n_) = Ph;
  A.bottomRightCorner(n_, n_) = Pq;

  // The grid's Nyquist mode lies in the kernel of the odd spectral
  // derivative, which would hand the mass row a spurious null direction
  // (beta (-1)^i added to cH - Q). Restrict the operator to the dealiased
  // space and park the Nyquist pair far in the stable half-plane.
  Eigen::VectorXcd ny(2 * n_), nyq(2 * n_);
  for (int i = 0; i < n_; ++i) {
    ny[i] = (i % 2 == 0) ? 1.0 : -1.0;
    ny[n_ + i] = 0.0;
    nyq[i] = 0.0;
    nyq[n_ + i] = (i % 2 == 0) ? 1.0 : -1.0;
  }
  double park = delta * k * k * std::pow(std::numbers::pi * n_, 2) + k + 1.0;
  for (const auto& v : {ny, nyq}) {
    CVec av = A * v / static_cast<double>(n_);
    A -= av * v.adjoint();                   // P A
    CVec wa = A.adjoint() * v / static_cast<double>(n_);
    A -= v * wa.adjoint();                   // (P A) P
    A -= (park / n_) * (v * v.adjoint());    // - park on the Nyquist pair
  }
  return A;
}

CMat BlochWorkspace::bloch_matrix_real0() const {
  return bloch_matrix(Complex(0.0, 0.0));
}

CVec BlochWorkspace::translation_mode() const {
  const auto& prof = ops_.profile();
  CVec v(2 * n_);
  v.head(n_) = ops_.Hprime().matrix().cast<Complex>();
  v.tail(n_) = ops_.grid().diff(prof.Q, 1).matrix().cast<Complex>();
  return v;
}

BlochWorkspace::JordanReport BlochWorkspace::jordan_structure() const {
  CMat A = bloch_matrix_real0();
  JordanReport r;
  auto [s1, s2] = smallest_singular_pair(A);
  r.sigma_min = s1;
  r.sigma_second = s2;
  r.sigma_ratio = s2 / s1;

  double Ascale = A.cwiseAbs().maxCoeff();
  CVec phi = translation_mode();
  r.right_kernel_residual =
      (A * phi).cwiseAbs().maxCoeff() / (Ascale * phi.cwiseAbs().maxCoeff());
  // left kernel: constant (1,0) annihilates the range of the mass row
  CVec psi = CVec::Zero(2 * n_);
  psi.head(n_).setConstant(1.0);
  r.left_kernel_residual =
      (A.adjoint() * psi).cwiseAbs().maxCoeff() / (Ascale);

  // generalized eigenvector: A u = phi, bordered with the kernel pair
  int m = 2 * n_;
  CMat B = CMat::Zero(m + 1, m + 1);
  B.topLeftCorner(m, m) = A;
  B.col(m).head(m) = psi;
  B.row(m).head(m) = phi.adjoint() / static_cast<double>(n_);
  CVec rhs = CVec::Zero(m + 1);
  rhs.head(m) = phi;
  Eigen::PartialPivLU<CMat> lu(B);
  CVec sol = lu.solve(rhs);
  CVec u = sol.head(m);
  r.generalized_residual =
      (A * u - phi).cwiseAbs().maxCoeff() / phi.cwiseAbs().maxCoeff();
  // next rung is obstructed iff <(1,0), u> != 0 (mean of the h-component)
  r.rung2_pairing = std::abs(u.head(n_).mean()) /
                    std::max(1e-300, u.cwiseAbs().maxCoeff());
  r.height_two = r.rung2_pairing > 1e-6;
  return r;
}

BlochWorkspace::CriticalPoint BlochWorkspace::critical_at(
    double l, const CMat* prev_basis) const {
  (void)prev_basis;
  CMat A = bloch_matrix(Complex(0.0, l));
  int m = 2 * n_;
  // full QR pass: backward stable, which matters near the defective
  // l -> 0 limit where the critical pair almost merges
  Eigen::ComplexEigenSolver<CMat> es(A);
  if (es.info() != Eigen::Success)
    throw NumericError("branch tracking failed at l");
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()[a]) < std::abs(es.eigenvalues()[b]);
  });

  CriticalPoint out;
  out.l = l;
  out.gap_third = std::abs(es.eigenvalues()[idx[2]]);
  double Ascale = A.cwiseAbs().maxCoeff();

  // Newton-polish each eigenpair in extended precision. Near l = 0 the
  // pair is almost defective and plain QR leaves noise ~ eps ||A|| / angle,
  // which would mask the l^3 tail measured against the modulation system.
  using LC = std::complex<long double>;
  using LMat = Eigen::Matrix<LC, Eigen::Dynamic, Eigen::Dynamic>;
  using LVec = Eigen::Matrix<LC, Eigen::Dynamic, 1>;
  LMat Al = A.cast<LC>();
  auto polish = [&](Complex lam0, const CVec& v0, Complex& lam_out,
                    CVec& v_out) {
    LVec v = v0.cast<LC>();
    LC lam = LC(lam0);
    LMat B(m + 1, m + 1);
    LVec rhs(m + 1), sol(m + 1);
    for (int it = 0; it < 2; ++it) {
      B.topLeftCorner(m, m) = Al;
      B.topLeftCorner(m, m).diagonal().array() -= lam;
      B.col(m).head(m) = -v;
      B.row(m).head(m) = v.adjoint();
      B(m, m) = LC(0.0);
      rhs.head(m) = -(Al * v - lam * v);
      rhs[m] = LC(0.0);
      sol = Eigen::PartialPivLU<LMat>(B).solve(rhs);
      v += sol.head(m);
      lam += sol[m];
      v /= v.norm();
    }
    lam_out = Complex(static_cast<double>(lam.real()),
                      static_cast<double>(lam.imag()));
    v_out = v.unaryExpr([](const LC& z) {
      return Complex(static_cast<double>(z.real()),
                     static_cast<double>(z.imag()));
    });
  };

  for (int j = 0; j < 2; ++j) {
    Complex lam = es.eigenvalues()[idx[j]];
    CVec v = es.eigenvectors().col(idx[j]).normalized();
    polish(lam, v, lam, v);
    out.lambda[j] = lam;
    out.right[j] = v;
    out.residual = std::max(
        out.residual, (A * v - lam * v).cwiseAbs().maxCoeff() / Ascale);
    // left eigenvector by adjoint shifted inverse iteration
    CMat shifted = A - lam * CMat::Identity(m, m);
    Eigen::PartialPivLU<CMat> slu(shifted);
    CVec w = slu.adjoint().solve(v);
    w = slu.adjoint().solve(w / w.norm());
    out.left[j] = w / w.norm();
  }
  // biorthonormalize: <left_i, right_j> = delta_ij through the 2x2 Gram
  Eigen::Matrix2cd M;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) M(i, j) = pair_inner(out.left[i], out.right[j]);
  double mscale = M.cwiseAbs().maxCoeff();
  if (std::abs(M.determinant()) < 1e-13 * mscale * mscale)
    throw NumericError("branch tracking failed at l");
  Eigen::Matrix2cd C = M.conjugate().inverse();
  std::array<CVec, 2> fixed;
  for (int i = 0; i < 2; ++i)
    fixed[i] = C(i, 0) * out.left[0] + C(i, 1) * out.left[1];
  out.left = fixed;

  CMat S(m, 2);
  S.col(0) = out.right[0];
  S.col(1) = out.right[1];
  Eigen::HouseholderQR<CMat> qr(S);
  out.subspace = qr.householderQ() * CMat::Identity(m, 2);
  return out;
}

std::vector<BlochWorkspace::CriticalPoint> BlochWorkspace::critical_curves(
    const std::vector<double>& l_grid) const {
  std::vector<CriticalPoint> out;
  const CMat* prev = nullptr;
  for (double l : l_grid) {
    CriticalPoint p = critical_at(l, prev);
    if (!out.empty()) {
      // branch match with the previous point by eigenvector overlap
      const auto& q = out.back();
      auto overlap = [&](const CVec& a, const CVec& b) {
        return std::abs(a.dot(b)) / (a.norm() * b.norm());
      };
      double keep = overlap(q.right[0], p.right[0]) +
                    overlap(q.right[1], p.right[1]);
      double swap = overlap(q.right[0], p.right[1]) +
                    overlap(q.right[1], p.right[0]);
      if (swap > keep) {
        std::swap(p.lambda[0], p.lambda[1]);
        std::swap(p.right[0], p.right[1]);
        std::swap(p.left[0], p.left[1]);
      }
    }
    out.push_back(std::move(p));
    prev = &out.back().subspace;
  }
  return out;
}

BlochWorkspace::ExpansionCheck BlochWorkspace::eigenvector_expansion(
    const std::vector<CriticalPoint>& curve) const {
  const auto& prof = ops_.profile();
  const auto& d = ops_.derivatives();
  double k = prof.key.k;
  int m = 2 * n_;

  CVec hp(m), dk(m), dq(m);
  hp = translation_mode();
  dk.head(n_) = d.dH_dk.matrix().cast<Complex>();
  dk.tail(n_) = d.dQ_dk.matrix().cast<Complex>();
  dq.head(n_) = d.dH_dq.matrix().cast<Complex>();
  dq.tail(n_) = d.dQ_dq.matrix().cast<Complex>();

  ExpansionCheck out;
  for (const auto& p : curve) {
    Complex il(0.0, p.l);
    CVec p1 = hp / k + il * dk;   // v1 prediction, O(l^2) accurate
    CVec p2 = dq / d.dH_dq.mean();  // v2 prediction, O(l) accurate
    auto dist = [&](const CVec& v) {
      CVec proj = p.subspace * (p.subspace.adjoint() * v);
      return (v - proj).norm() / v.norm();
    };
    out.l.push_back(p.l);
    out.d1.push_back(dist(p1));
    out.d2.push_back(dist(p2));
  }
  auto fit = [](const std::vector<double>& l, const std::vector<double>& dv) {
    int nn = static_cast<int>(l.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < nn; ++i) {
      double x = std::log(l[i]);
      double y = std::log(std::max(dv[i], 1e-300));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  };
  out.exponent1 = fit(out.l, out.d1);
  out.exponent2 = fit(out.l, out.d2);

  // l = 0: the kernel direction alone is smeared by the height-2 Jordan
  // block (sensitivity ~ residual x ||generalized vector||), but the
  // two-dimensional near-null subspace is well conditioned. Check that
  // (H',Q') lies in the singular subspace of the two smallest sigma.
  CMat A0 = bloch_matrix_real0();
  CVec phi = translation_mode();
  Eigen::BDCSVD<CMat> svd(A0, Eigen::ComputeThinV);
  CMat S0 = svd.matrixV().rightCols(2);
  CVec proj = S0 * (S0.adjoint() * phi);
  out.dist_at_zero = (phi - proj).norm() / phi.norm();
  return out;
}

}  // namespace rollwave
