#include "rollwave/evans.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace boost::numeric::odeint {
// real-valued infinity norms for complex Eigen states
template <int N>
struct vector_space_norm_inf<Eigen::Matrix<std::complex<double>, N, 1>> {
  using result_type = double;
  double operator()(const Eigen::Matrix<std::complex<double>, N, 1>& m) const {
    return m.cwiseAbs().maxCoeff();
  }
};
}  // namespace boost::numeric::odeint

namespace rollwave {

namespace ode = boost::numeric::odeint;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename State, typename Rhs>
void integrate_ode(Rhs rhs, State& y, double x0, double x1,
                   const MonodromyOptions& opt) {
  using stepper_t =
      ode::runge_kutta_fehlberg78<State, double, State, double,
                                  ode::vector_space_algebra>;
  try {
    ode::integrate_adaptive(ode::make_controlled(opt.atol, opt.rtol, stepper_t()),
                            rhs, y, x0, x1, (x1 - x0) / 64.0);
  } catch (const std::exception&) {
    throw NumericError("stiff integration failure (reduce delta floor)");
  }
}
}  // namespace

EvansWorkspace::EvansWorkspace(const ProfileOperators& ops) : ops_(ops) {
  const auto& prof = ops.profile();
  if (!(prof.params.viscosity > 0.0))
    throw RegimeError("Evans machinery requires delta > 0");
  if (!(prof.c != 0.0)) throw NumericError("degenerate reduction");
  const Grid& g = ops.grid();
  k_ = prof.key.k;
  c_ = prof.c;
  delta_ = prof.params.viscosity;
  L_ = 1.0 / k_;

  const Field& H = prof.H;
  const Field& Q = prof.Q;
  double F = prof.params.froude;
  Field gq = 2.0 * Q / H;
  Field gh = -Q * Q / (H * H) + H / (F * F);
  Field sq = -2.0 * Q / (H * H);
  Field sh = 1.0 + 2.0 * Q * Q / (H * H * H);

  H_ = FieldSeries(g, H);
  dGq_y_ = FieldSeries(g, gq);
  dGh_y_ = FieldSeries(g, gh);
  a1_ = FieldSeries(g, Field(k_ * g.diff(gq, 1) - sq));
  a2_ = FieldSeries(g, Field(k_ * g.diff(gh, 1) - sh));
  Field a3 = gh + c_ * gq - c_ * c_;
  a3_ = FieldSeries(g, a3);
  a3_mean_ = a3.mean();
  beta_ = FieldSeries(g, Field(gq - c_));

  const auto& d = ops.derivatives();
  dHk_ = FieldSeries(g, d.dH_dk);
  dHq_ = FieldSeries(g, d.dH_dq);

  auto avg = ops.averaged();
  if (!avg.cparam_ok) throw RegimeError("cparam violated: use (k,qbar) route");
  double dk_dc = 1.0 / avg.dc_dk;
  chart_.dL_dc = -dk_dc / (k_ * k_);
  chart_.dqk_dc = dk_dc;
  chart_.dqk_dq = -avg.dc_dq / avg.dc_dk;
  chart_.dL_dq = -chart_.dqk_dq / (k_ * k_);
  chart_.dM_dc = avg.dM_dk * dk_dc;
  chart_.dM_dq = avg.dM_dq + avg.dM_dk * chart_.dqk_dq;
}

Mat3c EvansWorkspace::coefficient_matrix(Complex lambda, double x) const {
  double y = x * k_;
  y -= std::floor(y);
  double dc = delta_ * c_;
  Complex aq = (a1_(y) + lambda) / dc;
  Complex ah = (a2_(y) - lambda * beta_(y)) / dc;
  Complex ahp = (a3_(y) + delta_ * lambda) / dc;
  Mat3c A;
  A << 0.0, -lambda, Complex(c_), 0.0, 0.0, 1.0, aq, ah, ahp;
  return A;
}

Complex EvansWorkspace::trace_integral(Complex lambda) const {
  // tr A = a_hp, whose periodic part integrates exactly to its mean
  return (L_ * (a3_mean_ + delta_ * lambda)) / (delta_ * c_);
}

namespace {
using State9 = Eigen::Matrix<Complex, 9, 1>;

Mat3c unflatten(const State9& s) {
  return Eigen::Map<const Mat3c>(s.data());
}
}  // namespace

Mat3c EvansWorkspace::monodromy(Complex lambda, MonodromyOptions opt) const {
  State9 psi;
  Eigen::Map<Mat3c>(psi.data()) = Mat3c::Identity();
  auto rhs = [&](const State9& y, State9& dy, double x) {
    Eigen::Map<Mat3c>(dy.data()) =
        coefficient_matrix(lambda, x) * unflatten(y);
  };
  integrate_ode(rhs, psi, 0.0, L_, opt);
  return unflatten(psi);
}

Complex EvansWorkspace::monodromy_det(Complex lambda, int pieces,
                                      MonodromyOptions opt) const {
  Complex det(1.0, 0.0);
  for (int j = 0; j < pieces; ++j) {
    State9 t;
    Eigen::Map<Mat3c>(t.data()) = Mat3c::Identity();
    auto rhs = [&](const State9& y, State9& dy, double x) {
      Eigen::Map<Mat3c>(dy.data()) =
          coefficient_matrix(lambda, x) * unflatten(y);
    };
    integrate_ode(rhs, t, j * L_ / pieces, (j + 1) * L_ / pieces, opt);
    det *= unflatten(t).determinant();
  }
  return det;
}

Mat3c EvansWorkspace::monodromy_backward(Complex lambda,
                                         MonodromyOptions opt) const {
  // d/dx Psi^-1 = -Psi^-1 A; integrating to L yields the inverse monodromy.
  State9 m;
  Eigen::Map<Mat3c>(m.data()) = Mat3c::Identity();
  auto rhs = [&](const State9& y, State9& dy, double x) {
    Eigen::Map<Mat3c>(dy.data()) =
        -unflatten(y) * coefficient_matrix(lambda, x);
  };
  integrate_ode(rhs, m, 0.0, L_, opt);
  return unflatten(m);
}

Complex EvansWorkspace::evans(const Mat3c& psi, Complex sigma) const {
  return (psi - sigma * Mat3c::Identity()).determinant();
}

Complex EvansWorkspace::evans(Complex lambda, Complex sigma,
                              MonodromyOptions opt) const {
  return evans(monodromy(lambda, opt), sigma);
}

double EvansWorkspace::rho_formula() const {
  return std::exp(L_ * a3_mean_ / (delta_ * c_));
}

double EvansWorkspace::rho_numeric(MonodromyOptions opt) const {
  Mat3c inv = monodromy_backward(0.0, opt);
  Eigen::ComplexEigenSolver<Mat3c> es(inv);
  int imax = 0;
  es.eigenvalues().cwiseAbs().maxCoeff(&imax);
  Complex mu = es.eigenvalues()[imax];
  if (std::abs(mu.imag()) > 1e-6 * std::abs(mu))
    throw NumericError("h2 extraction failed");
  return 1.0 / mu.real();
}

Vec3c EvansWorkspace::translation_solution(double x) const {
  double y = x * k_;
  y -= std::floor(y);
  double hp = k_ * H_.derivative(y, 1);
  double hpp = k_ * k_ * H_.derivative(y, 2);
  return Vec3c(Complex(c_ * hp), Complex(hp), Complex(hpp));
}

Vec3c EvansWorkspace::qbar_direction_solution(double x) const {
  double y = x * k_;
  double yw = y - std::floor(y);
  double a = chart_.dqk_dq;  // dk/dqbar at fixed c
  // d/dk[H_y(kx)] = x H_y'(kx) + dH_dk(kx)
  double W = dHq_(yw) + a * (x * H_.derivative(yw, 1) + dHk_(yw));
  double Wp = k_ * dHq_.derivative(yw, 1) +
              a * (H_.derivative(yw, 1) + x * k_ * H_.derivative(yw, 2) +
                   k_ * dHk_.derivative(yw, 1));
  return Vec3c(Complex(c_ * W - 1.0), Complex(W), Complex(Wp));
}

EvansWorkspace::FloquetData EvansWorkspace::floquet_h2(
    MonodromyOptions opt) const {
  if (h2_cache_) return *h2_cache_;
  Mat3c inv = monodromy_backward(0.0, opt);
  Eigen::ComplexEigenSolver<Mat3c> es(inv);
  int imax = 0;
  es.eigenvalues().cwiseAbs().maxCoeff(&imax);
  Complex mu = es.eigenvalues()[imax];
  Vec3c v = es.eigenvectors().col(imax);
  if (std::abs(mu.imag()) > 1e-6 * std::abs(mu) ||
      std::abs(v[1]) < 1e-8 * v.norm())
    throw NumericError("h2 extraction failed");
  v /= v[1];  // normalize h2(0) = 1
  // sanity: the lambda=0 decaying mode satisfies q = c h
  if (std::abs(v[0] - c_ * v[1]) > 1e-6 * std::abs(v[0]))
    throw NumericError("h2 extraction failed");

  // forward integration with an accumulated integral of h2
  using State = Eigen::Vector4cd;
  State y;
  y << v[0], v[1], v[2], Complex(0.0);
  auto rhs = [&](const State& s, State& ds, double x) {
    Mat3c A = coefficient_matrix(0.0, x);
    ds.head<3>() = A * s.head<3>();
    ds[3] = s[1];
  };
  integrate_ode(rhs, y, 0.0, L_, opt);

  FloquetData out;
  out.h2_0 = v[1].real();
  out.h2p_0 = v[2].real();
  out.h2_L = y[1].real();
  out.h2p_L = y[2].real();
  out.mean = y[3].real() / L_;
  out.rho = 1.0 / mu.real();
  h2_cache_ = out;
  return out;
}

Complex EvansWorkspace::appendix_det3(Complex lambda, Complex nu) const {
  FloquetData h2 = floquet_h2();
  const auto& prof = ops_.profile();
  double M = prof.H.mean();
  Grid g(prof.n());
  double Hp0 = k_ * g.diff(prof.H, 1)[0];    // x-frame H'(0)
  double Hpp0 = k_ * k_ * g.diff(prof.H, 2)[0];
  double br_c = -chart_.dL_dc * Hp0;         // [d_c H] = -d_c L H'(0)
  double br_cp = -chart_.dL_dc * Hpp0;
  double br_q = -chart_.dL_dq * Hp0;
  double br_qp = -chart_.dL_dq * Hpp0;

  Eigen::Matrix3cd T;
  T(0, 0) = lambda * lambda * chart_.dM_dc + lambda * nu * k_ * M;
  T(0, 1) = lambda * h2.mean;
  T(0, 2) = lambda * chart_.dM_dq - k_ * nu;
  T(1, 0) = lambda * br_c + nu * Hp0;
  T(1, 1) = h2.h2_L - h2.h2_0;
  T(1, 2) = br_q;
  T(2, 0) = lambda * br_cp + nu * Hpp0;
  T(2, 1) = h2.h2p_L - h2.h2p_0;
  T(2, 2) = br_qp;
  return T.determinant();
}

Complex EvansWorkspace::appendix_det4(Complex lambda, Complex nu) const {
  FloquetData h2 = floquet_h2();
  const auto& prof = ops_.profile();
  double M = prof.H.mean();
  Grid g(prof.n());
  double Hp0 = k_ * g.diff(prof.H, 1)[0];
  double Hpp0 = k_ * k_ * g.diff(prof.H, 2)[0];
  double br_c = -chart_.dL_dc * Hp0;
  double br_cp = -chart_.dL_dc * Hpp0;
  double br_q = -chart_.dL_dq * Hp0;
  double br_qp = -chart_.dL_dq * Hpp0;

  Eigen::Matrix4cd Z;
  Z.row(0) << nu * k_ * k_, 0.0, 0.0, -lambda * k_ * k_;
  Z.row(1) << lambda * chart_.dM_dc + nu * k_ * M, lambda * h2.mean,
      lambda * chart_.dM_dq - k_ * nu, 0.0;
  Z.row(2) << br_c, h2.h2_L - h2.h2_0, br_q, Hp0;
  Z.row(3) << br_cp, h2.h2p_L - h2.h2p_0, br_qp, Hpp0;
  return Z.determinant() / (k_ * k_);
}

EvansExpansion evans_expansion(const EvansWorkspace& ws,
                               const DispersionCQ& disp, ExpansionOptions opt) {
  EvansExpansion out;
  out.disp_coeffs = {disp.a, disp.b};

  auto samples = [&](double r) {
    std::vector<std::pair<Complex, Complex>> pts;
    int n = opt.samples_per_axis;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Complex lam = r * std::exp(Complex(0.0, kTwoPi * i / n));
        Complex nu = 0.7 * r * std::exp(Complex(0.0, kTwoPi * (j + 0.37) / n));
        pts.emplace_back(lam, nu);
      }
    }
    return pts;
  };

  // cubic fit on the polydisc (monomials lambda^a nu^b, a+b <= 3)
  struct Mono {
    int a, b;
  };
  std::vector<Mono> monos;
  for (int d = 0; d <= 3; ++d)
    for (int a = d; a >= 0; --a) monos.push_back({a, d - a});

  double r = opt.radius;
  double r2 = 0.7 * r;
  for (int attempt = 0; attempt < 4; ++attempt) {
    auto pts = samples(r);
    int N = static_cast<int>(pts.size());
    int m = static_cast<int>(monos.size());
    CMat A(N, m);
    CVec b(N);
    for (int i = 0; i < N; ++i) {
      auto [lam, nu] = pts[i];
      b[i] = ws.evans(lam, std::exp(nu), opt.ode);
      Complex u = lam / r, v = nu / r2;
      for (int j = 0; j < m; ++j)
        A(i, j) = std::pow(u, monos[j].a) * std::pow(v, monos[j].b);
    }
    // total least squares through the SVD of [A b]
    CMat Ab(N, m + 1);
    Ab << A, b;
    Eigen::JacobiSVD<CMat> svd(Ab, Eigen::ComputeThinV);
    double cond = svd.singularValues()[0] /
                  svd.singularValues()[svd.singularValues().size() - 1];
    Complex pivot = svd.matrixV()(m, m);
    CVec coefs;
    if (std::abs(pivot) < 1e-10 || cond > 1e14) {
      // conditioning guard: ordinary least squares fallback
      coefs = A.colPivHouseholderQr().solve(b);
    } else {
      coefs = -svd.matrixV().col(m).head(m) / pivot;
    }
    auto coef_of = [&](int a_, int b_) {
      for (int j = 0; j < m; ++j)
        if (monos[j].a == a_ && monos[j].b == b_)
          return coefs[j] / (std::pow(r, a_) * std::pow(r2, b_));
      return Complex(0.0);
    };
    Complex c20 = coef_of(2, 0), c11 = coef_of(1, 1), c02 = coef_of(0, 2);
    double quad_scale =
        std::max({std::abs(c20) * r * r, std::abs(c11) * r * r2,
                  std::abs(c02) * r2 * r2});
    double lin = std::max({std::abs(coef_of(0, 0)),
                           std::abs(coef_of(1, 0)) * r,
                           std::abs(coef_of(0, 1)) * r2});
    out.linear_part = lin / quad_scale;
    if (out.linear_part > 1e-3) {
      r *= 0.5;
      r2 = 0.7 * r;
      if (attempt == 3)
        throw NumericError("expansion inconsistent (profile not converged?)");
      continue;
    }
    out.gamma_by_coeff = {c20 / disp.a, c11 / disp.b, c02};
    out.gamma = (out.gamma_by_coeff[0] + out.gamma_by_coeff[1] +
                 out.gamma_by_coeff[2]) /
                3.0;
    double spread = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        spread = std::max(spread, std::abs(out.gamma_by_coeff[i] -
                                           out.gamma_by_coeff[j]));
    out.gamma_spread = spread / std::abs(out.gamma);
    break;
  }

  // residual decay |E - gamma D| over shrinking boxes
  for (double rr : opt.slope_radii) {
    auto pts = samples(rr);
    double worst = 0.0;
    for (auto& [lam, nu] : pts) {
      Complex e = ws.evans(lam, std::exp(nu), opt.ode);
      worst = std::max(worst, std::abs(e - out.gamma * disp.eval(lam, nu)));
    }
    out.radii.push_back(rr);
    out.max_residual.push_back(worst);
  }
  // log-log least squares slope
  int nr = static_cast<int>(out.radii.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < nr; ++i) {
    double x = std::log(out.radii[i]);
    double y = std::log(std::max(out.max_residual[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (nr * sxy - sx * sy) / (nr * sxx - sx * sx);
  return out;
}

}  // namespace rollwave
