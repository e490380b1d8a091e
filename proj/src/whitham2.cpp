#include "rollwave/whitham2.hpp"

#include <Eigen/LU>

#include <cmath>

namespace rollwave {

namespace {

CField complexify(const Field& f) { return f.cast<Complex>(); }

}  // namespace

SecondOrderData::SecondOrderData(const ProfileOperators& ops)
    : ops_(ops), grid_(ops.profile().n()) {}

CField SecondOrderData::dH(Complex a, Complex b) const {
  const auto& d = ops_.derivatives();
  return a * complexify(d.dH_dk) + b * complexify(d.dH_dq);
}

CField SecondOrderData::dQ(Complex a, Complex b) const {
  const auto& d = ops_.derivatives();
  return a * complexify(d.dQ_dk) + b * complexify(d.dQ_dq);
}

Complex SecondOrderData::dc(Complex a, Complex b) const {
  const auto& d = ops_.derivatives();
  return a * d.dc_dk + b * d.dc_dq;
}

RampedField SecondOrderData::dGq_I(const CField& f) const {
  const auto& prof = ops_.profile();
  const auto& p = prof.params;
  double k = prof.key.k;
  Field re = f.real(), im = f.imag();
  auto are = grid_.antiderivative(re);
  auto aim = grid_.antiderivative(im);
  Field gq = 2.0 * prof.Q / prof.H;
  auto apply = [&](const Field& per) {
    return calG_dq(grid_, p, k, prof.H, prof.Q, per);
  };
  RampedField out;
  Complex slope(are.ramp, aim.ramp);
  CField per = complexify(apply(are.periodic)) +
               Complex(0, 1) * complexify(apply(aim.periodic));
  out.periodic = (per - slope * k * complexify(gq)) / k;
  out.ramp = slope / k;
  return out;
}

RampedField SecondOrderData::B_T(Complex a, Complex b) const {
  const auto& prof = ops_.profile();
  double c = prof.c;
  RampedField gi = dGq_I(dH(a, b));
  RampedField out;
  out.periodic = 2.0 * c * dH(a, b) + dc(a, b) * complexify(prof.H) - b +
                 gi.periodic;
  out.ramp = gi.ramp;
  return out;
}

RampedField SecondOrderData::B_X(Complex a, Complex b) const {
  const auto& prof = ops_.profile();
  double c = prof.c, k = prof.key.k, delta = prof.params.viscosity;
  Field gq = 2.0 * prof.Q / prof.H;
  Field gh = -prof.Q * prof.Q / (prof.H * prof.H) +
             prof.H / (prof.params.froude * prof.params.froude);
  CField dh = dH(a, b);
  CField dhp = grid_.diff(dh, 1);
  Field Hp = grid_.diff(prof.H, 1);
  Complex dcv = dc(a, b);

  RampedField giH = dGq_I(complexify(prof.H));
  RampedField gidH = dGq_I(dh);

  RampedField out;
  out.periodic =
      dcv * (giH.periodic + complexify(Field(c * prof.H + gq * prof.H -
                                             2.0 * delta * k * Hp))) +
      (c * c) * dh + complexify(Field(gh + c * gq)) * dh -
      2.0 * delta * k * c * dhp + c * gidH.periodic -
      delta * c * a * complexify(Hp) - c * b;
  // the b-term bracket [c + (1/k) dGq[I(1)] + dG_q] has zero periodic part
  // beyond c, and ramp 1/k
  out.ramp = dcv * giH.ramp + c * gidH.ramp - b / k;
  return out;
}

RampedField SecondOrderData::B_X_hat(Complex a, Complex b) const {
  const auto& prof = ops_.profile();
  double c = prof.c, k = prof.key.k, delta = prof.params.viscosity;
  Field gq = 2.0 * prof.Q / prof.H;
  Field gh = -prof.Q * prof.Q / (prof.H * prof.H) +
             prof.H / (prof.params.froude * prof.params.froude);
  CField dh = dH(a, b);
  CField dhp = grid_.diff(dh, 1);
  Field Hp = grid_.diff(prof.H, 1);
  Complex dcv = dc(a, b);

  RampedField giH = dGq_I(complexify(prof.H));
  RampedField out;
  out.periodic =
      dcv * (giH.periodic +
             complexify(Field(gq * prof.H - 2.0 * delta * k * Hp))) -
      (c * c) * dh + complexify(Field(gh + c * gq)) * dh -
      2.0 * delta * k * c * dhp - delta * c * a * complexify(Hp);
  out.ramp = dcv * giH.ramp - b / k;
  return out;
}

RampedField SecondOrderData::B0(Complex a, Complex b) const {
  const auto& prof = ops_.profile();
  double c = prof.c, k = prof.key.k, delta = prof.params.viscosity;
  Field gq = 2.0 * prof.Q / prof.H;
  Field gh = -prof.Q * prof.Q / (prof.H * prof.H) +
             prof.H / (prof.params.froude * prof.params.froude);
  CField dh = dH(a, b);
  RampedField out;
  out.periodic = (-c * c) * dh + complexify(Field(gh + c * gq)) * dh -
                 2.0 * delta * k * c * grid_.diff(dh, 1) -
                 delta * c * a * complexify(grid_.diff(prof.H, 1));
  out.ramp = -b / k;
  return out;
}

RampedField SecondOrderData::B1(Complex a, Complex b) const {
  const auto& prof = ops_.profile();
  double c = prof.c, k = prof.key.k, delta = prof.params.viscosity;
  Field gq = 2.0 * prof.Q / prof.H;
  RampedField gidH = dGq_I(dH(a, b));
  RampedField giH = dGq_I(complexify(prof.H));
  RampedField out;
  out.periodic = 2.0 * c * dH(a, b) + gidH.periodic - b -
                 (a / k) * (giH.periodic +
                            complexify(Field(gq * prof.H)) -
                            2.0 * delta * k *
                                complexify(grid_.diff(prof.H, 1)));
  out.ramp = gidH.ramp - (a / k) * giH.ramp;
  return out;
}

RampedField SecondOrderData::B2(Complex a, Complex b) const {
  const auto& prof = ops_.profile();
  RampedField out;
  out.periodic = -(a / prof.key.k) * complexify(prof.H);
  out.ramp = Complex(0.0);
  (void)b;
  return out;
}

RampedField SecondOrderData::B_lambda(Complex lambda0, Complex a,
                                      Complex b) const {
  RampedField out = B0(a, b);
  RampedField b1 = B1(a, b);
  RampedField b2 = B2(a, b);
  out.periodic += lambda0 * b1.periodic + lambda0 * lambda0 * b2.periodic;
  out.ramp += lambda0 * b1.ramp + lambda0 * lambda0 * b2.ramp;
  return out;
}

Complex SecondOrderData::p(const RampedField& f) const {
  double scale = f.periodic.abs().maxCoeff() + 1e-300;
  if (std::abs(f.ramp) > ramp_guard_ * scale)
    throw NumericError("antiderivative convention mismatch");
  return Complex(ops_.p(f.periodic.real()), ops_.p(f.periodic.imag()));
}

Complex SecondOrderData::mean_K(const RampedField& f) const {
  double scale = f.periodic.abs().maxCoeff() + 1e-300;
  if (std::abs(f.ramp) > ramp_guard_ * scale)
    throw NumericError("antiderivative convention mismatch");
  return Complex(ops_.K(f.periodic.real()).mean(),
                 ops_.K(f.periodic.imag()).mean());
}

Complex SecondOrderData::mean_I(const CField& f) const {
  auto are = grid_.antiderivative(f.real());
  auto aim = grid_.antiderivative(f.imag());
  return Complex(are.periodic.mean() + 0.5 * are.ramp,
                 aim.periodic.mean() + 0.5 * aim.ramp);
}

Complex SecondOrderData::mean_I_of_dH(Complex a, Complex b) const {
  return mean_I(dH(a, b));
}

double SecondOrderData::mean_I_of_H() const {
  auto a = grid_.antiderivative(ops_.profile().H);
  return a.periodic.mean() + 0.5 * a.ramp;
}

RampedField SecondOrderData::R0(const Eigen::Vector2cd& dT,
                                const Eigen::Vector2cd& dX) const {
  const auto& prof = ops_.profile();
  double c = prof.c, k = prof.key.k, delta = prof.params.viscosity;
  Field gq = 2.0 * prof.Q / prof.H;
  Field gh = -prof.Q * prof.Q / (prof.H * prof.H) +
             prof.H / (prof.params.froude * prof.params.froude);

  CField dHT = dH(dT[0], dT[1]);
  CField dQT = dQ(dT[0], dT[1]);
  CField dHX = dH(dX[0], dX[1]);
  CField dQX = dQ(dX[0], dX[1]);
  CField u = dHT + dQX;  // integrand of d_T I(H0) + d_X I(Q0)

  RampedField gi = dGq_I(u);
  RampedField out;
  out.periodic = dQT + complexify(gh) * dHX + complexify(gq) * dQX -
                 2.0 * delta * k * grid_.diff(dQX, 1) -
                 delta * c * dX[0] * complexify(grid_.diff(prof.H, 1)) +
                 c * u + gi.periodic;
  out.ramp = gi.ramp;
  return out;
}

SecondOrderEigen second_order_eigen(const SecondOrderData& data) {
  const auto& ops = data.ops();
  auto avg = ops.averaged();
  double k = ops.profile().key.k;
  double M = avg.M;
  auto roots = comoving_roots(avg, k);
  if (std::abs(roots.lambda0[0] - roots.lambda0[1]) <
      1e-8 * std::max(std::abs(roots.lambda0[0]), 1.0))
    throw NumericError(
        "non-strict hyperbolicity: second-order expansion undefined");

  SecondOrderEigen out;
  for (int j = 0; j < 2; ++j) {
    Complex l0 = roots.lambda0[j];
    Complex k0 = roots.modes[j][0], q0 = roots.modes[j][1];
    out.lambda0[j] = l0;
    out.mode0[j] = roots.modes[j];

    RampedField B = data.B_lambda(l0, k0, q0);
    Complex beta1 = -k * data.p(B);
    // <K R1> with R1 = k B[lambda0]
    Complex beta2 = -l0 * k * data.mean_K(B) + l0 * data.mean_I_of_dH(k0, q0) -
                    l0 * data.mean_I_of_H() * k0 / k -
                    q0 * SecondOrderData::mean_I_of_one();

    Eigen::Vector2cd w(-q0, k0);  // gauge: mode1 orthogonal to mode0
    auto dM = [&](const Eigen::Vector2cd& v) {
      return avg.dM_dk * v[0] + avg.dM_dq * v[1];
    };
    auto dcv = [&](const Eigen::Vector2cd& v) {
      return avg.dc_dk * v[0] + avg.dc_dq * v[1];
    };
    Eigen::Matrix2cd A;
    A(0, 0) = k0;
    A(0, 1) = l0 * w[0] + k * dcv(w);
    A(1, 0) = dM(Eigen::Vector2cd(k0, q0)) - (M / k) * k0;
    A(1, 1) = l0 * dM(w) - l0 * (M / k) * w[0] - w[1];
    Eigen::Vector2cd rhs(beta1, beta2);
    Eigen::Vector2cd sol = A.fullPivLu().solve(rhs);
    out.lambda1[j] = sol[0];
    out.mode1[j] = sol[1] * w;
  }
  return out;
}

std::array<Complex, 2> second_order_lambda1_gauge(const SecondOrderData& data,
                                                  double mix) {
  const auto& ops = data.ops();
  auto avg = ops.averaged();
  double k = ops.profile().key.k;
  double M = avg.M;
  auto roots = comoving_roots(avg, k);
  std::array<Complex, 2> out;
  for (int j = 0; j < 2; ++j) {
    Complex l0 = roots.lambda0[j];
    Complex k0 = roots.modes[j][0], q0 = roots.modes[j][1];
    RampedField B = data.B_lambda(l0, k0, q0);
    Complex beta1 = -k * data.p(B);
    Complex beta2 = -l0 * k * data.mean_K(B) + l0 * data.mean_I_of_dH(k0, q0) -
                    l0 * data.mean_I_of_H() * k0 / k -
                    q0 * SecondOrderData::mean_I_of_one();
    Eigen::Vector2cd w = Eigen::Vector2cd(-q0, k0) +
                         mix * Eigen::Vector2cd(k0, q0);
    auto dM = [&](const Eigen::Vector2cd& v) {
      return avg.dM_dk * v[0] + avg.dM_dq * v[1];
    };
    auto dcv = [&](const Eigen::Vector2cd& v) {
      return avg.dc_dk * v[0] + avg.dc_dq * v[1];
    };
    Eigen::Matrix2cd A;
    A(0, 0) = k0;
    A(0, 1) = l0 * w[0] + k * dcv(w);
    A(1, 0) = dM(Eigen::Vector2cd(k0, q0)) - (M / k) * k0;
    A(1, 1) = l0 * dM(w) - l0 * (M / k) * w[0] - w[1];
    Eigen::Vector2cd sol =
        A.fullPivLu().solve(Eigen::Vector2cd(beta1, beta2));
    out[j] = sol[0];
  }
  return out;
}

}  // namespace rollwave
