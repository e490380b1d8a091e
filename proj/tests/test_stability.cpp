#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rollwave/evans.hpp"
#include "rollwave/profile.hpp"
#include "rollwave/whitham.hpp"

#include <cmath>
#include <numbers>

using namespace rollwave;

namespace {

const RollWaveProfile& reference_profile() {
  static RollWaveProfile prof =
      solve_from_dressler(PhysicalParams{3.0, 1e-2}, 1.0, 0.62, 256);
  return prof;
}

const ProfileOperators& reference_ops() {
  static ProfileOperators ops(reference_profile());
  return ops;
}

const EvansWorkspace& reference_evans() {
  static EvansWorkspace ws(reference_ops());
  return ws;
}

}  // namespace

TEST_CASE("quasilinear assembly and omega consistency") {
  auto avg = reference_ops().averaged();
  CHECK(avg.evolution_ok);
  auto sys = assemble_whitham(avg);
  CHECK(std::abs(sys.A0.determinant() - avg.dM_dq) < 1e-12);
  // -d_k omega = c + k d_k c
  CHECK(std::abs(-avg.domega_dk -
                 (avg.c + reference_profile().key.k * avg.dc_dk)) < 1e-10);
}

TEST_CASE("characteristic speeds match the dispersion roots in both charts") {
  const auto& prof = reference_profile();
  auto avg = reference_ops().averaged();
  double k = prof.key.k;

  auto roots = comoving_roots(avg, k);
  auto disp = dispersion_cq(avg, k);

  // roots of D as lambda/nu equal k* lambda0
  for (int j = 0; j < 2; ++j) {
    Complex want = k * roots.lambda0[j];
    double best = 1e99;
    for (auto r : disp.root_ratios) best = std::min(best, std::abs(r - want));
    CHECK(best < 1e-8 * std::max(1.0, std::abs(want)));
  }

  // lab speeds from the generalized eigenproblem: s = c* - lambda0
  auto sys = assemble_whitham(avg);
  if (sys.hyperbolic && roots.real_distinct) {
    std::array<double, 2> want{avg.c - roots.lambda0[1].real(),
                               avg.c - roots.lambda0[0].real()};
    if (want[0] > want[1]) std::swap(want[0], want[1]);
    CHECK(std::abs(sys.speeds[0] - want[0]) < 1e-8);
    CHECK(std::abs(sys.speeds[1] - want[1]) < 1e-8);
  }
  // hyperbolicity agrees between charts
  CHECK(sys.hyperbolic == disp.hyperbolic);
}

TEST_CASE("dispersion normalization D(0,nu) = nu^2") {
  auto disp = dispersion_cq(reference_ops().averaged(),
                            reference_profile().key.k);
  Complex nu(0.3, -0.2);
  CHECK(std::abs(disp.eval(0.0, nu) - nu * nu) < 1e-14);
}

TEST_CASE("spectral ODE carries the translation mode at lambda = 0") {
  const auto& ws = reference_evans();
  double L = ws.period();
  double worst = 0.0, scale = 0.0;
  for (double x : {0.1 * L, 0.37 * L, 0.81 * L}) {
    Vec3c y = ws.translation_solution(x);
    Vec3c dy = ws.coefficient_matrix(0.0, x) * y;
    // derivative of Y1 = (c H', H', H'') is (c H'', H'', H''')
    double h = 1e-6 * L;
    Vec3c fd = (ws.translation_solution(x + h) - ws.translation_solution(x - h)) /
               (2.0 * h);
    worst = std::max(worst, (dy - fd).cwiseAbs().maxCoeff());
    scale = std::max(scale, fd.cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-7 * scale);
}

TEST_CASE("spectral ODE carries the qbar-direction solution at lambda = 0") {
  const auto& ws = reference_evans();
  double L = ws.period();
  double worst = 0.0, scale = 0.0;
  for (double x : {0.13 * L, 0.52 * L, 0.9 * L}) {
    Vec3c y = ws.qbar_direction_solution(x);
    Vec3c dy = ws.coefficient_matrix(0.0, x) * y;
    double h = 1e-6 * L;
    Vec3c fd = (ws.qbar_direction_solution(x + h) -
                ws.qbar_direction_solution(x - h)) /
               (2.0 * h);
    worst = std::max(worst, (dy - fd).cwiseAbs().maxCoeff());
    scale = std::max(scale, std::max(1.0, fd.cwiseAbs().maxCoeff()));
  }
  CHECK(worst < 1e-6 * scale);
}

TEST_CASE("trace of A is affine in lambda and matches quadrature") {
  const auto& ws = reference_evans();
  Complex l1(0.3, 0.1), l2(-0.2, 0.4);
  Complex t0 = ws.trace_integral(0.0);
  Complex t1 = ws.trace_integral(l1);
  Complex t2 = ws.trace_integral(l2);
  // affine: t(l) - t(0) linear in l
  Complex s1 = (t1 - t0) / l1;
  Complex s2 = (t2 - t0) / l2;
  CHECK(std::abs(s1 - s2) < 1e-10 * std::abs(s1));
  // quadrature of tr A over the period (trapezoid on a fine grid)
  int nq = 4096;
  Complex acc = 0.0;
  double L = ws.period();
  for (int i = 0; i < nq; ++i)
    acc += ws.coefficient_matrix(l1, (i + 0.5) * L / nq).trace();
  acc *= L / nq;
  CHECK(std::abs(acc - t1) < 1e-8 * std::abs(t1));
}

TEST_CASE("Liouville identity for the monodromy determinant") {
  const auto& ws = reference_evans();
  for (Complex lam : {Complex(0.0, 0.0), Complex(0.05, 0.02)}) {
    Complex det = ws.monodromy_det(lam);
    Complex want = std::exp(ws.trace_integral(lam));
    CHECK(std::abs(det - want) < 1e-8 * std::abs(want));
  }
  // one-shot 3x3 determinant agrees within its cancellation floor
  Mat3c psi0 = ws.monodromy(0.0);
  double rho = ws.rho_formula();
  double floor = 1e-13 * std::pow(psi0.cwiseAbs().maxCoeff(), 3);
  CHECK(std::abs(psi0.determinant() - rho) < 1e-8 * rho + floor);
}

TEST_CASE("monodromy at lambda = 0: eigenvalue one and the Floquet rho") {
  const auto& ws = reference_evans();
  Mat3c psi = ws.monodromy(0.0);
  Vec3c y1 = ws.translation_solution(0.0);
  CHECK((psi * y1 - y1).cwiseAbs().maxCoeff() < 1e-7 * y1.cwiseAbs().maxCoeff());
  double rho = ws.rho_formula();
  CHECK(rho < 1.0);
  CHECK(std::abs(ws.rho_numeric() - rho) < 1e-6 * rho);
  // backward monodromy inverts the forward one, up to the conditioning of
  // the inversion (the decaying mode re-expands backward)
  Mat3c inv = ws.monodromy_backward(0.0);
  double cond = inv.cwiseAbs().maxCoeff() * psi.cwiseAbs().maxCoeff();
  CHECK((inv * psi - Mat3c::Identity()).cwiseAbs().maxCoeff() < 1e-9 * cond);
}

TEST_CASE("Evans zeros at (0,1) and (0,rho)") {
  const auto& ws = reference_evans();
  Mat3c psi = ws.monodromy(0.0);
  double scale = 0.0;
  for (Complex s : {Complex(1, 1), Complex(-1, 0), Complex(2, 0)})
    scale = std::max(scale, std::abs(ws.evans(psi, s)));
  CHECK(std::abs(ws.evans(psi, 1.0)) < 1e-8 * scale);
  CHECK(std::abs(ws.evans(psi, ws.rho_formula())) < 1e-7 * scale);
  // sigma = 1 is a double root: E(0, 1+s) = O(s^2)
  double s = 1e-3;
  CHECK(std::abs(ws.evans(psi, 1.0 + s)) < 20.0 * s * s * scale);
}

TEST_CASE("Evans analyticity and conjugation symmetry") {
  const auto& ws = reference_evans();
  Complex lam(3e-3, 2e-3), sig(1.001, 2e-3);
  // Cauchy-Riemann via centered differences in two directions
  double h = 1e-5;
  Complex d_re = (ws.evans(lam + h, sig) - ws.evans(lam - h, sig)) / (2.0 * h);
  Complex d_im = (ws.evans(lam + Complex(0, h), sig) -
                  ws.evans(lam - Complex(0, h), sig)) /
                 Complex(0, 2.0 * h);
  CHECK(std::abs(d_re - d_im) < 1e-4 * std::abs(d_re));
  // real coefficients
  Complex e = ws.evans(lam, sig);
  Complex ec = ws.evans(std::conj(lam), std::conj(sig));
  CHECK(std::abs(ec - std::conj(e)) < 1e-10 * std::abs(e));
}

TEST_CASE("monodromy tolerance independence") {
  const auto& ws = reference_evans();
  Complex lam(1e-2, 5e-3), sig(1.002, 1e-3);
  Complex e1 = ws.evans(lam, sig, MonodromyOptions{1e-11, 1e-13});
  Complex e2 = ws.evans(lam, sig, MonodromyOptions{1e-12, 1e-14});
  CHECK(std::abs(e1 - e2) < 1e-7 * std::abs(e2));
}

TEST_CASE("Evans expansion reproduces the Whitham dispersion") {
  const auto& ws = reference_evans();
  auto disp = dispersion_cq(reference_ops().averaged(),
                            reference_profile().key.k);
  auto exp_report = evans_expansion(ws, disp);
  CHECK(exp_report.gamma_spread < 1e-3);
  CHECK(exp_report.slope >= 2.7);
  CHECK(std::abs(exp_report.gamma) > 0.0);
  // degenerate direction nu with lambda = 0: pure nu^2 coefficient is
  // gamma itself (D's nu^2 coefficient is one)
  CHECK(std::abs(exp_report.gamma_by_coeff[2] - exp_report.gamma) <
        2e-3 * std::abs(exp_report.gamma));
}

TEST_CASE("appendix determinant is proportional to the dispersion") {
  const auto& ws = reference_evans();
  auto disp = dispersion_cq(reference_ops().averaged(),
                            reference_profile().key.k);
  CHECK(std::abs(ws.appendix_det3(0.0, 0.0)) == 0.0);
  // reduced 3x3 equals det((T,Z))/k^2
  Complex l(2e-3, 1e-3), nu(-1e-3, 2e-3);
  Complex d3 = ws.appendix_det3(l, nu);
  Complex d4 = ws.appendix_det4(l, nu);
  CHECK(std::abs(d3 - d4) < 1e-10 * std::abs(d3));
  // ratio to D constant over a sample
  Complex ratio0;
  bool first = true;
  for (double t : {0.3, 0.9, 1.7, 2.5}) {
    Complex lam = 1e-3 * std::exp(Complex(0.0, t));
    Complex nu2 = 7e-4 * std::exp(Complex(0.0, 2.0 * t + 0.5));
    Complex ratio = ws.appendix_det3(lam, nu2) / disp.eval(lam, nu2);
    if (first) {
      ratio0 = ratio;
      first = false;
    } else {
      CHECK(std::abs(ratio - ratio0) < 1e-3 * std::abs(ratio0));
    }
  }
}

TEST_CASE("period-end brackets match a parameter finite difference") {
  // [d_c H] = -d_c L H'(0), with the left side from finite differences
  // of profiles solved at shifted parameters.
  const auto& prof = reference_profile();
  const auto& ops = reference_ops();
  auto avg = ops.averaged();
  double k = prof.key.k;
  ProfileSolver solver(prof.n());
  double dk = 1e-5;
  auto up = solver.solve(prof.params, WaveKey{k + dk, prof.key.qbar}, prof.H,
                         prof.c);
  auto dn = solver.solve(prof.params, WaveKey{k - dk, prof.key.qbar}, prof.H,
                         prof.c);
  double dc = (up.c - dn.c) / (2.0 * dk);  // dc/dk
  Grid g(prof.n());
  FieldSeries Hu(g, up.H), Hd(g, dn.H);
  // d_c H at fixed qbar in the x-frame, evaluated near x = L and x = 0:
  // composed field H(k x) picks up the x H_y' term through k(c).
  double L = 1.0 / k;
  auto dcH_at = [&](double x) {
    double yu = up.key.k * x, yd = dn.key.k * x;
    yu -= std::floor(yu);
    yd -= std::floor(yd);
    return (Hu(yu) - Hd(yd)) / (2.0 * dk) / dc;  // chain rule to c
  };
  double bracket_fd = dcH_at(L - 1e-9) - dcH_at(0.0);
  double Hp0 = k * g.diff(prof.H, 1)[0];
  double dL_dc = -(1.0 / dc) / (k * k);
  double bracket_id = -dL_dc * Hp0;
  CHECK(std::abs(bracket_fd - bracket_id) <
        1e-4 * std::max(1.0, std::abs(bracket_id)));
  (void)avg;
}
