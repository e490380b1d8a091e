#include "rollwave/profile.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <vector>

namespace rollwave {

Field calG(const Grid& g, const PhysicalParams& p, double k, const Field& H,
           const Field& Q) {
  Field G = Q * Q / H + H * H / (2.0 * p.froude * p.froude);
  Field S = H - Q * Q / (H * H);
  return p.viscosity * k * k * g.diff(Q, 2) - k * g.diff(G, 1) + S;
}

Field calG_dh(const Grid& g, const PhysicalParams& p, double k, const Field& H,
              const Field& Q, const Field& f) {
  Field gh = (-Q * Q / (H * H) + H / (p.froude * p.froude)) * f;
  Field sh = (1.0 + 2.0 * Q * Q / (H * H * H)) * f;
  return -k * g.diff(gh, 1) + sh;
}

Field calG_dq(const Grid& g, const PhysicalParams& p, double k, const Field& H,
              const Field& Q, const Field& f) {
  Field gq = (2.0 * Q / H) * f;
  Field sq = (-2.0 * Q / (H * H)) * f;
  return p.viscosity * k * k * g.diff(f, 2) - k * g.diff(gq, 1) + sq;
}

Field calG_dk(const Grid& g, const PhysicalParams& p, double k, const Field& H,
              const Field& Q) {
  Field G = Q * Q / H + H * H / (2.0 * p.froude * p.froude);
  return 2.0 * p.viscosity * k * g.diff(Q, 2) - g.diff(G, 1);
}

ProfileSolver::ProfileSolver(int n, SolverOptions opt)
    : grid_(n), opt_(opt), d1_(grid_.diff_matrix(1)), d2_(grid_.diff_matrix(2)) {}

Field ProfileSolver::residual_field(const PhysicalParams& params,
                                    const WaveKey& key, const Field& H,
                                    double c) const {
  Field Q = c * H - key.qbar;
  return key.k * c * c * grid_.diff(H, 1) + calG(grid_, params, key.k, H, Q);
}

Mat ProfileSolver::linearized_matrix(const PhysicalParams& params,
                                     const WaveKey& key, const Field& H,
                                     double c) const {
  int n = grid_.size();
  double k = key.k;
  Field Q = c * H - key.qbar;
  // w = dG/dh + c dG/dq, v = dS/dh + c dS/dq evaluated along the profile
  Field w = (-Q * Q / (H * H) + H / (params.froude * params.froude)) +
            c * (2.0 * Q / H);
  Field v = (1.0 + 2.0 * Q * Q / (H * H * H)) + c * (-2.0 * Q / (H * H));
  Mat L = (k * c * c) * d1_ + (params.viscosity * k * k * c) * d2_;
  for (int j = 0; j < n; ++j) L.col(j) -= k * w[j] * d1_.col(j);
  L.diagonal() += v.matrix();
  return L;
}

RollWaveProfile ProfileSolver::solve(const PhysicalParams& params,
                                     const WaveKey& key, const Field& seed_H,
                                     double seed_c) const {
  params.require_roll_wave_regime();
  key.validate();
  if (!(params.viscosity > 0.0))
    throw RegimeError("viscous profile solve requires delta > 0");
  int n = grid_.size();
  if (seed_H.size() != n) throw NumericError("seed grid size mismatch");
  Grid::require_finite(seed_H);

  Field H = seed_H;
  double c = seed_c;
  double k = key.k;

  auto norm_residual = [&](const Field& Hc, double cc) {
    Field r = residual_field(params, key, Hc, cc);
    double phase = Hc[0] - Hc.mean();
    return std::max(r.abs().maxCoeff(), std::abs(phase));
  };

  double res = norm_residual(H, c);
  Eigen::VectorXd rhs(n + 1), step(n + 1);
  Mat J(n + 1, n + 1);

  for (int iter = 0; iter < opt_.max_iter; ++iter) {
    if (res < opt_.tol) break;
    if ((H <= 0.0).any()) throw NumericError("loss of positivity");

    Field r = residual_field(params, key, H, c);
    rhs.head(n) = -r.matrix();
    rhs[n] = -(H[0] - H.mean());

    Field Q = c * H - key.qbar;
    J.setZero();
    J.topLeftCorner(n, n) = linearized_matrix(params, key, H, c);
    // dR/dc = 2 k c H' + delta k^2 H'' - k (dG/dq H)' + dS/dq H
    Field dRdc = 2.0 * k * c * grid_.diff(H, 1) +
                 params.viscosity * k * k * grid_.diff(H, 2) -
                 k * grid_.diff(Field((2.0 * Q / H) * H), 1) +
                 (-2.0 * Q / (H * H)) * H;
    J.col(n).head(n) = dRdc.matrix();
    J.row(n).head(n) = -Eigen::RowVectorXd::Constant(n, 1.0 / n);
    J(n, 0) += 1.0;

    Eigen::PartialPivLU<Mat> lu(J);
    double piv_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    double piv_max = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
    if (!(piv_min > 1e-14 * piv_max))
      throw NumericError("degenerate parametrization point");
    step = lu.solve(rhs);

    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 10; ++bt) {
      Field H_new = H + lambda * step.head(n).array();
      double c_new = c + lambda * step[n];
      if ((H_new > 0.0).all()) {
        double res_new = norm_residual(H_new, c_new);
        if (res_new < res || res_new < opt_.tol) {
          H = H_new;
          c = c_new;
          res = res_new;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) throw NumericError("no convergence (try continuation)");
  }
  if (!(res < opt_.tol)) throw NumericError("no convergence (try continuation)");

  double amplitude = H.maxCoeff() - H.minCoeff();
  if (amplitude < opt_.amplitude_tol * std::abs(H.mean()))
    throw NumericError("zero-amplitude (constant state)");

  RollWaveProfile prof;
  prof.params = params;
  prof.key = key;
  prof.c = c;
  prof.omega = -key.k * c;
  prof.H = H;
  prof.Q = c * H - key.qbar;
  prof.residual = res;
  return prof;
}

Field dressler_seed(const Grid& grid, const DresslerWave& wave,
                    double delta_target) {
  Field raw = wave.sample_profile(grid);
  // Shock layer width in y; sets the mollification scale.
  double h_lo = wave.height_scale * wave.h_plus;
  double g_lo = std::abs(-wave.qbar * wave.qbar / (h_lo * h_lo) +
                         h_lo / (wave.froude * wave.froude));
  double width = delta_target * wave.k * wave.c_star / std::max(g_lo, 1e-3);
  width = std::clamp(width, 2.5 * grid.spacing(), 0.25);
  // Gaussian mollifier in Fourier space with cutoff ~ 1/width.
  CField c = grid.spectrum(raw);
  int n = grid.size();
  double mc = 1.0 / (std::numbers::pi * width);
  for (int m = 1; m < n; ++m) {
    int f = m <= n / 2 ? m : m - n;
    c[m] *= std::exp(-(f / mc) * (f / mc));
  }
  Field smooth = grid.from_spectrum(c);
  // Translate the upward mean-crossing to y = 0.
  double mean = smooth.mean();
  int best = 0;
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    if (smooth[i] <= mean && smooth[j] > mean) {
      best = i;
      break;
    }
  }
  // refine crossing position by linear interpolation, then spectral shift
  int j = (best + 1) % n;
  double t = (mean - smooth[best]) / (smooth[j] - smooth[best]);
  double y0 = (best + t) / n;
  Field shifted = grid.translate(smooth, -y0);
  return shifted;
}

namespace {

int next_pow2(double x) {
  int n = 16;
  while (n < x && n < (1 << 20)) n *= 2;
  return n;
}

// Grid adequate for the viscous shock layer, width ~ 14 delta k c in y.
int adequate_grid(double delta, double k, double c, int n_cap) {
  double layer = 13.6 * delta * k * c;
  int n = next_pow2(std::max(128.0, 5.0 / layer));
  return std::min(n, n_cap);
}

RollWaveProfile solve_dressler_ladder(const PhysicalParams& params, double qbar,
                                      double h_plus, int n, SolverOptions opt) {
  DresslerWave dw = dressler_wave(params.froude, qbar, h_plus);
  WaveKey key{dw.k, qbar};

  auto attempt = [&](double delta, int n_rung, const Field& seed,
                     double c_seed) -> std::optional<RollWaveProfile> {
    PhysicalParams p = params;
    p.viscosity = delta;
    ProfileSolver solver(n_rung, opt);
    Field s = seed.size() == n_rung
                  ? seed
                  : Grid(static_cast<int>(seed.size())).resample(seed, n_rung);
    try {
      return solver.solve(p, key, s, c_seed);
    } catch (const NumericError&) {
      return std::nullopt;
    }
  };

  double target = params.viscosity;
  {
    int n0 = adequate_grid(target, dw.k, dw.c_star, n);
    Field seed = dressler_seed(Grid(n0), dw, target);
    if (auto direct = attempt(target, n0, seed, dw.c_star)) {
      if (n0 == n) return *direct;
      if (auto refined = attempt(target, n, direct->H, direct->c))
        return *refined;
    }
  }

  // Anchor at a viscosity where the Dressler seed is reliable, then
  // geometric steps (factor 1/2) toward the target, warm-starting each
  // rung and refining the grid as the layer sharpens.
  std::optional<RollWaveProfile> current;
  double delta = 0.0;
  for (double d : {5e-3, 2.5e-3, 1e-2, 1e-3}) {
    int n_rung = adequate_grid(d, dw.k, dw.c_star, n);
    Field seed = dressler_seed(Grid(n_rung), dw, d);
    if (auto got = attempt(d, n_rung, seed, dw.c_star)) {
      current = got;
      delta = d;
      break;
    }
  }
  if (!current) throw NumericError("no convergence (try continuation)");

  int guard = 0;
  while (std::abs(delta - target) > 1e-14 * target) {
    if (++guard > 200) throw NumericError("no convergence (try continuation)");
    double next = target > delta ? std::min(2.0 * delta, target)
                                 : std::max(0.5 * delta, target);
    int n_rung = adequate_grid(next, dw.k, current->c, n);
    auto got = attempt(next, n_rung, current->H, current->c);
    if (!got && n_rung < n)
      got = attempt(next, std::min(2 * n_rung, n), current->H, current->c);
    if (!got) {
      next = std::sqrt(delta * next);  // bisect the rung geometrically
      got = attempt(next, n_rung, current->H, current->c);
      if (!got) throw NumericError("no convergence (try continuation)");
    }
    current = got;
    delta = next;
  }
  if (current->n() != n) {
    auto refined = attempt(target, n, current->H, current->c);
    if (!refined) throw NumericError("no convergence (try continuation)");
    current = refined;
  }
  return *current;
}

}  // namespace

RollWaveProfile solve_from_dressler(const PhysicalParams& params, double qbar,
                                    double h_plus, int n, SolverOptions opt) {
  return solve_dressler_ladder(params, qbar, h_plus, n, opt);
}

RollWaveProfile solve_by_wavenumber(const PhysicalParams& params,
                                    const WaveKey& key, int n,
                                    SolverOptions opt) {
  double h_plus =
      dressler_hplus_for_wavenumber(params.froude, key.qbar, key.k);
  return solve_dressler_ladder(params, key.qbar, h_plus, n, opt);
}

RollWaveProfile continue_profile(const RollWaveProfile& seed,
                                 const WaveKey& target, SolverOptions opt) {
  ProfileSolver solver(seed.n(), opt);
  RollWaveProfile current = seed;
  double t = 0.0;
  double step = 1.0;
  int guard = 0;
  while (t < 1.0) {
    if (++guard > 400) throw NumericError("no convergence (try continuation)");
    double t_next = std::min(1.0, t + step);
    WaveKey key{seed.key.k + (target.k - seed.key.k) * t_next,
                seed.key.qbar + (target.qbar - seed.key.qbar) * t_next};
    try {
      current = solver.solve(current.params, key, current.H, current.c);
      t = t_next;
      step = std::min(1.0, step * 2.0);
    } catch (const NumericError&) {
      step *= 0.5;
      if (step < 1e-4) throw;
    }
  }
  return current;
}

}  // namespace rollwave
