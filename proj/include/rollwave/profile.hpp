#pragma once

#include "rollwave/dressler.hpp"
#include "rollwave/grid.hpp"
#include "rollwave/types.hpp"

#include <optional>

namespace rollwave {

// A converged periodic traveling wave. Q = c H - qbar pointwise and the
// collocated profile equation k c^2 H' + G(H, cH - qbar; k) = 0 holds to
// the solver tolerance, with phase fixed by H(0) = mean(H).
struct RollWaveProfile {
  PhysicalParams params;
  WaveKey key;
  double c = 0.0;
  double omega = 0.0;  // -k c
  Field H;
  Field Q;
  double residual = 0.0;

  int n() const { return static_cast<int>(H.size()); }
  double wavelength() const { return 1.0 / key.k; }
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 40;
  double amplitude_tol = 1e-6;  // below this (relative) the state is constant
};

// Directional derivatives of G(H,Q;k) = delta k^2 Q'' - k (G(H,Q))' + S(H,Q).
Field calG(const Grid& g, const PhysicalParams& p, double k, const Field& H,
           const Field& Q);
Field calG_dh(const Grid& g, const PhysicalParams& p, double k, const Field& H,
              const Field& Q, const Field& f);
Field calG_dq(const Grid& g, const PhysicalParams& p, double k, const Field& H,
              const Field& Q, const Field& f);
Field calG_dk(const Grid& g, const PhysicalParams& p, double k, const Field& H,
              const Field& Q);

class ProfileSolver {
 public:
  explicit ProfileSolver(int n, SolverOptions opt = {});

  const Grid& grid() const { return grid_; }
  const SolverOptions& options() const { return opt_; }

  // Newton on (H samples, c) closed by H(0) = mean(H).
  RollWaveProfile solve(const PhysicalParams& params, const WaveKey& key,
                        const Field& seed_H, double seed_c) const;

  Field residual_field(const PhysicalParams& params, const WaveKey& key,
                       const Field& H, double c) const;

  // Dense linearization in H at fixed c (the operator L when evaluated
  // at a converged profile).
  Mat linearized_matrix(const PhysicalParams& params, const WaveKey& key,
                        const Field& H, double c) const;

  const Mat& diff1() const { return d1_; }
  const Mat& diff2() const { return d2_; }

 private:
  Grid grid_;
  SolverOptions opt_;
  Mat d1_, d2_;
};

// Dressler-seeded solve with natural continuation in delta (geometric
// steps, factor 1/2) when the direct Newton attempt fails.
RollWaveProfile solve_from_dressler(const PhysicalParams& params, double qbar,
                                    double h_plus, int n,
                                    SolverOptions opt = {});

// Same entry point but keyed by wavenumber.
RollWaveProfile solve_by_wavenumber(const PhysicalParams& params,
                                    const WaveKey& key, int n,
                                    SolverOptions opt = {});

// Warm-started continuation from a converged neighbor in (k, qbar); steps
// are bisected on Newton failure.
RollWaveProfile continue_profile(const RollWaveProfile& seed,
                                 const WaveKey& target,
                                 SolverOptions opt = {});

// Seed construction: sampled Dressler profile, mollified at the shock and
// phased so that the seed crosses its mean upward at y = 0.
Field dressler_seed(const Grid& grid, const DresslerWave& wave,
                    double delta_target);

}  // namespace rollwave
