#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace rollwave {

using Field = Eigen::ArrayXd;            // samples at y_i = i/n on [0,1)
using CField = Eigen::ArrayXcd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Exit-code categories used by the CLI: regime violations (bad physical
// parameters, preconditions) vs numeric failures (divergence, singularity).
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhysicalParams {
  double froude = 3.0;     // F
  double viscosity = 0.0;  // delta

  void require_roll_wave_regime() const {
    if (!(froude > 2.0))
      throw RegimeError("outside Dressler regime: F <= 2");
    if (!(viscosity >= 0.0))
      throw RegimeError("viscosity must be nonnegative");
  }
};

struct WaveKey {
  double k = 1.0;     // wavenumber
  double qbar = 1.0;  // relative discharge rate

  void validate() const {
    if (!(k > 0.0)) throw RegimeError("wavenumber must be positive");
  }
};

// Saint-Venant flux and source, shared by every module.
inline double flux_G(double h, double q, double froude) {
  return q * q / h + h * h / (2.0 * froude * froude);
}
inline double source_S(double h, double q) { return h - q * q / (h * h); }
inline double dG_dh(double h, double q, double froude) {
  return -q * q / (h * h) + h / (froude * froude);
}
inline double dG_dq(double h, double q) { return 2.0 * q / h; }
inline double dS_dh(double h, double q) { return 1.0 + 2.0 * q * q / (h * h * h); }
inline double dS_dq(double h, double q) { return -2.0 * q / (h * h); }

}  // namespace rollwave
