#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "skewt/common.hpp"
#include "skewt/skew_t.hpp"

namespace skewt {

// Regression data: responses y (n x d) against a design matrix x (n x p).
struct Dataset {
  Matrix y;
  Matrix x;

  Dataset(Matrix y_in, Matrix x_in);
  int n() const { return static_cast<int>(y.rows()); }
  int d() const { return static_cast<int>(y.cols()); }
  int p() const { return static_cast<int>(x.cols()); }
};

// Optimizer coordinates: beta, the strict upper triangle of the unit
// upper-triangular A, rho with D = diag(e^{-2 rho}), eta = omega^{-1} alpha,
// and log nu. Omega^{-1} = A' D A is positive definite by construction.
class ThetaParam {
 public:
  Matrix beta;     // p x d
  Vector a_upper;  // d (d - 1) / 2, row-major strict upper triangle
  Vector rho;      // d
  Vector eta;      // d
  double log_nu = 0.0;

  static int size(int p, int d) { return p * d + d * (d - 1) / 2 + 2 * d + 1; }
  Vector pack() const;
  static ThetaParam unpack(const Vector& v, int p, int d);

  int p() const { return static_cast<int>(beta.rows()); }
  int d() const { return static_cast<int>(beta.cols()); }
  Matrix a_matrix() const;
  Matrix d_diag() const;
  Matrix omega_inverse() const;
  Matrix omega() const;
  Vector omega_diag_sqrt() const;
  Vector alpha() const;  // omega eta
  double nu() const { return std::exp(log_nu); }

  // StParams with location zero and this theta's (Omega, alpha, nu).
  StParams error_params() const;
  static ThetaParam from_natural(const Matrix& beta, const Matrix& omega,
                                 const Vector& alpha, double nu);
};

struct FitConfig {
  int max_iter = 500;
  double grad_tol = 1e-6;
  bool use_nu_floor = true;
  double nu_floor_offset = 0.01;
  std::optional<double> nu_floor_override;  // replaces d/(n-1)
  double log_nu_cap = 18.4206807439524;     // log 1e8
  int threads = 1;
};

enum class FitStatus { Converged, MaxIter, BoundaryNu };

struct FitResult {
  ThetaParam theta;
  double loglik = 0.0;
  double grad_norm = 0.0;
  Matrix observed_info;
  Vector std_errors;  // theta coordinates
  Vector alpha_se;
  double nu_se = 0.0;
  bool info_pseudo_inverse = false;
  FitStatus status = FitStatus::Converged;
  int iterations = 0;
  double nu_floor = 0.0;
};

double loglik(const ThetaParam& theta, const Dataset& data, int threads = 1);
Vector loglik_grad(const ThetaParam& theta, const Dataset& data,
                   int threads = 1);

// Lower admissible bound d/(n-1) on the degrees of freedom for a simple
// random sample.
double nu_threshold(const Dataset& data);

FitResult fit_mle(const Dataset& data, const FitConfig& config = {});

// Negative symmetrized Jacobian of the analytic gradient, by central
// differences.
Matrix observed_info(const ThetaParam& theta_hat, const Dataset& data);

struct ProfileResult {
  std::vector<std::string> which;
  std::vector<Vector> grids;
  Matrix deviance;                  // grids[0].size() x grids[1].size() (or x 1)
  std::array<double, 5> chi2_levels;
  double loglik_hat = 0.0;
};

// Deviance 2 (l_hat - l_profile) over a grid of one or two of
// {"alpha", "log_omega", "log_nu"}; alpha and log_omega require d = 1.
ProfileResult profile_loglik(const Dataset& data,
                             const std::vector<std::string>& which,
                             const std::vector<Vector>& grids,
                             const FitConfig& config = {});

}  // namespace skewt
