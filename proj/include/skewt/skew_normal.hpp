#pragma once

#include "skewt/common.hpp"
#include "skewt/rng.hpp"

namespace skewt {

// Parameters of the d-dimensional skew normal distribution with location xi,
// dispersion Omega and shape alpha; tau != 0 selects the extended variant.
class SnParams {
 public:
  SnParams(Vector xi, Matrix omega, Vector alpha, double tau = 0.0);

  int dim() const { return static_cast<int>(xi_.size()); }
  const Vector& xi() const { return xi_; }
  const Matrix& omega_mat() const { return omega_; }
  const Vector& alpha() const { return alpha_; }
  double tau() const { return tau_; }

  const Vector& omega_diag() const { return omega_diag_; }
  const Matrix& corr() const { return corr_; }
  const Vector& delta() const { return delta_; }
  double delta_quad() const { return delta_quad_; }  // delta' corr^{-1} delta
  double alpha0() const;
  double log_det_omega() const { return log_det_omega_; }
  const Matrix& chol_lower() const { return chol_lower_; }
  // Lower Cholesky factor of the augmented correlation matrix
  // [[1, delta'], [delta, corr]] driving the conditioning representation.
  const Matrix& star_chol() const { return star_chol_; }

 private:
  Vector xi_, alpha_;
  Matrix omega_;
  double tau_;
  Vector omega_diag_, delta_;
  Matrix corr_, chol_lower_, star_chol_;
  double delta_quad_, log_det_omega_;
};

Vector delta_from_alpha(const Vector& alpha, const Matrix& corr);
Vector alpha_from_delta(const Vector& delta, const Matrix& corr);

double sn_logpdf(const Vector& y, const SnParams& p);

// Cumulant generating function (tau = 0).
double sn_cgf(const Vector& t, const SnParams& p);

Vector sn_sample_conditioning(const SnParams& p, Rng& rng);
Vector sn_sample_transformation(const SnParams& p, Rng& rng);
double sn_sample_max(const SnParams& p, Rng& rng);  // d = 1 only

// Correlation matrix Psi used by the transformation representation,
// recovered from (corr, delta).
Matrix sn_transformation_psi(const SnParams& p);

// Parameters of a + A Z for full row rank A.
SnParams sn_affine(const Vector& a, const Matrix& a_mat, const SnParams& p);

// Scalar distribution function via Owen's T (d = 1, tau = 0).
double sn_scalar_cdf(double y, const SnParams& p);

}  // namespace skewt
