#pragma once

#include "skewt/common.hpp"
#include "skewt/rng.hpp"
#include "skewt/skew_normal.hpp"

namespace skewt {

// Parameters of the d-dimensional skew t distribution with location xi,
// dispersion Omega, shape alpha and degrees of freedom nu; tau != 0 selects
// the extended variant.
class StParams {
 public:
  StParams(Vector xi, Matrix omega, Vector alpha, double nu, double tau = 0.0);

  int dim() const { return sn_.dim(); }
  const Vector& xi() const { return xi_; }
  const Matrix& omega_mat() const { return sn_.omega_mat(); }
  const Vector& alpha() const { return sn_.alpha(); }
  double nu() const { return nu_; }
  double tau() const { return sn_.tau(); }
  const Vector& omega_diag() const { return sn_.omega_diag(); }
  const Matrix& corr() const { return sn_.corr(); }
  const Vector& delta() const { return sn_.delta(); }
  double delta_quad() const { return sn_.delta_quad(); }
  // The skew normal component of the scale mixture, located at zero.
  const SnParams& centered_sn() const { return sn_; }

 private:
  Vector xi_;
  SnParams sn_;
  double nu_;
};

double st_logpdf(const Vector& y, const StParams& p);

// Scale-mixture draw Y = xi + V^{-1/2} Z, V ~ chi^2_nu / nu.
Vector st_sample(const StParams& p, Rng& rng);

struct CdfEstimate {
  double value;
  double error;  // quadrature error estimate, or Monte Carlo standard error
};

// d = 1: quadrature of the scalar skew normal CDF against the mixing
// density (tau = 0).
CdfEstimate st_cdf(double y, const StParams& p, int nodes = 256);
// d >= 1: Monte Carlo.
CdfEstimate st_cdf(const Vector& y, const StParams& p, Rng& rng,
                   int n_draws = 1000000);

// E{Phi(a sqrt(V) + b)} for V ~ Gamma(psi, lambda), as a noncentral t
// probability.
double expected_phi_gamma(double a, double b, double psi, double lambda);

Vector st_mean(const StParams& p);       // nu > 1
Matrix st_variance(const StParams& p);   // nu > 2
double st_gamma1(const StParams& p);     // d = 1, nu > 3
double st_gamma2(const StParams& p);     // d = 1, nu > 4

struct StMoments {
  Vector mean;
  Matrix variance;
  double gamma1 = 0.0;  // d = 1 only
  double gamma2 = 0.0;
  bool has_shape_indices = false;
};

// All moments defined by nu; throws when a required order is not.
StMoments st_moments(const StParams& p);

StParams st_affine(const Vector& a, const Matrix& a_mat, const StParams& p);

struct QuadFormResult {
  double statistic;  // (y - xi)' Omega^{-1} (y - xi) / d
  double prob;       // F(d, nu) distribution function at the statistic
};

QuadFormResult st_quadform(const Vector& y, const StParams& p);

}  // namespace skewt
