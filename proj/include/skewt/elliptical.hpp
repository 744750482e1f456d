#pragma once

#include "skewt/common.hpp"
#include "skewt/rng.hpp"

namespace skewt {

enum class EllipticalFamily { Normal, PearsonVII, PearsonII };

// Radial density generator: the full density is
// c_d |Omega|^{-1/2} f~(Q) with Q the Mahalanobis quadratic form.
//   Normal:     f~(q) = exp(-q/2)
//   PearsonVII: f~(q) = (1 + q/nu)^{-M},  nu > 0, M > d/2
//   PearsonII:  f~(q) = (1 - q)^{nu} on q <= 1,  nu > -1
// `scale` rescales the support radius; conditional Pearson II generators
// carry scale = sqrt(1 - q0).
struct DensityGenerator {
  EllipticalFamily family = EllipticalFamily::Normal;
  int dim = 1;
  double shape_m = 0.0;
  double nu = 0.0;
  double scale = 1.0;

  static DensityGenerator normal(int d);
  static DensityGenerator pearson_vii(int d, double m, double nu);
  static DensityGenerator pearson_ii(int d, double nu);

  double log_normalizer() const;        // log c_d, includes the scale factor
  double log_radial(double q) const;    // log f~(q), -inf outside support
  DensityGenerator with_dim(int d) const;
};

class EllipticalParams {
 public:
  EllipticalParams(Vector xi, Matrix omega, DensityGenerator gen);

  int dim() const { return static_cast<int>(xi_.size()); }
  const Vector& xi() const { return xi_; }
  const Matrix& omega() const { return omega_; }
  const DensityGenerator& gen() const { return gen_; }
  const Matrix& chol_lower() const { return chol_lower_; }
  double log_det_omega() const { return log_det_omega_; }
  Vector solve_omega(const Vector& v) const;

 private:
  Vector xi_;
  Matrix omega_;
  DensityGenerator gen_;
  Matrix chol_lower_;
  double log_det_omega_;
};

double elliptical_logpdf(const Vector& y, const EllipticalParams& p);

// Draw of the generating radius R, with density proportional to
// f~(r^2) r^{d-1}.
double radius_sample(const DensityGenerator& gen, Rng& rng);

// P(R <= r) and its inverse (by bisection).
double radius_cdf(const DensityGenerator& gen, double r);
double radius_quantile(const DensityGenerator& gen, double p);

// Y = xi + R L^T S with S uniform on the unit sphere.
Vector elliptical_sample(const EllipticalParams& p, Rng& rng);

// Scalar Pearson VII(0, 1, M, nu) distribution function.
double pvii_cdf1(double x, double m, double nu);

// Scalar Pearson II(0, 1, nu) distribution function.
double pii_cdf1(double x, double nu);

// Scalar generator of the conditional distribution given quadratic form q.
DensityGenerator conditional_generator(const DensityGenerator& gen, double q);

}  // namespace skewt
