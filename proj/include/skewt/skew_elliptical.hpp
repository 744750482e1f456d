#pragma once

#include <optional>
#include <utility>

#include "skewt/common.hpp"
#include "skewt/elliptical.hpp"
#include "skewt/rng.hpp"

namespace skewt {

// Skewed Pearson VII / Pearson II parameters: location xi, correlation
// matrix corr, shape alpha, and the elliptical generator of the underlying
// (d+1)-dimensional construction.
class SkewEllipticalParams {
 public:
  SkewEllipticalParams(Vector xi, Matrix corr, Vector alpha,
                       DensityGenerator gen);

  int dim() const { return static_cast<int>(xi_.size()); }
  const Vector& xi() const { return xi_; }
  const Matrix& corr() const { return corr_; }
  const Vector& alpha() const { return alpha_; }
  const DensityGenerator& gen() const { return gen_; }
  const Vector& delta() const { return delta_; }
  const Matrix& chol_lower() const { return chol_lower_; }
  double log_det_corr() const { return log_det_corr_; }
  Vector solve_corr(const Vector& v) const;

 private:
  Vector xi_, alpha_, delta_;
  Matrix corr_, chol_lower_;
  DensityGenerator gen_;
  double log_det_corr_;
};

// Skewed elliptical log density for any supported generator; the Normal
// family reduces to the skew normal density.
double se_logpdf(const Vector& z, const SkewEllipticalParams& p);

double spvii_logpdf(const Vector& z, const SkewEllipticalParams& p);
double spii_logpdf(const Vector& z, const SkewEllipticalParams& p);

// Draw by conditioning: U* ~ Ell_{d+1}(0, Omega*, f~), return U sign-flipped
// on U0.
Vector se_sample_conditioning(const SkewEllipticalParams& p, Rng& rng);

// (Omega, alpha) of the distribution generated by the componentwise
// transformation Z_j = delta_j |U0| + sqrt(1 - delta_j^2) U_j.
std::pair<Matrix, Vector> se_transform_params(const Vector& delta,
                                              const Matrix& psi);

// Draw by that transformation; gen is the (d+1)-dimensional generator.
Vector se_sample_transformation(const Vector& delta, const Matrix& psi,
                                const DensityGenerator& gen, Rng& rng);

// Scalar draw max(U0, U1) from a bivariate elliptical vector with
// off-diagonal correlation rho.
double se_sample_max2(double rho, const DensityGenerator& gen, Rng& rng);

// Log density of the angular part of the polar representation, in spherical
// coordinates; conditional on radius r when given, else marginalized over
// the radius by quasi-random averaging (closed form for the Normal family).
double angular_logpdf(const Vector& theta, std::optional<double> r,
                      const SkewEllipticalParams& p, int n_radius = 4096);

}  // namespace skewt
