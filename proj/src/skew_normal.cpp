#include "skewt/skew_normal.hpp"

#include <cmath>

#include "skewt/special_functions.hpp"

namespace skewt {
namespace {

constexpr double kLog2Pi = 1.83787706640934548356065947281123527;

Matrix correlation_from(const Matrix& omega, const Vector& omega_diag) {
  return omega_diag.cwiseInverse().asDiagonal() * omega *
         omega_diag.cwiseInverse().asDiagonal();
}

// Lower Cholesky factor of [[1, delta'], [delta, corr]].
Matrix star_cholesky(const Vector& delta, const Matrix& corr) {
  const int d = static_cast<int>(delta.size());
  Matrix star(d + 1, d + 1);
  star(0, 0) = 1.0;
  star.block(0, 1, 1, d) = delta.transpose();
  star.block(1, 0, d, 1) = delta;
  star.block(1, 1, d, d) = corr;
  Eigen::LLT<Matrix> llt(star);
  require(llt.info() == Eigen::Success,
          "skew normal: the augmented correlation matrix is not positive "
          "definite");
  return llt.matrixL();
}

double mvn_logpdf_centered(const Vector& u, const Matrix& chol_lower,
                           double log_det) {
  const Vector z = chol_lower.triangularView<Eigen::Lower>().solve(u);
  return -0.5 * (u.size() * kLog2Pi + log_det + z.squaredNorm());
}

}  // namespace

SnParams::SnParams(Vector xi, Matrix omega, Vector alpha, double tau)
    : xi_(std::move(xi)),
      alpha_(std::move(alpha)),
      omega_(std::move(omega)),
      tau_(tau) {
  const int d = dim();
  require(alpha_.size() == d && omega_.rows() == d && omega_.cols() == d,
          "SnParams: dimension mismatch");
  require((omega_ - omega_.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
          "SnParams: Omega must be symmetric");
  Eigen::LLT<Matrix> llt(omega_);
  require(llt.info() == Eigen::Success,
          "SnParams: Omega is not positive definite");
  chol_lower_ = llt.matrixL();
  log_det_omega_ = 2.0 * chol_lower_.diagonal().array().log().sum();
  omega_diag_ = omega_.diagonal().cwiseSqrt();
  corr_ = correlation_from(omega_, omega_diag_);
  delta_ = delta_from_alpha(alpha_, corr_);
  delta_quad_ = delta_.dot(corr_.llt().solve(delta_));
  require(delta_quad_ < 1.0, "SnParams: delta' corr^{-1} delta must be < 1");
  star_chol_ = star_cholesky(delta_, corr_);
}

double SnParams::alpha0() const {
  return tau_ / std::sqrt(1.0 - delta_quad_);
}

Vector delta_from_alpha(const Vector& alpha, const Matrix& corr) {
  const double denom = std::sqrt(1.0 + alpha.dot(corr * alpha));
  return (corr * alpha) / denom;
}

Vector alpha_from_delta(const Vector& delta, const Matrix& corr) {
  const Vector solved = corr.llt().solve(delta);
  const double quad = delta.dot(solved);
  require(quad < 1.0,
          "alpha_from_delta: delta' corr^{-1} delta must be < 1");
  return solved / std::sqrt(1.0 - quad);
}

double sn_logpdf(const Vector& y, const SnParams& p) {
  require(y.size() == p.dim(), "sn_logpdf: dimension mismatch");
  const Vector u = y - p.xi();
  const double base = mvn_logpdf_centered(u, p.chol_lower(),
                                          p.log_det_omega());
  const double shape_arg =
      p.alpha().dot(u.cwiseQuotient(p.omega_diag()));
  if (p.tau() == 0.0) return std::log(2.0) + base + log_normal_cdf(shape_arg);
  return -log_normal_cdf(p.tau()) + base +
         log_normal_cdf(p.alpha0() + shape_arg);
}

double sn_cgf(const Vector& t, const SnParams& p) {
  require(t.size() == p.dim(), "sn_cgf: dimension mismatch");
  require(p.tau() == 0.0, "sn_cgf: defined for tau = 0 only");
  const double quad = t.dot(p.omega_mat() * t);
  return t.dot(p.xi()) + 0.5 * quad +
         zeta0(p.delta().dot(p.omega_diag().cwiseProduct(t)));
}

Vector sn_sample_conditioning(const SnParams& p, Rng& rng) {
  const int d = p.dim();
  const Matrix& chol = p.star_chol();
  for (;;) {
    const Vector g = rng.normal_vector(d + 1);
    const Vector u = chol * g;
    if (p.tau() == 0.0) {
      const double sign = u(0) > 0 ? 1.0 : -1.0;
      return p.xi() + p.omega_diag().cwiseProduct(sign * u.tail(d));
    }
    // Extended variant: accept on U0 + tau > 0.
    if (u(0) + p.tau() > 0)
      return p.xi() + p.omega_diag().cwiseProduct(u.tail(d));
  }
}

Matrix sn_transformation_psi(const SnParams& p) {
  const int d = p.dim();
  const Vector& delta = p.delta();
  Matrix psi(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      psi(j, k) = (p.corr()(j, k) - delta(j) * delta(k)) /
                  std::sqrt((1.0 - delta(j) * delta(j)) *
                            (1.0 - delta(k) * delta(k)));
  return psi;
}

Vector sn_sample_transformation(const SnParams& p, Rng& rng) {
  require(p.tau() == 0.0,
          "sn_sample_transformation: defined for tau = 0 only");
  const int d = p.dim();
  const Matrix psi = sn_transformation_psi(p);
  Eigen::LLT<Matrix> llt(psi);
  require(llt.info() == Eigen::Success,
          "sn_sample_transformation: Psi is not positive definite");
  const double u0 = std::fabs(rng.normal());
  const Vector u = Matrix(llt.matrixL()) * rng.normal_vector(d);
  Vector z(d);
  for (int j = 0; j < d; ++j) {
    const double dj = p.delta()(j);
    z(j) = dj * u0 + std::sqrt(1.0 - dj * dj) * u(j);
  }
  return p.xi() + p.omega_diag().cwiseProduct(z);
}

double sn_sample_max(const SnParams& p, Rng& rng) {
  require(p.dim() == 1, "sn_sample_max: scalar parameters only");
  require(p.tau() == 0.0, "sn_sample_max: defined for tau = 0 only");
  const double a = p.alpha()(0);
  const double rho = (1.0 - a * a) / (1.0 + a * a);
  const double c = std::sqrt(1.0 - rho * rho);
  const double g0 = rng.normal(), g1 = rng.normal();
  const double u0 = g0;
  const double u1 = rho * g0 + c * g1;
  const double z =
      a >= 0 ? std::max(u0, u1) : std::min(u0, u1);
  return p.xi()(0) + p.omega_diag()(0) * z;
}

SnParams sn_affine(const Vector& a, const Matrix& a_mat, const SnParams& p) {
  const int m = static_cast<int>(a_mat.rows());
  require(a_mat.cols() == p.dim(), "sn_affine: dimension mismatch");
  require(a.size() == m, "sn_affine: offset dimension mismatch");
  require(m <= p.dim(), "sn_affine: A must have full row rank, m <= d");
  Eigen::ColPivHouseholderQR<Matrix> qr(a_mat.transpose());
  require(qr.rank() == m, "sn_affine: A is rank deficient");

  const Vector xi_new = a + a_mat * p.xi();
  const Matrix omega_new = a_mat * p.omega_mat() * a_mat.transpose();
  // Covariance between the latent U0 and the transformed variable.
  const Vector cov_new =
      a_mat * p.omega_diag().cwiseProduct(p.delta());
  const Vector omega_diag_new = omega_new.diagonal().cwiseSqrt();
  const Vector delta_new = cov_new.cwiseQuotient(omega_diag_new);
  const Matrix corr_new = correlation_from(omega_new, omega_diag_new);
  const Vector alpha_new = alpha_from_delta(delta_new, corr_new);
  return SnParams(xi_new, omega_new, alpha_new, p.tau());
}

double sn_scalar_cdf(double y, const SnParams& p) {
  require(p.dim() == 1, "sn_scalar_cdf: scalar parameters only");
  require(p.tau() == 0.0, "sn_scalar_cdf: defined for tau = 0 only");
  const double z = (y - p.xi()(0)) / p.omega_diag()(0);
  return normal_cdf(z) - 2.0 * owen_t(z, p.alpha()(0));
}

}  // namespace skewt
