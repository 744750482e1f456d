#include "skewt/skew_elliptical.hpp"

#include <cmath>
#include <limits>

#include "skewt/skew_normal.hpp"
#include "skewt/special_functions.hpp"

namespace skewt {
namespace {

constexpr double kLogPi = 1.14472988584940017414342735135305871;

Matrix augmented_corr(const Vector& delta, const Matrix& corr) {
  const int d = static_cast<int>(delta.size());
  Matrix star(d + 1, d + 1);
  star(0, 0) = 1.0;
  star.block(0, 1, 1, d) = delta.transpose();
  star.block(1, 0, d, 1) = delta;
  star.block(1, 1, d, d) = corr;
  return star;
}

// Direction vector of spherical coordinates.
Vector sphere_point(const Vector& theta) {
  const int d = static_cast<int>(theta.size()) + 1;
  Vector s(d);
  double prod = 1.0;
  for (int j = 0; j < d - 1; ++j) {
    s(j) = prod * std::cos(theta(j));
    prod *= std::sin(theta(j));
  }
  s(d - 1) = prod;
  return s;
}

// Van der Corput radical-inverse sequence in base 2.
double van_der_corput(std::uint64_t i) {
  double inv = 0.5, x = 0.0;
  for (++i; i > 0; i >>= 1, inv *= 0.5)
    if (i & 1) x += inv;
  return x;
}

// Skewing CDF G evaluated at the transformed argument w(z), as it appears in
// the skewed Pearson densities; q is the quadratic form of z.
double skewing_log_cdf(const SkewEllipticalParams& p, double alpha_dot_z,
                       double q) {
  switch (p.gen().family) {
    case EllipticalFamily::Normal:
      return log_normal_cdf(alpha_dot_z);
    case EllipticalFamily::PearsonVII:
      return std::log(
          pvii_cdf1(alpha_dot_z / std::sqrt(p.gen().nu + q), p.gen().shape_m,
                    1.0));
    case EllipticalFamily::PearsonII:
      return std::log(
          pii_cdf1(alpha_dot_z / std::sqrt(1.0 - q), p.gen().nu));
  }
  return 0.0;
}

}  // namespace

SkewEllipticalParams::SkewEllipticalParams(Vector xi, Matrix corr,
                                           Vector alpha, DensityGenerator gen)
    : xi_(std::move(xi)),
      alpha_(std::move(alpha)),
      corr_(std::move(corr)),
      gen_(std::move(gen)) {
  const int d = dim();
  require(alpha_.size() == d && corr_.rows() == d && corr_.cols() == d,
          "SkewEllipticalParams: dimension mismatch");
  require(gen_.dim == d, "SkewEllipticalParams: generator dimension mismatch");
  require((corr_.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-10,
          "SkewEllipticalParams: corr must have unit diagonal");
  if (gen_.family == EllipticalFamily::PearsonVII)
    require(gen_.shape_m > 0.5 * (d + 1),
            "SkewEllipticalParams: Pearson VII requires M > (d+1)/2");
  Eigen::LLT<Matrix> llt(corr_);
  require(llt.info() == Eigen::Success,
          "SkewEllipticalParams: corr is not positive definite");
  chol_lower_ = llt.matrixL();
  log_det_corr_ = 2.0 * chol_lower_.diagonal().array().log().sum();
  delta_ = delta_from_alpha(alpha_, corr_);
}

Vector SkewEllipticalParams::solve_corr(const Vector& v) const {
  Vector w = chol_lower_.triangularView<Eigen::Lower>().solve(v);
  return chol_lower_.transpose().triangularView<Eigen::Upper>().solve(w);
}

double se_logpdf(const Vector& z, const SkewEllipticalParams& p) {
  switch (p.gen().family) {
    case EllipticalFamily::PearsonVII:
      return spvii_logpdf(z, p);
    case EllipticalFamily::PearsonII:
      return spii_logpdf(z, p);
    case EllipticalFamily::Normal: {
      require(z.size() == p.dim(), "se_logpdf: dimension mismatch");
      const Vector u = z - p.xi();
      const Vector w =
          p.chol_lower().triangularView<Eigen::Lower>().solve(u);
      const double log_base = -0.5 * (p.dim() * (kLogPi + std::log(2.0)) +
                                      p.log_det_corr() + w.squaredNorm());
      return std::log(2.0) + log_base + skewing_log_cdf(p, p.alpha().dot(u),
                                                        w.squaredNorm());
    }
  }
  throw std::domain_error("se_logpdf: unknown family");
}

double spvii_logpdf(const Vector& z, const SkewEllipticalParams& p) {
  require(p.gen().family == EllipticalFamily::PearsonVII,
          "spvii_logpdf: requires a Pearson VII generator");
  require(z.size() == p.dim(), "spvii_logpdf: dimension mismatch");
  const int d = p.dim();
  const double m = p.gen().shape_m, nu = p.gen().nu;
  const Vector u = z - p.xi();
  const double q = u.dot(p.solve_corr(u));
  // Base density: Pearson VII_d(0, corr, M - 1/2, nu).
  const double log_c = log_gamma(m - 0.5) -
                       0.5 * d * (kLogPi + std::log(nu)) -
                       log_gamma(m - 0.5 - 0.5 * d);
  const double log_base = log_c - 0.5 * p.log_det_corr() -
                          (m - 0.5) * std::log1p(q / nu);
  return std::log(2.0) + log_base +
         skewing_log_cdf(p, p.alpha().dot(u), q);
}

double spii_logpdf(const Vector& z, const SkewEllipticalParams& p) {
  require(p.gen().family == EllipticalFamily::PearsonII,
          "spii_logpdf: requires a Pearson II generator");
  require(z.size() == p.dim(), "spii_logpdf: dimension mismatch");
  const int d = p.dim();
  const double nu = p.gen().nu;
  const Vector u = z - p.xi();
  const double q = u.dot(p.solve_corr(u));
  if (q >= 1.0) return -std::numeric_limits<double>::infinity();
  // Base density: Pearson II_d(0, corr, nu + 1/2).
  const double log_c =
      log_gamma(0.5 * d + nu + 1.5) - 0.5 * d * kLogPi - log_gamma(nu + 1.5);
  const double log_base =
      log_c - 0.5 * p.log_det_corr() + (nu + 0.5) * std::log1p(-q);
  return std::log(2.0) + log_base +
         skewing_log_cdf(p, p.alpha().dot(u), q);
}

Vector se_sample_conditioning(const SkewEllipticalParams& p, Rng& rng) {
  const int d = p.dim();
  const EllipticalParams aug(Vector::Zero(d + 1),
                             augmented_corr(p.delta(), p.corr()),
                             p.gen().with_dim(d + 1));
  const Vector u = elliptical_sample(aug, rng);
  const double sign = u(0) > 0 ? 1.0 : -1.0;
  return p.xi() + sign * u.tail(d);
}

std::pair<Matrix, Vector> se_transform_params(const Vector& delta,
                                              const Matrix& psi) {
  const int d = static_cast<int>(delta.size());
  require(psi.rows() == d && psi.cols() == d,
          "se_transform_params: dimension mismatch");
  require((delta.array().abs() < 1.0).all(),
          "se_transform_params: requires |delta_j| < 1");
  Vector lambda(d), dscale(d);
  for (int j = 0; j < d; ++j) {
    lambda(j) = delta(j) / std::sqrt(1.0 - delta(j) * delta(j));
    dscale(j) = 1.0 / std::sqrt(1.0 + lambda(j) * lambda(j));
  }
  const Matrix omega = dscale.asDiagonal() *
                       (psi + lambda * lambda.transpose()) *
                       dscale.asDiagonal();
  Eigen::LLT<Matrix> llt(psi);
  require(llt.info() == Eigen::Success,
          "se_transform_params: Psi is not positive definite");
  const Vector psi_inv_lambda = llt.solve(lambda);
  const Vector alpha = dscale.cwiseInverse().asDiagonal() * psi_inv_lambda /
                       std::sqrt(1.0 + lambda.dot(psi_inv_lambda));
  return {omega, alpha};
}

Vector se_sample_transformation(const Vector& delta, const Matrix& psi,
                                const DensityGenerator& gen, Rng& rng) {
  const int d = static_cast<int>(delta.size());
  require(gen.dim == d + 1,
          "se_sample_transformation: generator must have dimension d + 1");
  Matrix block = Matrix::Identity(d + 1, d + 1);
  block.block(1, 1, d, d) = psi;
  const EllipticalParams params(Vector::Zero(d + 1), block, gen);
  const Vector u = elliptical_sample(params, rng);
  Vector z(d);
  for (int j = 0; j < d; ++j)
    z(j) = delta(j) * std::fabs(u(0)) +
           std::sqrt(1.0 - delta(j) * delta(j)) * u(j + 1);
  return z;
}

double se_sample_max2(double rho, const DensityGenerator& gen, Rng& rng) {
  require(std::fabs(rho) < 1.0, "se_sample_max2: requires |rho| < 1");
  require(gen.dim == 2, "se_sample_max2: generator must be bivariate");
  Matrix corr(2, 2);
  corr << 1.0, rho, rho, 1.0;
  const EllipticalParams params(Vector::Zero(2), corr, gen);
  const Vector u = elliptical_sample(params, rng);
  return std::max(u(0), u(1));
}

double angular_logpdf(const Vector& theta, std::optional<double> r,
                      const SkewEllipticalParams& p, int n_radius) {
  const int d = p.dim();
  require(d >= 2, "angular_logpdf: requires d >= 2");
  require(theta.size() == d - 1, "angular_logpdf: theta must have d - 1 angles");
  for (int k = 0; k < d - 2; ++k)
    require(theta(k) >= 0.0 && theta(k) < M_PI,
            "angular_logpdf: theta_k must lie in [0, pi)");
  require(theta(d - 2) >= 0.0 && theta(d - 2) < 2.0 * M_PI,
          "angular_logpdf: the last angle must lie in [0, 2 pi)");

  double log_jac = log_gamma(0.5 * d) - 0.5 * d * kLogPi;
  for (int k = 0; k < d - 2; ++k)
    log_jac += (d - k - 2) * std::log(std::sin(theta(k)));

  // alpha' L' s(theta), with L the upper factor of corr = L' L.
  const Vector s = sphere_point(theta);
  const double c = p.alpha().dot(p.chol_lower() * s);

  if (r) {
    require(*r > 0.0, "angular_logpdf: radius must be positive");
    if (p.gen().family == EllipticalFamily::PearsonII)
      require(*r < 1.0, "angular_logpdf: Pearson II radius must be < 1");
    return log_jac + skewing_log_cdf(p, c * *r, *r * *r);
  }

  // Marginal over the radius. For the Normal family, X / R has a scaled t
  // distribution, giving a closed form.
  if (p.gen().family == EllipticalFamily::Normal)
    return log_jac +
           std::log(student_t_cdf(std::sqrt(static_cast<double>(d)) * c, d));

  double acc = 0.0;
  for (int i = 0; i < n_radius; ++i) {
    const double ri = radius_quantile(p.gen(), van_der_corput(i));
    acc += std::exp(skewing_log_cdf(p, c * ri, ri * ri));
  }
  return log_jac + std::log(acc / n_radius);
}

}  // namespace skewt
