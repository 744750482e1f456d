#include "skewt/elliptical.hpp"

#include <cmath>
#include <limits>

#include "skewt/special_functions.hpp"

namespace skewt {
namespace {

constexpr double kLog2Pi = 1.83787706640934548356065947281123527;
constexpr double kLogPi = 1.14472988584940017414342735135305871;

void validate(const DensityGenerator& g) {
  require(g.dim >= 1, "DensityGenerator: dim must be positive");
  require(g.scale > 0, "DensityGenerator: scale must be positive");
  switch (g.family) {
    case EllipticalFamily::Normal:
      break;
    case EllipticalFamily::PearsonVII:
      require(g.nu > 0, "PearsonVII: requires nu > 0");
      require(g.shape_m > 0.5 * g.dim, "PearsonVII: requires M > d/2");
      break;
    case EllipticalFamily::PearsonII:
      require(g.nu > -1, "PearsonII: requires nu > -1");
      break;
  }
}

}  // namespace

DensityGenerator DensityGenerator::normal(int d) {
  DensityGenerator g{EllipticalFamily::Normal, d, 0.0, 0.0, 1.0};
  validate(g);
  return g;
}

DensityGenerator DensityGenerator::pearson_vii(int d, double m, double nu) {
  DensityGenerator g{EllipticalFamily::PearsonVII, d, m, nu, 1.0};
  validate(g);
  return g;
}

DensityGenerator DensityGenerator::pearson_ii(int d, double nu) {
  DensityGenerator g{EllipticalFamily::PearsonII, d, 0.0, nu, 1.0};
  validate(g);
  return g;
}

DensityGenerator DensityGenerator::with_dim(int d) const {
  DensityGenerator g = *this;
  g.dim = d;
  validate(g);
  return g;
}

double DensityGenerator::log_normalizer() const {
  const double d = dim;
  double lc;
  switch (family) {
    case EllipticalFamily::Normal:
      lc = -0.5 * d * kLog2Pi;
      break;
    case EllipticalFamily::PearsonVII:
      lc = log_gamma(shape_m) - 0.5 * d * (kLogPi + std::log(nu)) -
           log_gamma(shape_m - 0.5 * d);
      break;
    case EllipticalFamily::PearsonII:
      lc = log_gamma(0.5 * d + nu + 1.0) - 0.5 * d * kLogPi -
           log_gamma(nu + 1.0);
      break;
    default:
      lc = 0.0;
  }
  return lc - d * std::log(scale);
}

double DensityGenerator::log_radial(double q) const {
  q /= scale * scale;
  switch (family) {
    case EllipticalFamily::Normal:
      return -0.5 * q;
    case EllipticalFamily::PearsonVII:
      return -shape_m * std::log1p(q / nu);
    case EllipticalFamily::PearsonII:
      if (q > 1.0) return -std::numeric_limits<double>::infinity();
      return nu * std::log1p(-q);
  }
  return 0.0;
}

EllipticalParams::EllipticalParams(Vector xi, Matrix omega,
                                   DensityGenerator gen)
    : xi_(std::move(xi)), omega_(std::move(omega)), gen_(std::move(gen)) {
  const int d = static_cast<int>(xi_.size());
  require(omega_.rows() == d && omega_.cols() == d,
          "EllipticalParams: dimension mismatch between xi and Omega");
  require(gen_.dim == d, "EllipticalParams: generator dimension mismatch");
  require((omega_ - omega_.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
          "EllipticalParams: Omega must be symmetric");
  Eigen::LLT<Matrix> llt(omega_);
  require(llt.info() == Eigen::Success,
          "EllipticalParams: Omega is not positive definite");
  chol_lower_ = llt.matrixL();
  log_det_omega_ = 2.0 * chol_lower_.diagonal().array().log().sum();
}

Vector EllipticalParams::solve_omega(const Vector& v) const {
  Vector w = chol_lower_.triangularView<Eigen::Lower>().solve(v);
  return chol_lower_.transpose().triangularView<Eigen::Upper>().solve(w);
}

double elliptical_logpdf(const Vector& y, const EllipticalParams& p) {
  require(y.size() == p.dim(), "elliptical_logpdf: dimension mismatch");
  const Vector u = y - p.xi();
  const double q = u.dot(p.solve_omega(u));
  return p.gen().log_normalizer() - 0.5 * p.log_det_omega() +
         p.gen().log_radial(q);
}

double radius_sample(const DensityGenerator& gen, Rng& rng) {
  const double d = gen.dim;
  double r2;
  switch (gen.family) {
    case EllipticalFamily::Normal:
      r2 = rng.chi_square(d);
      break;
    case EllipticalFamily::PearsonVII: {
      const double b = rng.beta(0.5 * d, gen.shape_m - 0.5 * d);
      r2 = gen.nu * b / (1.0 - b);
      break;
    }
    case EllipticalFamily::PearsonII:
      r2 = rng.beta(0.5 * d, gen.nu + 1.0);
      break;
    default:
      r2 = 0.0;
  }
  return gen.scale * std::sqrt(r2);
}

double radius_cdf(const DensityGenerator& gen, double r) {
  if (r <= 0.0) return 0.0;
  const double d = gen.dim;
  const double r2 = (r / gen.scale) * (r / gen.scale);
  switch (gen.family) {
    case EllipticalFamily::Normal:
      return gamma_p(0.5 * d, 0.5 * r2);
    case EllipticalFamily::PearsonVII:
      return incomplete_beta(0.5 * d, gen.shape_m - 0.5 * d,
                             r2 / (gen.nu + r2));
    case EllipticalFamily::PearsonII:
      return r2 >= 1.0 ? 1.0 : incomplete_beta(0.5 * d, gen.nu + 1.0, r2);
  }
  return 0.0;
}

double radius_quantile(const DensityGenerator& gen, double p) {
  require(p > 0.0 && p < 1.0, "radius_quantile: requires p in (0, 1)");
  double lo = 0.0, hi = gen.scale;
  while (radius_cdf(gen, hi) < p) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e300, "radius_quantile: bracket expansion failed");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (radius_cdf(gen, mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

Vector elliptical_sample(const EllipticalParams& p, Rng& rng) {
  const int d = p.dim();
  Vector s = rng.normal_vector(d);
  s /= s.norm();
  const double r = radius_sample(p.gen(), rng);
  return p.xi() + r * (p.chol_lower() * s);
}

double pvii_cdf1(double x, double m, double nu) {
  require(m > 0.5, "pvii_cdf1: requires M > 1/2");
  require(nu > 0, "pvii_cdf1: requires nu > 0");
  const double df = 2.0 * m - 1.0;
  return student_t_cdf(x * std::sqrt(df / nu), df);
}

double pii_cdf1(double x, double nu) {
  require(nu > -1, "pii_cdf1: requires nu > -1");
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return incomplete_beta(nu + 1.0, nu + 1.0, 0.5 * (x + 1.0));
}

DensityGenerator conditional_generator(const DensityGenerator& gen,
                                       double q) {
  require(q >= 0, "conditional_generator: requires q >= 0");
  switch (gen.family) {
    case EllipticalFamily::Normal:
      return DensityGenerator::normal(1);
    case EllipticalFamily::PearsonVII:
      return DensityGenerator::pearson_vii(1, gen.shape_m, gen.nu + q);
    case EllipticalFamily::PearsonII: {
      require(q <= 1.0, "conditional_generator: Pearson II requires q <= 1");
      DensityGenerator g = DensityGenerator::pearson_ii(1, gen.nu);
      g.scale = std::sqrt(1.0 - q);
      return g;
    }
  }
  throw std::domain_error("conditional_generator: unknown family");
}

}  // namespace skewt
