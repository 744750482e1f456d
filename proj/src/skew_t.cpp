#include "skewt/skew_t.hpp"

#include <cmath>

#include "skewt/quadrature.hpp"
#include "skewt/special_functions.hpp"

namespace skewt {
namespace {

constexpr double kLogPi = 1.14472988584940017414342735135305871;

// log g_d(q; nu), the d-dimensional t density kernel in the quadratic form.
double log_t_kernel(double q, double nu, int d) {
  return log_gamma(0.5 * (nu + d)) - log_gamma(0.5 * nu) -
         0.5 * d * (kLogPi + std::log(nu)) -
         0.5 * (nu + d) * std::log1p(q / nu);
}

// E{V^{-m/2}} for V ~ chi^2_nu / nu.
double inv_sqrt_v_moment(double nu, int m) {
  return std::pow(0.5 * nu, 0.5 * m) *
         std::exp(log_gamma(0.5 * (nu - m)) - log_gamma(0.5 * nu));
}

// mu = delta sqrt(nu/pi) Gamma((nu-1)/2) / Gamma(nu/2), elementwise.
Vector mu_vector(const StParams& p) {
  const double c = std::sqrt(p.nu() / M_PI) *
                   std::exp(log_gamma(0.5 * (p.nu() - 1.0)) -
                            log_gamma(0.5 * p.nu()));
  return c * p.delta();
}

}  // namespace

StParams::StParams(Vector xi, Matrix omega, Vector alpha, double nu,
                   double tau)
    : xi_(std::move(xi)),
      sn_(Vector::Zero(xi_.size()), std::move(omega), std::move(alpha), tau),
      nu_(nu) {
  require(nu_ > 0, "StParams: requires nu > 0");
}

double st_logpdf(const Vector& y, const StParams& p) {
  require(y.size() == p.dim(), "st_logpdf: dimension mismatch");
  const int d = p.dim();
  const double nu = p.nu();
  const Vector u = y - p.xi();
  const Vector z = p.centered_sn().chol_lower().triangularView<Eigen::Lower>()
                       .solve(u);
  const double q = z.squaredNorm();
  const double log_base =
      log_t_kernel(q, nu, d) - 0.5 * p.centered_sn().log_det_omega();
  const double arg = p.alpha().dot(u.cwiseQuotient(p.omega_diag())) *
                     std::sqrt((nu + d) / (q + nu));
  if (p.tau() == 0.0)
    return std::log(2.0) + log_base + log_student_t_cdf(arg, nu + d);
  const double ncp = -p.tau() / std::sqrt(1.0 - p.delta_quad());
  return -log_normal_cdf(p.tau()) + log_base +
         std::log(noncentral_t_cdf(arg, nu + d, ncp));
}

Vector st_sample(const StParams& p, Rng& rng) {
  const Vector z = sn_sample_conditioning(p.centered_sn(), rng);
  const double v = rng.chi_square(p.nu()) / p.nu();
  return p.xi() + z / std::sqrt(v);
}

CdfEstimate st_cdf(double y, const StParams& p, int nodes) {
  require(p.dim() == 1, "st_cdf (scalar): requires d = 1");
  require(p.tau() == 0.0, "st_cdf (scalar): requires tau = 0");
  const double nu = p.nu();
  const SnParams z_params(Vector::Zero(1), p.omega_mat(), p.alpha());
  const double u = y - p.xi()(0);

  // Integrate F_Z(u sqrt(v)) against the chi^2_nu / nu density. The
  // substitution v = w^kappa makes the integrand smooth at zero for small nu.
  const double kappa = std::max(1.0, 4.0 / nu);
  const double log_norm =
      0.5 * nu * std::log(0.5 * nu) - log_gamma(0.5 * nu);
  // Upper limit from the exponential tail of the mixing density.
  double v_hi = 1.0;
  while (-0.5 * nu * v_hi + (0.5 * nu - 1.0) * std::log(v_hi) + log_norm >
         std::log(1e-20) - std::log(v_hi + 1.0))
    v_hi *= 1.5;
  const double w_hi = std::pow(v_hi, 1.0 / kappa);

  auto integrand = [&](double w) {
    const double v = std::pow(w, kappa);
    const double log_density = log_norm + (0.5 * nu - 1.0) * std::log(v) -
                               0.5 * nu * v + std::log(kappa) +
                               (kappa - 1.0) * std::log(w);
    return std::exp(log_density) * sn_scalar_cdf(u * std::sqrt(v), z_params);
  };
  const double full = gauss_legendre(nodes).integrate(integrand, 0.0, w_hi);
  const double half = gauss_legendre(nodes / 2).integrate(integrand, 0.0, w_hi);
  return {full, std::fabs(full - half) + 1e-12};
}

CdfEstimate st_cdf(const Vector& y, const StParams& p, Rng& rng,
                   int n_draws) {
  require(y.size() == p.dim(), "st_cdf: dimension mismatch");
  const SnParams& centered = p.centered_sn();
  long hits = 0;
  for (int i = 0; i < n_draws; ++i) {
    const Vector z = sn_sample_conditioning(centered, rng);
    const double v = rng.chi_square(p.nu()) / p.nu();
    const Vector draw = p.xi() + z / std::sqrt(v);
    if ((draw.array() <= y.array()).all()) ++hits;
  }
  const double est = static_cast<double>(hits) / n_draws;
  return {est, std::sqrt(est * (1.0 - est) / n_draws)};
}

double expected_phi_gamma(double a, double b, double psi, double lambda) {
  require(psi > 0 && lambda > 0,
          "expected_phi_gamma: requires psi > 0 and lambda > 0");
  return noncentral_t_cdf(a * std::sqrt(psi / lambda), 2.0 * psi, -b);
}

Vector st_mean(const StParams& p) {
  require(p.nu() > 1, "st_mean: moment undefined for nu <= 1");
  if (p.tau() == 0.0)
    return p.xi() + p.omega_diag().cwiseProduct(mu_vector(p));
  return p.xi() + inv_sqrt_v_moment(p.nu(), 1) * zeta1(p.tau()) *
                      p.omega_diag().cwiseProduct(p.delta());
}

Matrix st_variance(const StParams& p) {
  require(p.nu() > 2, "st_variance: moment undefined for nu <= 2");
  const double scale = p.nu() / (p.nu() - 2.0);
  const Vector od = p.omega_diag().cwiseProduct(p.delta());
  if (p.tau() == 0.0) {
    const Vector om = p.omega_diag().cwiseProduct(mu_vector(p));
    return scale * p.omega_mat() - om * om.transpose();
  }
  const double z1 = zeta1(p.tau()), z2 = zeta2(p.tau());
  const Matrix second =
      scale * (p.omega_mat() + (z2 + z1 * z1) * od * od.transpose());
  const Vector mean_part = inv_sqrt_v_moment(p.nu(), 1) * z1 * od;
  return second - mean_part * mean_part.transpose();
}

double st_gamma1(const StParams& p) {
  require(p.dim() == 1, "st_gamma1: scalar parameters only");
  require(p.tau() == 0.0, "st_gamma1: defined for tau = 0 only");
  require(p.nu() > 3, "st_gamma1: moment undefined for nu <= 3");
  const double nu = p.nu();
  const double mu = mu_vector(p)(0);
  const double delta = p.delta()(0);
  const double s2 = nu / (nu - 2.0) - mu * mu;
  return mu *
         (nu * (3.0 - delta * delta) / (nu - 3.0) - 3.0 * nu / (nu - 2.0) +
          2.0 * mu * mu) /
         std::pow(s2, 1.5);
}

double st_gamma2(const StParams& p) {
  require(p.dim() == 1, "st_gamma2: scalar parameters only");
  require(p.tau() == 0.0, "st_gamma2: defined for tau = 0 only");
  require(p.nu() > 4, "st_gamma2: moment undefined for nu <= 4");
  const double nu = p.nu();
  const double mu = mu_vector(p)(0);
  const double delta = p.delta()(0);
  const double mu2 = mu * mu;
  const double s2 = nu / (nu - 2.0) - mu2;
  return (3.0 * nu * nu / ((nu - 2.0) * (nu - 4.0)) -
          4.0 * mu2 * nu * (3.0 - delta * delta) / (nu - 3.0) +
          6.0 * mu2 * nu / (nu - 2.0) - 3.0 * mu2 * mu2) /
             (s2 * s2) -
         3.0;
}

StMoments st_moments(const StParams& p) {
  StMoments m;
  m.mean = st_mean(p);
  m.variance = st_variance(p);
  if (p.dim() == 1 && p.tau() == 0.0) {
    m.gamma1 = st_gamma1(p);
    m.gamma2 = st_gamma2(p);
    m.has_shape_indices = true;
  }
  return m;
}

StParams st_affine(const Vector& a, const Matrix& a_mat, const StParams& p) {
  const SnParams z_new =
      sn_affine(Vector::Zero(a_mat.rows()), a_mat, p.centered_sn());
  return StParams(a + a_mat * p.xi(), z_new.omega_mat(), z_new.alpha(),
                  p.nu(), p.tau());
}

QuadFormResult st_quadform(const Vector& y, const StParams& p) {
  require(y.size() == p.dim(), "st_quadform: dimension mismatch");
  require(p.tau() == 0.0, "st_quadform: defined for tau = 0 only");
  const Vector u = y - p.xi();
  const Vector z = p.centered_sn().chol_lower().triangularView<Eigen::Lower>()
                       .solve(u);
  const double stat = z.squaredNorm() / p.dim();
  return {stat, f_cdf(stat, p.dim(), p.nu())};
}

}  // namespace skewt
