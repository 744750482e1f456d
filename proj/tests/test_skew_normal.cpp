#include <doctest.h>

#include <cmath>

#include "skewt/elliptical.hpp"
#include "skewt/skew_normal.hpp"
#include "skewt/special_functions.hpp"
#include "support/test_stats.hpp"

using namespace skewt;
using testsupport::integrate_real_line;

namespace {

Matrix random_corr(int d, Rng& rng) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  Matrix s = a * a.transpose() + d * Matrix::Identity(d, d);
  const Vector scale = s.diagonal().cwiseSqrt().cwiseInverse();
  return scale.asDiagonal() * s * scale.asDiagonal();
}

Matrix random_spd(int d, Rng& rng) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + 0.5 * d * Matrix::Identity(d, d);
}

double mvn_logpdf(const Vector& y, const Vector& xi, const Matrix& omega) {
  Eigen::LLT<Matrix> llt(omega);
  const Vector z = Matrix(llt.matrixL())
                       .triangularView<Eigen::Lower>()
                       .solve(y - xi);
  return -0.5 * (y.size() * std::log(2.0 * M_PI) +
                 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum() +
                 z.squaredNorm());
}

}  // namespace

TEST_CASE("delta alpha maps") {
  Rng rng(3);
  // alpha = 0 maps to delta = 0 and back.
  const Matrix corr2 = random_corr(3, rng);
  CHECK(delta_from_alpha(Vector::Zero(3), corr2).norm() == 0.0);
  CHECK(alpha_from_delta(Vector::Zero(3), corr2).norm() == 0.0);
  // Scalar case: alpha = 1 gives delta = 1/sqrt(2).
  Matrix one = Matrix::Identity(1, 1);
  CHECK(delta_from_alpha(Vector::Constant(1, 1.0), one)(0) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  // Round trips in d = 4.
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix corr = random_corr(4, rng);
    Vector alpha(4);
    for (int i = 0; i < 4; ++i) alpha(i) = rng.uniform(-4.0, 4.0);
    const Vector delta = delta_from_alpha(alpha, corr);
    CHECK((alpha_from_delta(delta, corr) - alpha).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK(delta.dot(corr.llt().solve(delta)) < 1.0);
  }
  // Invalid delta is rejected by name.
  Vector bad = Vector::Constant(1, 1.2);
  CHECK_THROWS_WITH_AS(alpha_from_delta(bad, one),
                       doctest::Contains("delta' corr^{-1} delta"),
                       std::domain_error);
}

TEST_CASE("sn_logpdf special cases and normalization") {
  Rng rng(5);
  const Matrix omega = random_spd(2, rng);
  Vector xi(2);
  xi << 0.4, -1.0;
  Vector alpha(2);
  alpha << 2.0, -1.0;
  SnParams p(xi, omega, alpha);
  // Density at the location equals the centered normal density.
  CHECK(sn_logpdf(xi, p) ==
        doctest::Approx(mvn_logpdf(xi, xi, omega)).epsilon(1e-13));
  // alpha = 0 recovers the normal density on a grid.
  SnParams p0(xi, omega, Vector::Zero(2));
  for (int i = 0; i < 20; ++i) {
    Vector y = xi + rng.normal_vector(2);
    CHECK(sn_logpdf(y, p0) ==
          doctest::Approx(mvn_logpdf(y, xi, omega)).epsilon(1e-13));
  }
  // Normalization in d = 2.
  const double mass = testsupport::integrate_plane([&](double u, double v) {
    Vector y(2);
    y << u, v;
    return std::exp(sn_logpdf(y, p));
  });
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("extended density reduces to plain as tau vanishes") {
  Rng rng(7);
  const Matrix omega = random_spd(2, rng);
  Vector alpha(2);
  alpha << 1.5, -0.7;
  SnParams plain(Vector::Zero(2), omega, alpha, 0.0);
  SnParams eps(Vector::Zero(2), omega, alpha, 1e-13);
  for (int i = 0; i < 20; ++i) {
    const Vector y = rng.normal_vector(2);
    CHECK(sn_logpdf(y, eps) ==
          doctest::Approx(sn_logpdf(y, plain)).epsilon(1e-10));
  }
  // Extended normalization in d = 2.
  SnParams ext(Vector::Zero(2), omega, alpha, 0.8);
  const double mass = testsupport::integrate_plane([&](double u, double v) {
    Vector y(2);
    y << u, v;
    return std::exp(sn_logpdf(y, ext));
  });
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cumulant generating function") {
  Rng rng(11);
  const Matrix omega = random_spd(3, rng);
  Vector alpha(3);
  alpha << 1.0, -2.0, 0.5;
  Vector xi(3);
  xi << 0.2, 0.0, -0.4;
  SnParams p(xi, omega, alpha);
  CHECK(sn_cgf(Vector::Zero(3), p) == 0.0);
  // alpha = 0: the normal quadratic.
  SnParams p0(xi, omega, Vector::Zero(3));
  Vector t(3);
  t << 0.3, -0.1, 0.7;
  CHECK(sn_cgf(t, p0) ==
        doctest::Approx(t.dot(xi) + 0.5 * t.dot(omega * t)).epsilon(1e-13));
  // Gradient at zero is the mean xi + omega delta sqrt(2/pi), checked by
  // finite differences and Monte Carlo.
  Vector grad(3);
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Vector up = Vector::Zero(3), dn = Vector::Zero(3);
    up(k) += h;
    dn(k) -= h;
    grad(k) = (sn_cgf(up, p) - sn_cgf(dn, p)) / (2.0 * h);
  }
  const Vector mean_formula =
      xi + std::sqrt(2.0 / M_PI) * p.omega_diag().cwiseProduct(p.delta());
  CHECK((grad - mean_formula).cwiseAbs().maxCoeff() < 1e-8);
  Vector mc = Vector::Zero(3);
  const int n = 1000000;
  for (int i = 0; i < n; ++i) mc += sn_sample_conditioning(p, rng);
  mc /= n;
  // Component standard errors are below sqrt(omega_jj / n).
  for (int k = 0; k < 3; ++k) {
    const double se = std::sqrt(omega(k, k) / n);
    CHECK(std::fabs(mc(k) - grad(k)) < 4.0 * se);
  }
}

TEST_CASE("three samplers agree") {
  Rng rng(13);
  const Matrix omega = random_spd(3, rng);
  Vector alpha(3);
  alpha << 2.0, -1.0, 0.8;
  Vector xi(3);
  xi << 1.0, 0.0, -2.0;
  SnParams p(xi, omega, alpha);

  // alpha = 0: mean recovers xi.
  SnParams p0(xi, omega, Vector::Zero(3));
  Vector acc = Vector::Zero(3);
  const int n0 = 100000;
  for (int i = 0; i < n0; ++i) acc += sn_sample_conditioning(p0, rng);
  acc /= n0;
  for (int k = 0; k < 3; ++k)
    CHECK(std::fabs(acc(k) - xi(k)) <
          3.0 * std::sqrt(omega(k, k) / n0));

  // Conditioning vs transformation, marginal KS.
  const int n = 20000;
  for (int coord : {0, 2}) {
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = sn_sample_conditioning(p, rng)(coord);
      b[i] = sn_sample_transformation(p, rng)(coord);
    }
    CHECK(testsupport::ks_two_sample_pass(a, b));
  }

  // Scalar max representation vs conditioning.
  SnParams ps(Vector::Constant(1, 0.5), Matrix::Identity(1, 1) * 2.25,
              Vector::Constant(1, 1.0));
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = sn_sample_max(ps, rng);
    b[i] = sn_sample_conditioning(ps, rng)(0);
  }
  CHECK(testsupport::ks_two_sample_pass(a, b));
  // Negative shape too.
  SnParams pneg(Vector::Zero(1), Matrix::Identity(1, 1),
                Vector::Constant(1, -2.0));
  for (int i = 0; i < n; ++i) {
    a[i] = sn_sample_max(pneg, rng);
    b[i] = sn_sample_conditioning(pneg, rng)(0);
  }
  CHECK(testsupport::ks_two_sample_pass(a, b));
}

TEST_CASE("sampler densities by binned goodness of fit") {
  Rng rng(17);
  SnParams p(Vector::Constant(1, -0.3), Matrix::Identity(1, 1) * 1.69,
             Vector::Constant(1, 2.2));
  auto cdf = [&](double x) { return sn_scalar_cdf(x, p); };
  const int n = 100000;
  std::vector<double> draws(n);
  for (auto& v : draws) v = sn_sample_conditioning(p, rng)(0);
  CHECK(testsupport::chi2_gof(draws, cdf).p_value > 0.01);
  for (auto& v : draws) v = sn_sample_transformation(p, rng)(0);
  CHECK(testsupport::chi2_gof(draws, cdf).p_value > 0.01);
  for (auto& v : draws) v = sn_sample_max(p, rng);
  CHECK(testsupport::chi2_gof(draws, cdf).p_value > 0.01);
}

TEST_CASE("chi-square property of the quadratic form") {
  Rng rng(19);
  const Matrix omega = random_spd(3, rng);
  Vector alpha(3);
  alpha << 3.0, 0.5, -1.5;
  Vector xi(3);
  xi << 0.3, -0.2, 1.1;
  SnParams p(xi, omega, alpha);
  Eigen::LLT<Matrix> llt(omega);
  const int n = 100000;
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) {
    const Vector u = sn_sample_conditioning(p, rng) - xi;
    q[i] = u.dot(llt.solve(u));
  }
  CHECK(testsupport::ks_pass(q,
                             [](double x) { return chi_square_cdf(x, 3.0); }));
}

TEST_CASE("latent residual is standard normal and uncorrelated") {
  Rng rng(23);
  const Matrix corr = random_corr(3, rng);
  Vector alpha(3);
  alpha << 1.2, -0.8, 2.0;
  const Vector delta = delta_from_alpha(alpha, corr);
  Matrix star(4, 4);
  star(0, 0) = 1.0;
  star.block(0, 1, 1, 3) = delta.transpose();
  star.block(1, 0, 3, 1) = delta;
  star.block(1, 1, 3, 3) = corr;
  const Matrix chol = Matrix(star.llt().matrixL());
  const double quad = delta.dot(corr.llt().solve(delta));
  const int n = 100000;
  std::vector<double> xt(n);
  Matrix u_draws(n, 3);
  for (int i = 0; i < n; ++i) {
    const Vector g = chol * rng.normal_vector(4);
    const Vector u = g.tail(3);
    xt[i] = -(g(0) - delta.dot(corr.llt().solve(u))) / std::sqrt(1.0 - quad);
    u_draws.row(i) = u.transpose();
  }
  CHECK(testsupport::ks_pass(xt, [](double x) { return normal_cdf(x); }));
  // Sample correlation with each component below 3/sqrt(n).
  Vector xt_vec = Eigen::Map<Vector>(xt.data(), n);
  const double xt_sd = std::sqrt((xt_vec.array() - xt_vec.mean()).square().mean());
  for (int k = 0; k < 3; ++k) {
    const Vector col = u_draws.col(k);
    const double c = ((xt_vec.array() - xt_vec.mean()) *
                      (col.array() - col.mean()))
                         .mean() /
                     (xt_sd * std::sqrt((col.array() - col.mean()).square().mean()));
    CHECK(std::fabs(c) < 3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("affine closure") {
  Rng rng(29);
  const Matrix omega = random_spd(3, rng);
  Vector alpha(3);
  alpha << 1.5, -2.0, 0.3;
  Vector xi(3);
  xi << 0.5, 1.0, -1.0;
  SnParams p(xi, omega, alpha);

  // Identity transform.
  const SnParams same =
      sn_affine(Vector::Zero(3), Matrix::Identity(3, 3), p);
  CHECK((same.xi() - xi).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((same.omega_mat() - omega).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((same.alpha() - alpha).cwiseAbs().maxCoeff() < 1e-10);

  // alpha = 0 stays normal.
  SnParams p0(xi, omega, Vector::Zero(3));
  Matrix a(2, 3);
  a << 1.0, 0.5, -0.2, 0.0, 1.0, 0.7;
  CHECK(sn_affine(Vector::Zero(2), a, p0).alpha().cwiseAbs().maxCoeff() <
        1e-12);

  // Coordinate selection: marginal law matches the transformed sampler.
  Matrix sel = Matrix::Zero(1, 3);
  sel(0, 1) = 1.0;
  const SnParams marg = sn_affine(Vector::Zero(1), sel, p);
  const int n = 20000;
  std::vector<double> a1(n), b1(n);
  for (int i = 0; i < n; ++i) {
    a1[i] = sn_sample_conditioning(p, rng)(1);
    b1[i] = sn_sample_conditioning(marg, rng)(0);
  }
  CHECK(testsupport::ks_two_sample_pass(a1, b1));
  // And pointwise: the scalar CDF equals the tail quadrature of the
  // marginal density.
  CHECK(sn_scalar_cdf(0.7, marg) ==
        doctest::Approx(1.0 - testsupport::integrate_upper_tail(
                                  [&](double t) {
                                    Vector y(1);
                                    y << t;
                                    return std::exp(sn_logpdf(y, marg));
                                  },
                                  0.7))
            .epsilon(1e-9));

  CHECK_THROWS_AS(sn_affine(Vector::Zero(2), Matrix::Ones(2, 3), p),
                  std::domain_error);
}

TEST_CASE("scalar distribution function") {
  SnParams p0(Vector::Zero(1), Matrix::Identity(1, 1), Vector::Zero(1));
  for (double x : {-1.0, 0.0, 2.0})
    CHECK(sn_scalar_cdf(x, p0) == doctest::Approx(normal_cdf(x)).epsilon(1e-14));

  SnParams p1(Vector::Zero(1), Matrix::Identity(1, 1),
              Vector::Constant(1, 1.0));
  CHECK(sn_scalar_cdf(0.0, p1) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(sn_scalar_cdf(40.0, p1) == doctest::Approx(1.0).epsilon(1e-12));

  SnParams p2(Vector::Zero(1), Matrix::Identity(1, 1),
              Vector::Constant(1, 2.0));
  const double oracle = 1.0 - testsupport::integrate_upper_tail(
                                  [&](double t) {
                                    Vector y(1);
                                    y << t;
                                    return std::exp(sn_logpdf(y, p2));
                                  },
                                  0.7);
  CHECK(std::fabs(sn_scalar_cdf(0.7, p2) - oracle) < 1e-9);
  CHECK(sn_scalar_cdf(0.7, p2) ==
        doctest::Approx(0.52581829436463266).epsilon(1e-12));
}

TEST_CASE("transformation Psi is a correlation matrix") {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix corr = random_corr(3, rng);
    Vector alpha(3);
    for (int i = 0; i < 3; ++i) alpha(i) = rng.uniform(-3.0, 3.0);
    SnParams p(Vector::Zero(3), corr, alpha);
    const Matrix psi = sn_transformation_psi(p);
    CHECK((psi.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(psi.llt().info() == Eigen::Success);
  }
}

TEST_CASE("extended sampler mean matches the zeta formula") {
  Rng rng(37);
  const double tau = 0.6;
  SnParams p(Vector::Zero(1), Matrix::Identity(1, 1) * 4.0,
             Vector::Constant(1, 2.0), tau);
  const int n = 200000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = sn_sample_conditioning(p, rng)(0);
    acc += z;
    acc2 += z * z;
  }
  const double mean = acc / n;
  const double se = std::sqrt((acc2 / n - mean * mean) / n);
  const double expected = zeta1(tau) * p.omega_diag()(0) * p.delta()(0);
  CHECK(std::fabs(mean - expected) < 3.0 * se);
}
