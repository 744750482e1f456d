#include <doctest.h>

#include <cmath>

#include "skewt/perturbation.hpp"
#include "skewt/skew_normal.hpp"
#include "skewt/special_functions.hpp"
#include "support/test_stats.hpp"

using namespace skewt;

namespace {

PerturbationSpec gaussian_spec(int d, std::function<double(const Vector&)> w) {
  PerturbationSpec spec;
  spec.dim = d;
  spec.base_logpdf = [d](const Vector& y) {
    return -0.5 * (d * std::log(2.0 * M_PI) + y.squaredNorm());
  };
  spec.base_sampler = [d](Rng& rng) { return rng.normal_vector(d); };
  spec.skew_cdf = [](double x) { return normal_cdf(x); };
  spec.skew_sampler = [](Rng& rng) { return rng.normal(); };
  spec.odd_fn = std::move(w);
  return spec;
}

}  // namespace

TEST_CASE("perturbed_logpdf null perturbation and center") {
  auto spec = gaussian_spec(2, [](const Vector&) { return 0.0; });
  Rng rng(5);
  check_symmetry(spec, rng);
  Vector y(2);
  y << 0.7, -1.1;
  CHECK(perturbed_logpdf(y, spec) ==
        doctest::Approx(spec.base_logpdf(y)).epsilon(1e-14));
  // w(0) = 0 for any odd w, so the center always evaluates to f(0).
  auto skewed = gaussian_spec(
      2, [](const Vector& v) { return 1.4 * v(0) - 0.3 * v(1); });
  CHECK(perturbed_logpdf(Vector::Zero(2), skewed) ==
        doctest::Approx(skewed.base_logpdf(Vector::Zero(2))).epsilon(1e-14));
}

TEST_CASE("perturbed density matches the skew normal density in 1-D") {
  const double alpha = 1.8;
  auto spec = gaussian_spec(1, [alpha](const Vector& v) { return alpha * v(0); });
  SnParams sn(Vector::Zero(1), Matrix::Identity(1, 1),
              Vector::Constant(1, alpha));
  Vector y(1);
  for (double x : {-3.0, -0.4, 0.0, 0.9, 2.6}) {
    y(0) = x;
    CHECK(perturbed_logpdf(y, spec) ==
          doctest::Approx(sn_logpdf(y, sn)).epsilon(1e-12));
  }
}

TEST_CASE("check_symmetry verdicts") {
  Rng rng(17);
  auto good = gaussian_spec(3, [](const Vector& v) {
    return 0.5 * v(0) - v(1) + 2.0 * v(2);
  });
  CHECK(check_symmetry(good, rng).pass);

  auto bad = gaussian_spec(3, [](const Vector& v) {
    return 0.5 * v(0) - v(1) + 2.0 * v(2) + 1.0;
  });
  const auto report = check_symmetry(bad, rng);
  CHECK_FALSE(report.pass);
  CHECK(report.max_odd_violation == doctest::Approx(2.0));
  CHECK_THROWS_AS(perturbed_logpdf(Vector::Zero(3), bad), std::domain_error);

  // The trigonometric demonstration perturbation is odd.
  auto demo = beta_demo_spec({2.0, 3.0, 4.0, 2.0, 1.0, 1.0});
  CHECK(check_symmetry(demo, rng, 64, 1e-10).pass);
}

TEST_CASE("sign-flip sampler matches the base for a null perturbation") {
  auto spec = gaussian_spec(1, [](const Vector&) { return 0.0; });
  Rng rng(23);
  std::vector<double> z(20000), y(20000);
  for (auto& v : z) v = perturbed_sample(spec, rng)(0);
  for (auto& v : y) v = spec.base_sampler(rng)(0);
  CHECK(testsupport::ks_two_sample_pass(z, y));
}

TEST_CASE("even statistics are invariant under perturbation") {
  // t(Z) = ||Z|| and Z'BZ have the base law for any valid spec.
  auto spec = gaussian_spec(2, [](const Vector& v) {
    return std::sin(2.0 * v(0)) + v(1) * v(1) * v(1);
  });
  Rng rng(29);
  CHECK(check_symmetry(spec, rng).pass);
  Matrix b(2, 2);
  b << 2.0, 0.4, 0.4, 1.0;
  const int n = 50000;
  std::vector<double> norm_z(n), norm_y(n), quad_z(n), quad_y(n);
  for (int i = 0; i < n; ++i) {
    const Vector z = perturbed_sample(spec, rng);
    const Vector y = spec.base_sampler(rng);
    norm_z[i] = z.norm();
    norm_y[i] = y.norm();
    quad_z[i] = z.dot(b * z);
    quad_y[i] = y.dot(b * y);
  }
  CHECK(testsupport::ks_two_sample_pass(norm_z, norm_y));
  CHECK(testsupport::ks_two_sample_pass(quad_z, quad_y));
}

TEST_CASE("sampler and density agree for a skewed spec") {
  const double alpha = 2.5;
  auto spec = gaussian_spec(1, [alpha](const Vector& v) { return alpha * v(0); });
  Rng rng(31);
  std::vector<double> draws(100000);
  for (auto& v : draws) v = perturbed_sample(spec, rng)(0);
  // Compare against the known scalar skew normal CDF.
  SnParams sn(Vector::Zero(1), Matrix::Identity(1, 1),
              Vector::Constant(1, alpha));
  const auto gof = testsupport::chi2_gof(
      draws, [&](double x) { return sn_scalar_cdf(x, sn); }, 32);
  CHECK(gof.p_value > 0.01);
}

TEST_CASE("inverse-CDF fallback draws X from G") {
  // Remove the dedicated sampler; the sign-flip output must be unchanged in
  // distribution.
  const double alpha = -1.2;
  auto spec = gaussian_spec(1, [alpha](const Vector& v) { return alpha * v(0); });
  spec.skew_sampler = nullptr;
  Rng rng(37);
  std::vector<double> draws(20000);
  for (auto& v : draws) v = perturbed_sample(spec, rng)(0);
  SnParams sn(Vector::Zero(1), Matrix::Identity(1, 1),
              Vector::Constant(1, alpha));
  CHECK(testsupport::ks_pass(draws,
                             [&](double x) { return sn_scalar_cdf(x, sn); }));
}

TEST_CASE("beta demo density") {
  Vector y(2);
  // Null perturbation reduces to the symmetric Beta product.
  BetaDemoParams sym{2.0, 3.0, 0.0, 0.0, 0.0, 0.0};
  const double log_b = [](double s) {
    return log_gamma(s) + log_gamma(s) - log_gamma(2.0 * s);
  }(2.0);
  y << 0.3, -0.5;
  const double expected = (2.0 - 1.0) * std::log1p(-0.09) +
                          (3.0 - 1.0) * std::log1p(-0.25) -
                          (2.0 + 3.0 - 1.0) * std::log(4.0) - log_b -
                          (log_gamma(3.0) + log_gamma(3.0) - log_gamma(6.0));
  CHECK(beta_demo_logpdf(y, sym) == doctest::Approx(expected).epsilon(1e-13));

  // Uniform case.
  BetaDemoParams unif{1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(beta_demo_logpdf(y, unif) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-14));
  y << 1.2, 0.0;
  CHECK(beta_demo_logpdf(y, unif) ==
        -std::numeric_limits<double>::infinity());

  // Normalization for assorted parameter sets.
  for (BetaDemoParams params :
       {BetaDemoParams{2.0, 3.0, 4.0, 2.0, 1.0, 1.0},
        BetaDemoParams{0.8, 0.8, 5.0, 1.0, 0.5, 2.0},
        BetaDemoParams{3.0, 5.0, 1.0, 1.0, 4.0, 3.0}}) {
    const double mass = testsupport::integrate_finite(
        [&](double u) {
          return testsupport::integrate_finite(
              [&](double v) {
                Vector p(2);
                p << u, v;
                const double lp = beta_demo_logpdf(p, params);
                return std::isfinite(lp) ? std::exp(lp) : 0.0;
              },
              -1.0, 1.0, 0.01);
        },
        -1.0, 1.0, 0.01);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("beta demo sampler agrees with its density") {
  auto spec = beta_demo_spec({2.0, 2.0, -3.0, 5.0, 2.0, 0.5});
  Rng rng(41);
  CHECK(check_symmetry(spec, rng).pass);
  const int n = 50000;
  std::vector<double> first(n);
  for (auto& v : first) v = perturbed_sample(spec, rng)(0);
  // Marginal CDF of the first coordinate by 1-D quadrature of the density.
  auto marginal_cdf = [&](double x) {
    return testsupport::integrate_finite(
        [&](double u) {
          return testsupport::integrate_finite(
              [&](double v) {
                Vector p(2);
                p << u, v;
                const double lp = perturbed_logpdf(p, spec);
                return std::isfinite(lp) ? std::exp(lp) : 0.0;
              },
              -1.0, 1.0, 0.02);
        },
        -1.0, x, 0.02);
  };
  // Coarse but unbiased: KS against the quadrature CDF on a grid via
  // interpolation.
  std::vector<double> grid, cdf_vals;
  for (double x = -1.0; x <= 1.0 + 1e-9; x += 0.05) {
    grid.push_back(x);
    cdf_vals.push_back(marginal_cdf(x));
  }
  auto interp = [&](double x) {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const size_t k = it - grid.begin();
    const double t = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
    return cdf_vals[k - 1] + t * (cdf_vals[k] - cdf_vals[k - 1]);
  };
  // The interpolation error dominates; use a loose band.
  const double d = testsupport::ks_statistic(first, interp);
  CHECK(d < 0.02);
}
