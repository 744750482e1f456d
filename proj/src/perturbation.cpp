#include "skewt/perturbation.hpp"

#include <cmath>
#include <limits>

#include "skewt/special_functions.hpp"

namespace skewt {
namespace {

// Inverse of a scalar CDF by bracket expansion and bisection.
double invert_cdf(const std::function<double(double)>& cdf, double u) {
  double lo = -1.0, hi = 1.0;
  while (cdf(lo) > u) lo *= 2.0;
  while (cdf(hi) < u) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + std::fabs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double perturbed_logpdf(const Vector& y, const PerturbationSpec& spec) {
  require(y.size() == spec.dim, "perturbed_logpdf: dimension mismatch");
  require(spec.symmetry != PerturbationSpec::SymmetryStatus::Fail,
          "perturbed_logpdf: spec failed the symmetry check");
  const double g = spec.skew_cdf(spec.odd_fn(y));
  if (g <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(2.0) + spec.base_logpdf(y) + std::log(g);
}

Vector perturbed_sample(const PerturbationSpec& spec, Rng& rng) {
  const Vector y = spec.base_sampler(rng);
  const double x = spec.skew_sampler ? spec.skew_sampler(rng)
                                     : invert_cdf(spec.skew_cdf, rng.uniform());
  return x < spec.odd_fn(y) ? y : Vector(-y);
}

SymmetryReport check_symmetry(PerturbationSpec& spec, Rng& rng, int probes,
                              double tol) {
  SymmetryReport report;
  for (int i = 0; i < probes; ++i) {
    const Vector y = spec.base_sampler(rng);
    report.max_odd_violation = std::max(
        report.max_odd_violation, std::fabs(spec.odd_fn(-y) + spec.odd_fn(y)));
    report.max_density_violation =
        std::max(report.max_density_violation,
                 std::fabs(std::exp(spec.base_logpdf(y)) -
                           std::exp(spec.base_logpdf(-y))));
    const double x = 2.0 * rng.normal();
    report.max_cdf_violation =
        std::max(report.max_cdf_violation,
                 std::fabs(spec.skew_cdf(-x) + spec.skew_cdf(x) - 1.0));
  }
  // w(0) = 0 is implied by oddness; probe it directly.
  report.max_odd_violation =
      std::max(report.max_odd_violation,
               2.0 * std::fabs(spec.odd_fn(Vector::Zero(spec.dim))));
  report.pass = report.max_odd_violation <= tol &&
                report.max_cdf_violation <= tol &&
                report.max_density_violation <= tol;
  spec.symmetry = report.pass ? PerturbationSpec::SymmetryStatus::Pass
                              : PerturbationSpec::SymmetryStatus::Fail;
  return report;
}

double beta_demo_logpdf(const Vector& y, const BetaDemoParams& params) {
  require(y.size() == 2, "beta_demo_logpdf: requires a 2-vector");
  require(params.a > 0 && params.b > 0,
          "beta_demo_logpdf: requires a > 0 and b > 0");
  if (std::fabs(y(0)) >= 1.0 || std::fabs(y(1)) >= 1.0)
    return -std::numeric_limits<double>::infinity();
  const double a = params.a, b = params.b;
  const double log_beta_aa = log_gamma(a) + log_gamma(a) - log_gamma(2.0 * a);
  const double log_beta_bb = log_gamma(b) + log_gamma(b) - log_gamma(2.0 * b);
  const double log_base = (a - 1.0) * std::log1p(-y(0) * y(0)) +
                          (b - 1.0) * std::log1p(-y(1) * y(1)) -
                          (a + b - 1.0) * std::log(4.0) - log_beta_aa -
                          log_beta_bb;
  const double w = std::sin(params.p1 * y(0) + params.p2 * y(1)) /
                   (1.0 + std::cos(params.q1 * y(0) + params.q2 * y(1)));
  // log G(w) with logistic G, stable for large |w|.
  const double log_g =
      w >= 0.0 ? -std::log1p(std::exp(-w)) : w - std::log1p(std::exp(w));
  return log_base + std::log(2.0) + log_g;
}

PerturbationSpec beta_demo_spec(const BetaDemoParams& params) {
  PerturbationSpec spec;
  spec.dim = 2;
  const BetaDemoParams base_only{params.a, params.b, 0, 0, 0, 0};
  spec.base_logpdf = [base_only](const Vector& y) {
    return beta_demo_logpdf(y, base_only);
  };
  spec.base_sampler = [a = params.a, b = params.b](Rng& rng) {
    Vector y(2);
    y(0) = 2.0 * rng.beta(a, a) - 1.0;
    y(1) = 2.0 * rng.beta(b, b) - 1.0;
    return y;
  };
  spec.skew_cdf = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  spec.odd_fn = [params](const Vector& y) {
    return std::sin(params.p1 * y(0) + params.p2 * y(1)) /
           (1.0 + std::cos(params.q1 * y(0) + params.q2 * y(1)));
  };
  spec.skew_sampler = [](Rng& rng) {
    const double u = rng.uniform();
    return std::log(u / (1.0 - u));
  };
  return spec;
}

}  // namespace skewt
