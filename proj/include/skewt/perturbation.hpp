#pragma once

#include <functional>
#include <optional>

#include "skewt/common.hpp"
#include "skewt/rng.hpp"

namespace skewt {

// Components of a perturbed density 2 f(y) G{w(y)}: a centrally symmetric
// base density f, a symmetric scalar CDF G, and an odd function w.
struct PerturbationSpec {
  int dim = 1;
  std::function<double(const Vector&)> base_logpdf;
  std::function<Vector(Rng&)> base_sampler;
  std::function<double(double)> skew_cdf;                  // G
  std::function<double(const Vector&)> odd_fn;             // w
  std::function<double(Rng&)> skew_sampler;                // optional X ~ G

  enum class SymmetryStatus { Unchecked, Pass, Fail };
  SymmetryStatus symmetry = SymmetryStatus::Unchecked;
};

struct SymmetryReport {
  double max_odd_violation = 0.0;      // |w(-y) + w(y)|
  double max_cdf_violation = 0.0;      // |G(-x) + G(x) - 1|
  double max_density_violation = 0.0;  // |f(y) - f(-y)|
  bool pass = false;
};

double perturbed_logpdf(const Vector& y, const PerturbationSpec& spec);

// Exact draw by the sign-flip construction: Z = Y if X < w(Y), else -Y.
// Consumes exactly one base draw and one X draw.
Vector perturbed_sample(const PerturbationSpec& spec, Rng& rng);

// Probes the symmetry hypotheses at random points and records the outcome
// on the spec; a recorded failure makes perturbed_logpdf throw.
SymmetryReport check_symmetry(PerturbationSpec& spec, Rng& rng,
                              int probes = 64, double tol = 1e-10);

// Product of two symmetric Beta densities rescaled to (-1, 1), perturbed by
// a logistic CDF of a trigonometric odd function.
struct BetaDemoParams {
  double a = 1.0, b = 1.0;
  double p1 = 0.0, p2 = 0.0, q1 = 0.0, q2 = 0.0;
};

double beta_demo_logpdf(const Vector& y, const BetaDemoParams& params);

PerturbationSpec beta_demo_spec(const BetaDemoParams& params);

}  // namespace skewt
