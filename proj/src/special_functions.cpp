#include "skewt/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewt/quadrature.hpp"

namespace skewt {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617639;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 2000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) return h;
  }
  throw NumericError("incomplete_beta: continued fraction did not converge", h);
}

// Series for P(a, x), x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  throw NumericError("gamma_p: series did not converge", sum);
}

// Continued fraction for Q(a, x), x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  throw NumericError("gamma_p: continued fraction did not converge", h);
}

// T(h, a) for h >= 0, 0 < a <= 1 by Gauss-Legendre quadrature of the
// defining integral; the integrand is analytic on [0, a].
double owen_t_core(double h, double a) {
  if (a <= 0) return 0.0;
  if (h < 1e-13) return std::atan(a) / (2.0 * kPi);
  const double hh = -0.5 * h * h;
  const auto& gl = gauss_legendre(48);
  return gl.integrate(
             [hh](double x) {
               const double x2 = x * x;
               return std::exp(hh * (1.0 + x2)) / (1.0 + x2);
             },
             0.0, a) /
         (2.0 * kPi);
}

}  // namespace

double log_gamma(double x) {
  require(std::isfinite(x) && x > 0, "log_gamma: requires finite x > 0");
  return std::lgamma(x);
}

double digamma(double x) {
  require(std::isfinite(x) && x > 0, "digamma: requires finite x > 0");
  double result = 0.0;
  // Shift to x >= 10, then the asymptotic expansion.
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 - inv2 / 132.0))));
  return result;
}

double incomplete_beta(double a, double b, double x) {
  require(a > 0 && b > 0, "incomplete_beta: requires a > 0 and b > 0");
  require(x >= 0.0 && x <= 1.0, "incomplete_beta: requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(log_gamma(a + b) - log_gamma(a) -
                                log_gamma(b) + a * std::log(x) +
                                b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                        a * std::log(x) + b * std::log1p(-x)) *
                   beta_cf(b, a, 1.0 - x) / b;
}

double gamma_p(double a, double x) {
  require(a > 0, "gamma_p: requires a > 0");
  require(x >= 0, "gamma_p: requires x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double student_t_pdf(double x, double df) {
  require(df > 0, "student_t_pdf: requires df > 0");
  const double lc = log_gamma(0.5 * (df + 1.0)) - log_gamma(0.5 * df) -
                    0.5 * std::log(df * kPi);
  return std::exp(lc - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double student_t_cdf(double x, double df) {
  require(df > 0, "student_t_cdf: requires df > 0");
  if (x == 0.0) return 0.5;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
  return x > 0 ? 1.0 - tail : tail;
}

double log_student_t_cdf(double x, double df) {
  const double p = student_t_cdf(x, df);
  if (p > 1e-280) return std::log(p);
  // Tail expansion: T1(x; m) ~ c m^{(m+1)/2} |x|^{-m} / m for x -> -inf.
  const double m = df, u = -x;
  const double lc = log_gamma(0.5 * (m + 1.0)) - log_gamma(0.5 * m) -
                    0.5 * std::log(m * kPi);
  const double corr = -m * m * (m + 1.0) / (2.0 * (m + 2.0) * u * u);
  return lc + 0.5 * (m + 1.0) * std::log(m) - m * std::log(u) - std::log(m) +
         std::log1p(corr);
}

double noncentral_t_cdf(double x, double df, double ncp,
                        const Precision& prec) {
  require(df > 0, "noncentral_t_cdf: requires df > 0");
  if (ncp == 0.0) return student_t_cdf(x, df);
  if (x < 0.0) return 1.0 - noncentral_t_cdf(-x, df, -ncp, prec);

  const double base = normal_cdf(-ncp);
  if (x == 0.0) return base;

  const double y = x * x / (x * x + df);
  const double lam = 0.5 * ncp * ncp;
  const double llam = std::log(lam);
  const long j0 = std::max(0L, static_cast<long>(lam));
  const double half_b = 0.5 * df;

  auto term = [&](long j, double pj, double qj) {
    return 0.5 * (pj * incomplete_beta(j + 0.5, half_b, y) +
                  qj * incomplete_beta(j + 1.0, half_b, y));
  };

  // Weights at the modal index; Poisson-type recurrences outward.
  const double lp0 = -lam + j0 * llam - log_gamma(j0 + 1.0);
  double p_up = std::exp(lp0);
  double q_up = ncp / kSqrt2 * std::exp(-lam + j0 * llam - log_gamma(j0 + 1.5));

  double acc = 0.0;
  const double tol = prec.abs_tol;
  bool converged_up = false;
  double pj = p_up, qj = q_up;
  long j = j0;
  int small_count = 0;
  for (int it = 0; it < prec.max_iter; ++it, ++j) {
    const double t = term(j, pj, qj);
    acc += t;
    if (pj + std::fabs(qj) < tol * (std::fabs(acc) + base)) {
      if (++small_count >= 2) {
        converged_up = true;
        break;
      }
    } else {
      small_count = 0;
    }
    pj *= lam / (j + 1.0);
    qj *= lam / (j + 1.5);
  }
  bool converged_down = true;
  if (j0 > 0) {
    converged_down = false;
    pj = p_up * j0 / lam;
    qj = q_up * (j0 + 0.5) / lam;
    small_count = 0;
    j = j0 - 1;
    for (int it = 0; it < prec.max_iter; ++it, --j) {
      const double t = term(j, pj, qj);
      acc += t;
      if (j == 0 || pj + std::fabs(qj) < tol * (std::fabs(acc) + base)) {
        if (j == 0 || ++small_count >= 2) {
          converged_down = true;
          break;
        }
      } else {
        small_count = 0;
      }
      if (j > 0) {
        pj *= j / lam;
        qj *= (j + 0.5) / lam;
      }
    }
  }
  const double result = std::clamp(base + acc, 0.0, 1.0);
  if (!converged_up || !converged_down)
    throw NumericError("noncentral_t_cdf: series did not converge", result);
  return result;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_normal_cdf(double x) { return zeta0(x) - 0.6931471805599453; }

double owen_t(double h, double a) {
  if (a == 0.0 || std::fabs(h) == std::numeric_limits<double>::infinity())
    return 0.0;
  const double sign_a = a > 0 ? 1.0 : -1.0;
  h = std::fabs(h);
  a = std::fabs(a);
  double t;
  if (a <= 1.0) {
    t = owen_t_core(h, a);
  } else {
    // T(h, a) = Phi(h)/2 + Phi(ah)/2 - Phi(h) Phi(ah) - T(ah, 1/a), a > 0.
    const double ph = normal_cdf(h), pah = normal_cdf(a * h);
    t = 0.5 * (ph + pah) - ph * pah - owen_t_core(a * h, 1.0 / a);
  }
  return sign_a * t;
}

double f_cdf(double x, double df1, double df2) {
  require(df1 > 0 && df2 > 0, "f_cdf: requires positive degrees of freedom");
  if (x <= 0.0) return 0.0;
  return incomplete_beta(0.5 * df1, 0.5 * df2, df1 * x / (df1 * x + df2));
}

double chi_square_cdf(double x, double df) {
  require(df > 0, "chi_square_cdf: requires df > 0");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * df, 0.5 * x);
}

double zeta0(double x) {
  if (x > -25.0) return std::log(2.0 * normal_cdf(x));
  // log Phi(x) = -x^2/2 - log(sqrt(2 pi) |x|) + log(Mills series).
  const double ix2 = 1.0 / (x * x);
  const double series =
      1.0 - ix2 * (1.0 - ix2 * (3.0 - ix2 * (15.0 - 105.0 * ix2)));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series) +
         0.6931471805599453;
}

double zeta1(double x) {
  if (x > -25.0) return normal_pdf(x) / normal_cdf(x);
  const double ix2 = 1.0 / (x * x);
  const double series =
      1.0 - ix2 * (1.0 - ix2 * (3.0 - ix2 * (15.0 - 105.0 * ix2)));
  return -x / series;
}

double zeta2(double x) {
  const double z1 = zeta1(x);
  return -z1 * (x + z1);
}

}  // namespace skewt
