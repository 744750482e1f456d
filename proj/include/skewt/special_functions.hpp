#pragma once

#include "skewt/common.hpp"

namespace skewt {

double log_gamma(double x);
double digamma(double x);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

double student_t_pdf(double x, double df);
double student_t_cdf(double x, double df);
// log T1(x; df), with an asymptotic tail expansion when the CDF underflows.
double log_student_t_cdf(double x, double df);

// CDF of the noncentral t distribution, by a Poisson-weighted incomplete-beta
// series summed outward from the modal term.
double noncentral_t_cdf(double x, double df, double ncp,
                        const Precision& prec = {});

double normal_pdf(double x);
double normal_cdf(double x);
double log_normal_cdf(double x);

// Owen's T function T(h, a).
double owen_t(double h, double a);

double f_cdf(double x, double df1, double df2);
double chi_square_cdf(double x, double df);

// zeta0(x) = log(2 Phi(x)) and its first two derivatives; stable for large
// negative x via the Mills-ratio expansion.
double zeta0(double x);
double zeta1(double x);
double zeta2(double x);

}  // namespace skewt
