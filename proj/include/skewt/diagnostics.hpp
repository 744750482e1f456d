#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "skewt/fit.hpp"

namespace skewt {

enum class HealyFamily { NormalFit, SkewTFit };

// Plotting positions: Hazen uses (i - 1/2)/n, Healy uses i/n.
enum class PlottingPosition { Hazen, Healy };

struct HealySeries {
  std::vector<double> nominal;
  std::vector<double> observed;  // sorted model CDF values
  HealyFamily family = HealyFamily::SkewTFit;
};

// Skew t reference: p_i = F_{d,nu}(Q_i / d) with per-observation location
// beta' x_i.
HealySeries healy_points(const Matrix& beta, const Matrix& omega, double nu,
                         const Dataset& data,
                         PlottingPosition pos = PlottingPosition::Hazen);
HealySeries healy_points(const FitResult& fit, const Dataset& data,
                         PlottingPosition pos = PlottingPosition::Hazen);

// Gaussian reference with its own maximum likelihood parameters:
// p_i = chi^2_d CDF of the Mahalanobis statistic.
HealySeries healy_points_normal(const Dataset& data,
                                PlottingPosition pos = PlottingPosition::Hazen);

Matrix residuals(const Matrix& beta, const Dataset& data);
Matrix residuals(const FitResult& fit, const Dataset& data);

// Fitted error density on a grid (d = 1): location zero with the fitted
// (omega, alpha, nu).
std::vector<std::pair<double, double>> density_curve(const FitResult& fit,
                                                     const Vector& grid);

// Mean of the fitted error distribution (d = 1), the adjustment that turns
// the fitted intercept into the fitted line level.
double fitted_error_mean(const FitResult& fit);

void write_healy_csv(const HealySeries& series, std::ostream& out);
void write_healy_svg(const HealySeries& series, std::ostream& out);

}  // namespace skewt
