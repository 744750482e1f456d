#include "skewt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "skewt/special_functions.hpp"

namespace skewt {
namespace {

std::vector<double> nominal_positions(int n, PlottingPosition pos) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = pos == PlottingPosition::Hazen ? (i + 0.5) / n
                                            : static_cast<double>(i + 1) / n;
  return out;
}

HealySeries make_series(std::vector<double> probs, HealyFamily family,
                        PlottingPosition pos) {
  require(!probs.empty(), "healy_points: requires at least one observation");
  std::sort(probs.begin(), probs.end());
  HealySeries series;
  series.nominal = nominal_positions(static_cast<int>(probs.size()), pos);
  series.observed = std::move(probs);
  series.family = family;
  return series;
}

}  // namespace

HealySeries healy_points(const Matrix& beta, const Matrix& omega, double nu,
                         const Dataset& data, PlottingPosition pos) {
  const int n = data.n(), d = data.d();
  require(nu > 0, "healy_points: requires nu > 0");
  Eigen::LLT<Matrix> llt(omega);
  require(llt.info() == Eigen::Success,
          "healy_points: Omega is not positive definite");
  const Matrix resid = data.y - data.x * beta;
  std::vector<double> probs(n);
  for (int i = 0; i < n; ++i) {
    const Vector u = resid.row(i).transpose();
    const double q = u.dot(llt.solve(u));
    probs[i] = f_cdf(q / d, d, nu);
  }
  return make_series(std::move(probs), HealyFamily::SkewTFit, pos);
}

HealySeries healy_points(const FitResult& fit, const Dataset& data,
                         PlottingPosition pos) {
  return healy_points(fit.theta.beta, fit.theta.omega(), fit.theta.nu(),
                      data, pos);
}

HealySeries healy_points_normal(const Dataset& data, PlottingPosition pos) {
  const int n = data.n(), d = data.d();
  // Gaussian MLE: least squares coefficients, residual covariance over n.
  const Matrix beta = data.x.colPivHouseholderQr().solve(data.y);
  const Matrix resid = data.y - data.x * beta;
  const Matrix sigma = resid.transpose() * resid / n;
  Eigen::LLT<Matrix> llt(sigma);
  require(llt.info() == Eigen::Success,
          "healy_points_normal: residual covariance is singular");
  std::vector<double> probs(n);
  for (int i = 0; i < n; ++i) {
    const Vector u = resid.row(i).transpose();
    probs[i] = chi_square_cdf(u.dot(llt.solve(u)), d);
  }
  return make_series(std::move(probs), HealyFamily::NormalFit, pos);
}

Matrix residuals(const Matrix& beta, const Dataset& data) {
  return data.y - data.x * beta;
}

Matrix residuals(const FitResult& fit, const Dataset& data) {
  return residuals(fit.theta.beta, data);
}

std::vector<std::pair<double, double>> density_curve(const FitResult& fit,
                                                     const Vector& grid) {
  require(fit.theta.d() == 1, "density_curve: requires d = 1");
  const StParams params = fit.theta.error_params();
  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.size());
  Vector y(1);
  for (int i = 0; i < grid.size(); ++i) {
    y(0) = grid(i);
    curve.emplace_back(grid(i), std::exp(st_logpdf(y, params)));
  }
  return curve;
}

double fitted_error_mean(const FitResult& fit) {
  require(fit.theta.d() == 1, "fitted_error_mean: requires d = 1");
  return st_mean(fit.theta.error_params())(0);
}

void write_healy_csv(const HealySeries& series, std::ostream& out) {
  out << "nominal,observed\n";
  char buf[64];
  for (size_t i = 0; i < series.nominal.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", series.nominal[i],
                  series.observed[i]);
    out << buf;
  }
}

void write_healy_svg(const HealySeries& series, std::ostream& out) {
  const int size = 480, margin = 40;
  const double span = size - 2 * margin;
  auto sx = [&](double u) { return margin + u * span; };
  auto sy = [&](double u) { return size - margin - u * span; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1)
      << "\" y2=\"" << sy(1) << "\" stroke=\"gray\"/>\n";
  for (size_t i = 0; i < series.nominal.size(); ++i)
    out << "<circle cx=\"" << sx(series.nominal[i]) << "\" cy=\""
        << sy(series.observed[i]) << "\" r=\"2\" fill=\"black\"/>\n";
  out << "</svg>\n";
}

}  // namespace skewt
