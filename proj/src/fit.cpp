#include "skewt/fit.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "skewt/special_functions.hpp"

namespace skewt {
namespace {

constexpr double kLogPi = 1.14472988584940017414342735135305871;
constexpr double kInf = std::numeric_limits<double>::infinity();

double pairwise_sum(const double* v, int n) {
  if (n <= 8) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const int half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

void parallel_for(int n, int threads,
                  const std::function<void(int, int)>& fn) {
  if (threads <= 1 || n < 64) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

double log_t_pdf(double x, double df) {
  return log_gamma(0.5 * (df + 1.0)) - log_gamma(0.5 * df) -
         0.5 * std::log(df * M_PI) -
         0.5 * (df + 1.0) * std::log1p(x * x / df);
}

// Per-observation pieces shared by the log-likelihood and its gradient.
struct ObsTerms {
  Vector li;   // log-likelihood contributions
  Vector c;    // dlog g/dQ + T1 ratio * dt/dQ
  Vector e;    // T1 ratio * dt/dL
  double gnu_sum = 0.0;
};

ObsTerms per_observation(const ThetaParam& theta, const Dataset& data,
                         const Matrix& u_all, bool want_grad, int threads) {
  const int n = data.n(), d = data.d();
  const double nu = theta.nu();
  const Matrix a_mat = theta.a_matrix();
  const Vector d_diag = (-2.0 * theta.rho.array()).exp();
  const double log_det_d = -2.0 * theta.rho.sum();

  const double m = nu + d;
  const double lg_const = log_gamma(0.5 * m) - log_gamma(0.5 * nu) -
                          0.5 * d * (kLogPi + std::log(nu));
  const double dig = want_grad ? digamma(0.5 * m) - digamma(0.5 * nu) : 0.0;
  const double h_nu = 1e-4 * std::max(1.0, nu);

  ObsTerms terms;
  terms.li.resize(n);
  Vector gnu;
  if (want_grad) {
    terms.c.resize(n);
    terms.e.resize(n);
    gnu.resize(n);
  }

  std::atomic<int> bad_index{-1};
  parallel_for(n, threads, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const Vector u = u_all.row(i).transpose();
      const Vector w = a_mat * u;
      const double q = w.dot(d_diag.cwiseProduct(w));
      const double big_l = theta.eta.dot(u);
      const double s = std::sqrt(m / (q + nu));
      const double t = big_l * s;
      const double log_g = lg_const - 0.5 * m * std::log1p(q / nu);
      const double log_t1 = log_student_t_cdf(t, m);
      const double li = std::log(2.0) + 0.5 * log_det_d + log_g + log_t1;
      terms.li(i) = li;
      if (!std::isfinite(li)) {
        bad_index.store(i);
        return;
      }
      if (!want_grad) continue;

      const double g_q = -m / (2.0 * (nu + q));
      const double t1_ratio = std::exp(log_t_pdf(t, m) - log_t1);
      const double t_dot_q = -t / (2.0 * (q + nu));
      terms.c(i) = g_q + t1_ratio * t_dot_q;
      terms.e(i) = t1_ratio * s;

      const double g_dnu = 0.5 * (dig - d / nu - std::log1p(q / nu) +
                                  m * q / (nu * (nu + q)));
      // dlog T1/dnu at fixed (L, Q) is intractable; central differences.
      auto log_t1_at = [&](double nu2) {
        const double m2 = nu2 + d;
        return log_student_t_cdf(big_l * std::sqrt(m2 / (q + nu2)), m2);
      };
      gnu(i) = g_dnu + (log_t1_at(nu + h_nu) - log_t1_at(nu - h_nu)) /
                           (2.0 * h_nu);
    }
  });
  const int bad = bad_index.load();
  if (bad >= 0)
    throw NumericError("loglik: non-finite contribution at observation " +
                           std::to_string(bad),
                       0.0);
  if (want_grad) terms.gnu_sum = pairwise_sum(gnu.data(), n);
  return terms;
}

double chi_square_quantile(double p, double df) {
  double lo = 0.0, hi = df + 10.0;
  while (chi_square_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- box-constrained BFGS on one bounded coordinate ----

struct OptimResult {
  Vector x;
  double value = -kInf;
  Vector grad;
  int iterations = 0;
  bool converged = false;
  bool at_lower_bound = false;
};

// fn evaluates the objective; the gradient is filled only when the pointer
// is non-null.
OptimResult bfgs_box_maximize(
    const std::function<double(const Vector&, Vector*)>& fn, Vector x0,
    int bound_index, double lower, double upper, int max_iter,
    double grad_tol) {
  const int n = static_cast<int>(x0.size());
  const double bound_eps = 1e-10;
  auto clamp = [&](Vector x) {
    if (bound_index >= 0)
      x(bound_index) = std::clamp(x(bound_index), lower, upper);
    return x;
  };
  Vector x = clamp(std::move(x0));
  Vector g(n);
  const double f0 = fn(x, &g);
  require(std::isfinite(f0), "fit: objective not finite at the start");
  double f = f0;

  auto projected = [&](const Vector& grad_vec, const Vector& at) {
    Vector pg = grad_vec;
    if (bound_index >= 0) {
      if (at(bound_index) <= lower + bound_eps && pg(bound_index) < 0)
        pg(bound_index) = 0.0;
      if (at(bound_index) >= upper - bound_eps && pg(bound_index) > 0)
        pg(bound_index) = 0.0;
    }
    return pg;
  };

  Matrix h_inv = Matrix::Identity(n, n);
  bool h_is_identity = true;
  OptimResult result;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Vector pg = projected(g, x);
    if (pg.cwiseAbs().maxCoeff() <= grad_tol * std::max(1.0, std::fabs(f))) {
      result.converged = true;
      break;
    }
    Vector p = h_inv * pg;
    if (p.dot(pg) <= 0.0) {
      h_inv = Matrix::Identity(n, n);
      h_is_identity = true;
      p = pg;
    }
    double step = 1.0;
    bool accepted = false;
    Vector x_new, g_new(n);
    double f_new = -kInf;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = clamp(x + step * p);
      double f_try;
      try {
        f_try = fn(x_new, nullptr);
      } catch (const NumericError&) {
        f_try = -kInf;
      }
      if (std::isfinite(f_try) && f_try >= f + 1e-4 * pg.dot(x_new - x)) {
        f_new = fn(x_new, &g_new);
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
    if (!accepted) {
      if (!h_is_identity) {
        h_inv = Matrix::Identity(n, n);
        h_is_identity = true;
        continue;
      }
      break;
    }
    const Vector s = x_new - x;
    const Vector y = g - g_new;  // minimization-form gradient change
    const double ys = y.dot(s);
    if (ys > 1e-12 * s.norm() * y.norm()) {
      const Vector hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv += ((ys + yhy) / (ys * ys)) * (s * s.transpose()) -
               (hy * s.transpose() + s * hy.transpose()) / ys;
      h_is_identity = false;
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
  }
  result.x = x;
  result.value = f;
  result.grad = g;
  result.iterations = it;
  if (bound_index >= 0)
    result.at_lower_bound = x(bound_index) <= lower + bound_eps;
  return result;
}

// Sample skewness of a column.
double sample_skewness(const Vector& v) {
  const double n = static_cast<double>(v.size());
  const double mean = v.mean();
  const Eigen::ArrayXd centered = v.array() - mean;
  const double m2 = centered.square().mean();
  const double m3 = centered.cube().mean();
  return m3 / std::pow(std::max(m2, 1e-300), 1.5);
}

// Shape delta from a sample skewness by the skew normal method of moments,
// floored away from zero to avoid the stationary point at alpha = 0.
double moment_delta(double skew) {
  const double g1 = std::clamp(skew, -0.99, 0.99);
  const double t = std::cbrt(2.0 * g1 / (4.0 - M_PI));
  const double mz = t / std::sqrt(1.0 + t * t);
  double delta = mz * std::sqrt(0.5 * M_PI);
  const double sign = delta >= 0 ? 1.0 : -1.0;
  delta = sign * std::clamp(std::fabs(delta), 0.1, 0.95);
  return delta;
}

}  // namespace

Dataset::Dataset(Matrix y_in, Matrix x_in)
    : y(std::move(y_in)), x(std::move(x_in)) {
  require(y.rows() == x.rows(), "Dataset: y and x row counts differ");
  require(y.cols() >= 1, "Dataset: requires d >= 1");
  require(y.rows() > x.cols(), "Dataset: requires n > p");
  require(y.allFinite() && x.allFinite(),
          "Dataset: non-finite entries are not allowed");
}

Vector ThetaParam::pack() const {
  Vector v(size(p(), d()));
  int k = 0;
  for (int j = 0; j < d(); ++j)
    for (int i = 0; i < p(); ++i) v(k++) = beta(i, j);
  for (int i = 0; i < a_upper.size(); ++i) v(k++) = a_upper(i);
  for (int i = 0; i < d(); ++i) v(k++) = rho(i);
  for (int i = 0; i < d(); ++i) v(k++) = eta(i);
  v(k) = log_nu;
  return v;
}

ThetaParam ThetaParam::unpack(const Vector& v, int p, int d) {
  require(v.size() == size(p, d), "ThetaParam: packed size mismatch");
  ThetaParam theta;
  theta.beta.resize(p, d);
  theta.a_upper.resize(d * (d - 1) / 2);
  theta.rho.resize(d);
  theta.eta.resize(d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < p; ++i) theta.beta(i, j) = v(k++);
  for (int i = 0; i < theta.a_upper.size(); ++i) theta.a_upper(i) = v(k++);
  for (int i = 0; i < d; ++i) theta.rho(i) = v(k++);
  for (int i = 0; i < d; ++i) theta.eta(i) = v(k++);
  theta.log_nu = v(k);
  return theta;
}

Matrix ThetaParam::a_matrix() const {
  const int dd = d();
  Matrix a = Matrix::Identity(dd, dd);
  int k = 0;
  for (int i = 0; i < dd; ++i)
    for (int j = i + 1; j < dd; ++j) a(i, j) = a_upper(k++);
  return a;
}

Matrix ThetaParam::d_diag() const {
  return Vector((-2.0 * rho.array()).exp()).asDiagonal();
}

Matrix ThetaParam::omega_inverse() const {
  const Matrix a = a_matrix();
  return a.transpose() * d_diag() * a;
}

Matrix ThetaParam::omega() const {
  const int dd = d();
  const Matrix a = a_matrix();
  // Omega = A^{-1} D^{-1} A^{-T} by triangular solves.
  const Matrix a_inv =
      a.triangularView<Eigen::Upper>().solve(Matrix::Identity(dd, dd));
  return a_inv * Vector((2.0 * rho.array()).exp()).asDiagonal() *
         a_inv.transpose();
}

Vector ThetaParam::omega_diag_sqrt() const {
  return omega().diagonal().cwiseSqrt();
}

Vector ThetaParam::alpha() const {
  return omega_diag_sqrt().cwiseProduct(eta);
}

StParams ThetaParam::error_params() const {
  return StParams(Vector::Zero(d()), omega(), alpha(), nu());
}

ThetaParam ThetaParam::from_natural(const Matrix& beta, const Matrix& omega,
                                    const Vector& alpha, double nu) {
  require(nu > 0, "ThetaParam: requires nu > 0");
  const int d = static_cast<int>(omega.rows());
  Eigen::LLT<Matrix> llt(omega.inverse());
  require(llt.info() == Eigen::Success,
          "ThetaParam: Omega is not positive definite");
  const Matrix r = Matrix(llt.matrixL()).transpose();  // Omega^{-1} = R'R
  ThetaParam theta;
  theta.beta = beta;
  theta.a_upper.resize(d * (d - 1) / 2);
  theta.rho.resize(d);
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) theta.a_upper(k++) = r(i, j) / r(i, i);
  for (int i = 0; i < d; ++i) theta.rho(i) = -std::log(r(i, i));
  theta.eta = alpha.cwiseQuotient(omega.diagonal().cwiseSqrt());
  theta.log_nu = std::log(nu);
  return theta;
}

namespace {

Vector grad_from_terms(const ThetaParam& theta, const Dataset& data,
                       const Matrix& u_all, const ObsTerms& terms) {
  const int n = data.n(), d = data.d();
  const Matrix a_mat = theta.a_matrix();
  const Vector d_diag = (-2.0 * theta.rho.array()).exp();
  const Matrix omega_inv = theta.omega_inverse();

  ThetaParam grad;
  // beta: -2 X' diag(c) U Omega^{-1} - (X' e) eta'.
  grad.beta = -2.0 * data.x.transpose() *
                  (terms.c.asDiagonal() * u_all * omega_inv) -
              (data.x.transpose() * terms.e) * theta.eta.transpose();
  // A and rho share U' diag(c) U.
  const Matrix weighted = u_all.transpose() * terms.c.asDiagonal() * u_all;
  const Matrix a_grad_full = 2.0 * d_diag.asDiagonal() * a_mat * weighted;
  grad.a_upper.resize(d * (d - 1) / 2);
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) grad.a_upper(k++) = a_grad_full(i, j);
  const Vector d_part = (a_mat * weighted * a_mat.transpose()).diagonal();
  grad.rho.resize(d);
  for (int i = 0; i < d; ++i)
    grad.rho(i) = -2.0 * d_diag(i) * d_part(i) - n;
  grad.eta = u_all.transpose() * terms.e;
  grad.log_nu = theta.nu() * terms.gnu_sum;
  return grad.pack();
}

// Shared single-pass evaluation; the gradient is produced only on request.
double eval_objective(const ThetaParam& theta, const Dataset& data,
                      int threads, Vector* grad_out) {
  const Matrix u_all = data.y - data.x * theta.beta;
  const ObsTerms terms =
      per_observation(theta, data, u_all, grad_out != nullptr, threads);
  if (grad_out) *grad_out = grad_from_terms(theta, data, u_all, terms);
  return pairwise_sum(terms.li.data(), data.n());
}

}  // namespace

double loglik(const ThetaParam& theta, const Dataset& data, int threads) {
  return eval_objective(theta, data, threads, nullptr);
}

Vector loglik_grad(const ThetaParam& theta, const Dataset& data,
                   int threads) {
  Vector grad;
  eval_objective(theta, data, threads, &grad);
  return grad;
}

double nu_threshold(const Dataset& data) {
  require(data.n() >= 2, "nu_threshold: requires n >= 2");
  return static_cast<double>(data.d()) / (data.n() - 1);
}

namespace {

ThetaParam initial_theta(const Dataset& data) {
  const int d = data.d(), p = data.p();
  Eigen::ColPivHouseholderQR<Matrix> qr(data.x);
  if (qr.rank() < p) {
    const auto perm = qr.colsPermutation().indices();
    throw std::domain_error(
        "fit_mle: design matrix column " + std::to_string(perm(qr.rank())) +
        " is collinear with the preceding columns");
  }
  const Matrix beta = qr.solve(data.y);
  const Matrix resid = data.y - data.x * beta;
  Matrix cov = resid.transpose() * resid / data.n();
  // Guard against degenerate residual covariance.
  cov += 1e-10 * cov.diagonal().mean() * Matrix::Identity(d, d);
  const double nu_init = 10.0;
  const Matrix omega = cov * (nu_init - 2.0) / nu_init;
  Vector alpha(d);
  for (int j = 0; j < d; ++j) {
    const double delta = moment_delta(sample_skewness(resid.col(j)));
    alpha(j) = delta / std::sqrt(1.0 - delta * delta);
  }
  return ThetaParam::from_natural(beta, omega, alpha, nu_init);
}

struct SeResult {
  Vector theta_se;
  Vector alpha_se;
  double nu_se = 0.0;
  bool pseudo = false;
};

SeResult standard_errors(const Matrix& info, const ThetaParam& theta) {
  const int m = static_cast<int>(info.rows());
  const int d = theta.d(), p = theta.p();
  SeResult out;
  Matrix cov;
  Eigen::LLT<Matrix> llt(info);
  if (llt.info() == Eigen::Success) {
    cov = llt.solve(Matrix::Identity(m, m));
  } else {
    // Pseudo-inverse on the positive part of the spectrum.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
    Vector inv_vals = eig.eigenvalues();
    for (int i = 0; i < m; ++i)
      inv_vals(i) = inv_vals(i) > 1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff()
                        ? 1.0 / inv_vals(i)
                        : 0.0;
    cov = eig.eigenvectors() * inv_vals.asDiagonal() *
          eig.eigenvectors().transpose();
    out.pseudo = true;
  }
  out.theta_se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

  // Delta method for (alpha, nu) through the natural-parameter extraction.
  const Vector packed = theta.pack();
  Matrix jac(d + 1, m);
  for (int k = 0; k < m; ++k) {
    const double h = 1e-6 * std::max(1.0, std::fabs(packed(k)));
    Vector up = packed, dn = packed;
    up(k) += h;
    dn(k) -= h;
    const ThetaParam tu = ThetaParam::unpack(up, p, d);
    const ThetaParam td = ThetaParam::unpack(dn, p, d);
    Vector fu(d + 1), fd(d + 1);
    fu.head(d) = tu.alpha();
    fd.head(d) = td.alpha();
    fu(d) = tu.nu();
    fd(d) = td.nu();
    jac.col(k) = (fu - fd) / (2.0 * h);
  }
  const Matrix nat_cov = jac * cov * jac.transpose();
  out.alpha_se = nat_cov.diagonal().head(d).cwiseMax(0.0).cwiseSqrt();
  out.nu_se = std::sqrt(std::max(0.0, nat_cov(d, d)));
  return out;
}

}  // namespace

Matrix observed_info(const ThetaParam& theta_hat, const Dataset& data) {
  const Vector packed = theta_hat.pack();
  const int m = static_cast<int>(packed.size());
  Matrix jac(m, m);
  for (int k = 0; k < m; ++k) {
    const double h = 1e-5 * std::max(1.0, std::fabs(packed(k)));
    Vector up = packed, dn = packed;
    up(k) += h;
    dn(k) -= h;
    jac.col(k) =
        (loglik_grad(ThetaParam::unpack(up, data.p(), data.d()), data) -
         loglik_grad(ThetaParam::unpack(dn, data.p(), data.d()), data)) /
        (2.0 * h);
  }
  return -0.5 * (jac + jac.transpose());
}

FitResult fit_mle(const Dataset& data, const FitConfig& config) {
  const int d = data.d(), p = data.p();
  const ThetaParam theta0 = initial_theta(data);

  double floor = config.nu_floor_override ? *config.nu_floor_override
                                          : nu_threshold(data);
  floor += config.nu_floor_offset;
  if (!config.use_nu_floor) floor = 1e-8;
  const double log_nu_lo = std::log(floor);
  const int bound_index = ThetaParam::size(p, d) - 1;

  auto objective = [&](const Vector& v, Vector* grad_out) {
    return eval_objective(ThetaParam::unpack(v, p, d), data, config.threads,
                          grad_out);
  };
  Vector x0 = theta0.pack();
  x0(bound_index) = std::max(x0(bound_index), log_nu_lo);
  const OptimResult opt =
      bfgs_box_maximize(objective, x0, bound_index, log_nu_lo,
                        config.log_nu_cap, config.max_iter, config.grad_tol);

  FitResult fit;
  fit.theta = ThetaParam::unpack(opt.x, p, d);
  fit.loglik = opt.value;
  fit.iterations = opt.iterations;
  fit.nu_floor = floor;
  Vector pg = opt.grad;
  if (opt.x(bound_index) <= log_nu_lo + 1e-10 && pg(bound_index) < 0)
    pg(bound_index) = 0.0;
  if (opt.x(bound_index) >= config.log_nu_cap - 1e-10 && pg(bound_index) > 0)
    pg(bound_index) = 0.0;
  fit.grad_norm = pg.cwiseAbs().maxCoeff();
  if (opt.at_lower_bound && opt.grad(bound_index) < 0)
    fit.status = FitStatus::BoundaryNu;
  else if (opt.converged)
    fit.status = FitStatus::Converged;
  else
    fit.status = FitStatus::MaxIter;

  fit.observed_info = observed_info(fit.theta, data);
  const SeResult se = standard_errors(fit.observed_info, fit.theta);
  fit.std_errors = se.theta_se;
  fit.alpha_se = se.alpha_se;
  fit.nu_se = se.nu_se;
  fit.info_pseudo_inverse = se.pseudo;
  return fit;
}

namespace {

// Profile constraints; alpha and log_omega (= rho) fixing require d = 1.
struct ProfileConstraint {
  std::optional<double> alpha_fix;
  std::optional<double> rho_fix;
  std::optional<double> log_nu_fix;
};

struct ReducedProblem {
  std::vector<int> free_slots;  // indices into the packed theta vector
  bool eta_linked = false;      // eta recomputed from fixed alpha and rho
};

// theta layout for d = 1: beta (p), rho, eta, log_nu.
ReducedProblem reduced_problem(int p, int d, const ProfileConstraint& cons) {
  ReducedProblem red;
  const int m = ThetaParam::size(p, d);
  const int rho_at = p * d + d * (d - 1) / 2;
  const int eta_at = rho_at + d;
  const int log_nu_at = m - 1;
  for (int k = 0; k < m; ++k) {
    if (cons.rho_fix && k == rho_at) continue;
    if (cons.alpha_fix && k == eta_at) continue;
    if (cons.log_nu_fix && k == log_nu_at) continue;
    red.free_slots.push_back(k);
  }
  red.eta_linked = cons.alpha_fix.has_value() && !cons.rho_fix.has_value();
  return red;
}

Vector embed_full(const Vector& free, const ReducedProblem& red,
                  const ProfileConstraint& cons, int p, int d) {
  const int m = ThetaParam::size(p, d);
  const int rho_at = p * d + d * (d - 1) / 2;
  const int eta_at = rho_at + d;
  Vector full = Vector::Zero(m);
  for (size_t i = 0; i < red.free_slots.size(); ++i)
    full(red.free_slots[i]) = free(i);
  if (cons.rho_fix) full(rho_at) = *cons.rho_fix;
  if (cons.log_nu_fix) full(m - 1) = *cons.log_nu_fix;
  if (cons.alpha_fix) full(eta_at) = *cons.alpha_fix * std::exp(-full(rho_at));
  return full;
}

}  // namespace

ProfileResult profile_loglik(const Dataset& data,
                             const std::vector<std::string>& which,
                             const std::vector<Vector>& grids,
                             const FitConfig& config) {
  require(!which.empty() && which.size() <= 2,
          "profile_loglik: one or two parameters");
  require(grids.size() == which.size(),
          "profile_loglik: one grid per parameter");
  const int d = data.d(), p = data.p();
  for (const auto& name : which) {
    require(name == "alpha" || name == "log_omega" || name == "log_nu",
            "profile_loglik: unknown parameter " + name);
    if (name != "log_nu")
      require(d == 1, "profile_loglik: " + name + " requires d = 1");
  }

  const FitResult full = fit_mle(data, config);
  double loglik_hat = full.loglik;
  const Vector theta_hat = full.theta.pack();

  const int rho_at = p * d + d * (d - 1) / 2;
  const int rows = static_cast<int>(grids[0].size());
  const int cols = which.size() == 2 ? static_cast<int>(grids[1].size()) : 1;
  Matrix prof(rows, cols);

  auto solve_point = [&](const ProfileConstraint& cons) -> double {
    const ReducedProblem red = reduced_problem(p, d, cons);
    Vector free0(red.free_slots.size());
    for (size_t i = 0; i < red.free_slots.size(); ++i)
      free0(i) = theta_hat(red.free_slots[i]);
    auto objective = [&](const Vector& v, Vector* grad_out) {
      const Vector fullv = embed_full(v, red, cons, p, d);
      const ThetaParam theta = ThetaParam::unpack(fullv, p, d);
      if (!grad_out)
        return eval_objective(theta, data, config.threads, nullptr);
      Vector g;
      const double value = eval_objective(theta, data, config.threads, &g);
      grad_out->resize(v.size());
      for (size_t i = 0; i < red.free_slots.size(); ++i) {
        const int slot = red.free_slots[i];
        double gi = g(slot);
        // With alpha fixed, eta = alpha e^{-rho} couples rho to eta.
        if (red.eta_linked && slot == rho_at)
          gi -= theta.eta(0) * g(rho_at + d);
        (*grad_out)(i) = gi;
      }
      return value;
    };
    int bound_index = -1;
    double lo = -kInf;
    if (!cons.log_nu_fix) {
      // Same floor policy as the full fit.
      double floor = config.nu_floor_override ? *config.nu_floor_override
                                              : nu_threshold(data);
      floor += config.nu_floor_offset;
      if (!config.use_nu_floor) floor = 1e-8;
      lo = std::log(floor);
      bound_index = static_cast<int>(red.free_slots.size()) - 1;
    }
    const OptimResult opt =
        bfgs_box_maximize(objective, free0, bound_index, lo,
                          config.log_nu_cap, config.max_iter,
                          config.grad_tol);
    return opt.value;
  };

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      ProfileConstraint cons;
      auto assign = [&](const std::string& name, double value) {
        if (name == "alpha")
          cons.alpha_fix = value;
        else if (name == "log_omega")
          cons.rho_fix = value;
        else
          cons.log_nu_fix = value;
      };
      assign(which[0], grids[0](i));
      if (which.size() == 2) assign(which[1], grids[1](j));
      double value;
      try {
        value = solve_point(cons);
      } catch (const std::exception&) {
        value = std::numeric_limits<double>::quiet_NaN();
      }
      prof(i, j) = value;
    }
  }

  // A grid point beating the full fit means the global stage stopped short;
  // lift the reference level to the best value seen.
  const double best = prof.array().isNaN().select(-kInf, prof.array()).maxCoeff();
  if (best > loglik_hat) loglik_hat = best;

  ProfileResult result;
  result.which = which;
  result.grids = grids;
  result.deviance = 2.0 * (loglik_hat - prof.array());
  result.chi2_levels = {};
  const double df = static_cast<double>(which.size());
  const std::array<double, 5> levels = {0.50, 0.75, 0.90, 0.95, 0.99};
  for (size_t i = 0; i < levels.size(); ++i)
    result.chi2_levels[i] = chi_square_quantile(levels[i], df);
  result.loglik_hat = loglik_hat;
  return result;
}

}  // namespace skewt
