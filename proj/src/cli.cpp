#include "skewt/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewt/diagnostics.hpp"
#include "skewt/elliptical.hpp"
#include "skewt/fit.hpp"
#include "skewt/perturbation.hpp"
#include "skewt/rng.hpp"
#include "skewt/skew_elliptical.hpp"
#include "skewt/skew_normal.hpp"
#include "skewt/skew_t.hpp"

namespace skewt {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size())
    throw std::runtime_error("cannot parse number: " + s);
  return v;
}

Vector parse_vector(const std::string& s) {
  const auto parts = split(s, ',');
  Vector v(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) v(i) = parse_double(parts[i]);
  return v;
}

// Rows separated by ';', entries by ','.
Matrix parse_matrix(const std::string& s) {
  const auto rows = split(s, ';');
  std::vector<Vector> parsed;
  for (const auto& row : rows) parsed.push_back(parse_vector(row));
  Matrix m(parsed.size(), parsed[0].size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].size() != m.cols())
      throw std::runtime_error("ragged matrix literal: " + s);
    m.row(i) = parsed[i].transpose();
  }
  return m;
}

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;

  int column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return static_cast<int>(j);
    throw std::runtime_error("column not found: " + name);
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split(line, ',');
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != table.header.size())
      throw std::runtime_error("row width mismatch in " + path);
    std::vector<double> row(parts.size());
    for (size_t j = 0; j < parts.size(); ++j) row[j] = parse_double(parts[j]);
    rows.push_back(std::move(row));
  }
  table.values.resize(rows.size(), table.header.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) table.values(i, j) = rows[i][j];
  return table;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

// Shared distribution-parameter flags.
struct DistOptions {
  std::string family = "st";
  std::string xi, omega, alpha, corr;
  double nu = 0.0, tau = 0.0, shape_m = 0.0;
  bool nu_set = false, m_set = false;
};

void add_dist_options(CLI::App* cmd, DistOptions& opt) {
  cmd->add_option("--family", opt.family,
                  "Distribution family: sn, esn, st, est, spvii, spii")
      ->required();
  cmd->add_option("--xi", opt.xi, "Location vector, comma separated");
  cmd->add_option("--omega", opt.omega,
                  "Dispersion matrix, rows separated by ';'");
  cmd->add_option("--corr", opt.corr,
                  "Correlation matrix (spvii/spii), rows separated by ';'");
  cmd->add_option("--alpha", opt.alpha, "Shape vector, comma separated");
  cmd->add_option("--nu", opt.nu, "Degrees of freedom")
      ->each([&opt](const std::string&) { opt.nu_set = true; });
  cmd->add_option("--tau", opt.tau, "Extension parameter (esn/est)");
  cmd->add_option("--m", opt.shape_m, "Pearson VII shape M")
      ->each([&opt](const std::string&) { opt.m_set = true; });
}

int dist_dim(const DistOptions& opt) {
  if (!opt.alpha.empty()) return static_cast<int>(parse_vector(opt.alpha).size());
  if (!opt.xi.empty()) return static_cast<int>(parse_vector(opt.xi).size());
  if (!opt.omega.empty()) return static_cast<int>(parse_matrix(opt.omega).rows());
  if (!opt.corr.empty()) return static_cast<int>(parse_matrix(opt.corr).rows());
  return 1;
}

Vector vector_or(const std::string& s, int d, double fill) {
  if (s.empty()) return Vector::Constant(d, fill);
  Vector v = parse_vector(s);
  if (v.size() != d) throw std::domain_error("vector dimension mismatch");
  return v;
}

Matrix matrix_or_identity(const std::string& s, int d) {
  if (s.empty()) return Matrix::Identity(d, d);
  Matrix m = parse_matrix(s);
  if (m.rows() != d || m.cols() != d)
    throw std::domain_error("matrix dimension mismatch");
  return m;
}

SnParams make_sn(const DistOptions& opt) {
  const int d = dist_dim(opt);
  const double tau = opt.family == "esn" ? opt.tau : 0.0;
  return SnParams(vector_or(opt.xi, d, 0.0), matrix_or_identity(opt.omega, d),
                  vector_or(opt.alpha, d, 0.0), tau);
}

StParams make_st(const DistOptions& opt) {
  if (!opt.nu_set) throw std::domain_error("--nu is required for st/est");
  const int d = dist_dim(opt);
  const double tau = opt.family == "est" ? opt.tau : 0.0;
  return StParams(vector_or(opt.xi, d, 0.0), matrix_or_identity(opt.omega, d),
                  vector_or(opt.alpha, d, 0.0), opt.nu, tau);
}

SkewEllipticalParams make_se(const DistOptions& opt) {
  if (!opt.nu_set) throw std::domain_error("--nu is required for spvii/spii");
  const int d = dist_dim(opt);
  DensityGenerator gen =
      opt.family == "spvii"
          ? DensityGenerator::pearson_vii(
                d, opt.m_set ? opt.shape_m : 0.5 * (d + 1 + opt.nu), opt.nu)
          : DensityGenerator::pearson_ii(d, opt.nu);
  return SkewEllipticalParams(vector_or(opt.xi, d, 0.0),
                              matrix_or_identity(opt.corr, d),
                              vector_or(opt.alpha, d, 0.0), gen);
}

double family_logpdf(const DistOptions& opt, const Vector& y) {
  if (opt.family == "sn" || opt.family == "esn")
    return sn_logpdf(y, make_sn(opt));
  if (opt.family == "st" || opt.family == "est")
    return st_logpdf(y, make_st(opt));
  if (opt.family == "spvii") return spvii_logpdf(y, make_se(opt));
  if (opt.family == "spii") return spii_logpdf(y, make_se(opt));
  throw std::domain_error("unknown family: " + opt.family);
}

Vector family_sample(const DistOptions& opt, Rng& rng) {
  if (opt.family == "sn" || opt.family == "esn")
    return sn_sample_conditioning(make_sn(opt), rng);
  if (opt.family == "st" || opt.family == "est")
    return st_sample(make_st(opt), rng);
  if (opt.family == "spvii" || opt.family == "spii")
    return se_sample_conditioning(make_se(opt), rng);
  throw std::domain_error("unknown family: " + opt.family);
}

struct FitCommon {
  std::string data_path, response, covariates, out_path;
  bool no_intercept = false;
  double nu_floor_override = -1.0;
  bool no_nu_floor = false;
  int threads = 1;
};

void add_fit_common(CLI::App* cmd, FitCommon& opt) {
  cmd->add_option("--data", opt.data_path, "Input CSV with a header row")
      ->required();
  cmd->add_option("--response", opt.response,
                  "Response column names, comma separated")
      ->required();
  cmd->add_option("--covariates", opt.covariates,
                  "Covariate column names, comma separated");
  cmd->add_flag("--no-intercept", opt.no_intercept,
                "Do not prepend an intercept column");
  cmd->add_option("--nu-floor", opt.nu_floor_override,
                  "Override the default d/(n-1) degrees-of-freedom floor");
  cmd->add_flag("--no-nu-floor", opt.no_nu_floor,
                "Disable the degrees-of-freedom floor (pole hunting)");
  cmd->add_option("--threads", opt.threads,
                  "Threads for the log-likelihood reduction");
}

Dataset load_dataset(const FitCommon& opt) {
  const CsvTable table = read_csv(opt.data_path);
  const auto resp_names = split(opt.response, ',');
  Matrix y(table.values.rows(), resp_names.size());
  for (size_t j = 0; j < resp_names.size(); ++j)
    y.col(j) = table.values.col(table.column(resp_names[j]));
  std::vector<std::string> cov_names;
  if (!opt.covariates.empty()) cov_names = split(opt.covariates, ',');
  const int p = (opt.no_intercept ? 0 : 1) + static_cast<int>(cov_names.size());
  if (p == 0) throw std::domain_error("no covariates and no intercept");
  Matrix x(table.values.rows(), p);
  int col = 0;
  if (!opt.no_intercept) x.col(col++).setOnes();
  for (const auto& name : cov_names)
    x.col(col++) = table.values.col(table.column(name));
  return Dataset(std::move(y), std::move(x));
}

FitConfig make_fit_config(const FitCommon& opt) {
  FitConfig config;
  if (opt.nu_floor_override >= 0) config.nu_floor_override = opt.nu_floor_override;
  config.use_nu_floor = !opt.no_nu_floor;
  config.threads = opt.threads;
  return config;
}

json fit_report(const FitResult& fit, const Dataset& data) {
  json report;
  report["schema"] = "skewt-fit/1";
  report["n"] = data.n();
  report["d"] = data.d();
  report["p"] = data.p();
  report["theta"]["beta"] = to_json(fit.theta.beta);
  report["theta"]["a_upper"] = to_json(fit.theta.a_upper);
  report["theta"]["rho"] = to_json(fit.theta.rho);
  report["theta"]["eta"] = to_json(fit.theta.eta);
  report["theta"]["log_nu"] = fit.theta.log_nu;
  report["natural"]["omega"] = to_json(fit.theta.omega());
  report["natural"]["alpha"] = to_json(fit.theta.alpha());
  report["natural"]["nu"] = fit.theta.nu();
  report["loglik"] = fit.loglik;
  report["grad_norm"] = fit.grad_norm;
  report["iterations"] = fit.iterations;
  report["status"] = fit.status == FitStatus::Converged    ? "converged"
                     : fit.status == FitStatus::BoundaryNu ? "boundary_nu"
                                                           : "max_iter";
  report["nu_floor"] = fit.nu_floor;
  report["info_pseudo_inverse"] = fit.info_pseudo_inverse;
  report["std_errors"]["theta"] = to_json(fit.std_errors);
  report["std_errors"]["alpha"] = to_json(fit.alpha_se);
  report["std_errors"]["nu"] = fit.nu_se;
  if (data.d() == 1 && fit.theta.nu() > 1.0)
    report["fitted_error_mean"] = fitted_error_mean(fit);
  return report;
}

int cmd_fit(const FitCommon& opt, const std::string& healy_out) {
  const Dataset data = load_dataset(opt);
  const FitResult fit = fit_mle(data, make_fit_config(opt));
  auto out = open_output(opt.out_path);
  out << fit_report(fit, data).dump(2) << "\n";
  if (!healy_out.empty()) {
    auto h = open_output(healy_out);
    write_healy_csv(healy_points(fit, data), h);
  }
  return fit.status == FitStatus::MaxIter ? 3 : 0;
}

int cmd_sample(const DistOptions& dist, int n, std::uint64_t seed,
               const std::string& out_path) {
  require(n > 0, "sample: requires --n > 0");
  Rng rng(seed);
  auto out = open_output(out_path);
  const int d = dist_dim(dist);
  for (int j = 0; j < d; ++j) out << (j ? "," : "") << "y" << (j + 1);
  out << "\n";
  for (int i = 0; i < n; ++i) {
    const Vector y = family_sample(dist, rng);
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << fmt(y(j));
    out << "\n";
  }
  return 0;
}

std::vector<Vector> parse_points(const std::string& at, int d) {
  std::vector<Vector> points;
  for (const auto& row : split(at, ';')) {
    Vector v = parse_vector(row);
    if (v.size() != d) throw std::domain_error("--at dimension mismatch");
    points.push_back(std::move(v));
  }
  return points;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    open_output(out_path) << text;
}

int cmd_pdf(const DistOptions& dist, const std::string& at,
            const std::string& format, const std::string& out_path) {
  const int d = dist_dim(dist);
  if (format == "json") {
    json rows = json::array();
    for (const Vector& y : parse_points(at, d))
      rows.push_back({{"y", to_json(y)},
                      {"pdf", std::exp(family_logpdf(dist, y))}});
    emit(json{{"schema", "skewt-pdf/1"}, {"points", rows}}.dump(2) + "\n",
         out_path);
    return 0;
  }
  require(format == "csv", "pdf: --format must be csv or json");
  std::ostringstream body;
  for (int j = 0; j < d; ++j) body << "y" << (j + 1) << ",";
  body << "pdf\n";
  for (const Vector& y : parse_points(at, d)) {
    for (int j = 0; j < d; ++j) body << fmt(y(j)) << ",";
    body << fmt(std::exp(family_logpdf(dist, y))) << "\n";
  }
  emit(body.str(), out_path);
  return 0;
}

int cmd_cdf(const DistOptions& dist, const std::string& at,
            std::uint64_t seed, bool seed_set, int mc_draws,
            const std::string& format, const std::string& out_path) {
  const int d = dist_dim(dist);
  std::vector<std::pair<Vector, CdfEstimate>> results;
  for (const Vector& y : parse_points(at, d)) {
    CdfEstimate est{};
    if (dist.family == "sn") {
      if (d != 1) throw std::domain_error("cdf: sn supports d = 1 only");
      est = {sn_scalar_cdf(y(0), make_sn(dist)), 1e-10};
    } else if (dist.family == "st" || dist.family == "est") {
      const StParams p = make_st(dist);
      if (d == 1 && p.tau() == 0.0) {
        est = st_cdf(y(0), p);
      } else {
        // The extended variant has no quadrature path; Monte Carlo only.
        if (!seed_set)
          throw std::domain_error(
              "cdf: --seed required for d > 1 or tau != 0");
        Rng rng(seed);
        est = st_cdf(y, p, rng, mc_draws);
      }
    } else {
      throw std::domain_error("cdf: supported families are sn, st and est");
    }
    results.emplace_back(y, est);
  }
  if (format == "json") {
    json rows = json::array();
    for (const auto& [y, est] : results)
      rows.push_back({{"y", to_json(y)},
                      {"cdf", est.value},
                      {"error", est.error}});
    emit(json{{"schema", "skewt-cdf/1"}, {"points", rows}}.dump(2) + "\n",
         out_path);
    return 0;
  }
  require(format == "csv", "cdf: --format must be csv or json");
  std::ostringstream body;
  for (int j = 0; j < d; ++j) body << "y" << (j + 1) << ",";
  body << "cdf,error\n";
  for (const auto& [y, est] : results) {
    for (int j = 0; j < d; ++j) body << fmt(y(j)) << ",";
    body << fmt(est.value) << "," << fmt(est.error) << "\n";
  }
  emit(body.str(), out_path);
  return 0;
}

int cmd_moments(const DistOptions& dist, const std::string& format,
                const std::string& out_path) {
  if (dist.family != "st" && dist.family != "est")
    throw std::domain_error("moments: supported families are st and est");
  const StParams p = make_st(dist);
  const Vector mean = st_mean(p);
  const Matrix variance = st_variance(p);
  const bool shape = p.dim() == 1 && p.tau() == 0.0 && p.nu() > 4.0;
  if (format == "csv") {
    std::ostringstream body;
    body << "name,value\n";
    for (int j = 0; j < mean.size(); ++j)
      body << "mean_" << (j + 1) << "," << fmt(mean(j)) << "\n";
    for (int i = 0; i < variance.rows(); ++i)
      for (int j = 0; j < variance.cols(); ++j)
        body << "variance_" << (i + 1) << "_" << (j + 1) << ","
             << fmt(variance(i, j)) << "\n";
    if (shape) {
      body << "gamma1," << fmt(st_gamma1(p)) << "\n";
      body << "gamma2," << fmt(st_gamma2(p)) << "\n";
    }
    emit(body.str(), out_path);
    return 0;
  }
  require(format == "json", "moments: --format must be csv or json");
  json report;
  report["schema"] = "skewt-moments/1";
  report["family"] = dist.family;
  report["nu"] = p.nu();
  report["mean"] = to_json(mean);
  report["variance"] = to_json(variance);
  if (shape) {
    report["gamma1"] = st_gamma1(p);
    report["gamma2"] = st_gamma2(p);
  }
  emit(report.dump(2) + "\n", out_path);
  return 0;
}

Vector parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3)
    throw std::domain_error("grid must be start:stop:count");
  const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
  const int count = static_cast<int>(parse_double(parts[2]));
  require(count >= 2, "grid count must be at least 2");
  Vector g(count);
  for (int i = 0; i < count; ++i)
    g(i) = lo + (hi - lo) * i / (count - 1);
  return g;
}

int cmd_profile(const FitCommon& opt, const std::string& params,
                const std::string& grid_spec) {
  const Dataset data = load_dataset(opt);
  const auto names = split(params, ',');
  const auto grid_specs = split(grid_spec, ';');
  require(names.size() == grid_specs.size(),
          "profile: one grid per parameter");
  std::vector<Vector> grids;
  for (const auto& s : grid_specs) grids.push_back(parse_grid(s));
  const ProfileResult prof =
      profile_loglik(data, names, grids, make_fit_config(opt));

  auto out = open_output(opt.out_path);
  const std::array<double, 5> levels = {0.50, 0.75, 0.90, 0.95, 0.99};
  for (size_t i = 0; i < levels.size(); ++i)
    out << "# chi2_level_" << fmt(levels[i]) << ": "
        << fmt(prof.chi2_levels[i]) << "\n";
  out << "# loglik_hat: " << fmt(prof.loglik_hat) << "\n";
  for (const auto& name : names) out << name << ",";
  out << "deviance\n";
  for (int i = 0; i < prof.deviance.rows(); ++i)
    for (int j = 0; j < prof.deviance.cols(); ++j) {
      out << fmt(grids[0](i)) << ",";
      if (names.size() == 2) out << fmt(grids[1](j)) << ",";
      out << fmt(prof.deviance(i, j)) << "\n";
    }
  return 0;
}

int cmd_healy(const FitCommon& opt, const std::string& reference,
              const std::string& position, const std::string& svg_out) {
  const Dataset data = load_dataset(opt);
  PlottingPosition pos;
  if (position == "hazen")
    pos = PlottingPosition::Hazen;
  else if (position == "healy")
    pos = PlottingPosition::Healy;
  else
    throw std::domain_error("healy: --position must be hazen or healy");
  HealySeries series;
  int status = 0;
  if (reference == "normal") {
    series = healy_points_normal(data, pos);
  } else if (reference == "st") {
    const FitResult fit = fit_mle(data, make_fit_config(opt));
    series = healy_points(fit, data, pos);
    if (fit.status == FitStatus::MaxIter) status = 3;
  } else {
    throw std::domain_error("healy: --reference must be st or normal");
  }
  auto out = open_output(opt.out_path);
  write_healy_csv(series, out);
  if (!svg_out.empty()) {
    auto svg = open_output(svg_out);
    write_healy_svg(series, svg);
  }
  return status;
}

// Illustrative parameter sets for the perturbed-Beta demonstration surface.
const std::map<int, BetaDemoParams> kDemoPresets = {
    {1, {2.0, 3.0, 4.0, 2.0, 1.0, 1.0}},
    {2, {2.0, 2.0, -3.0, 5.0, 2.0, 0.5}},
    {3, {4.0, 1.5, 2.0, -2.0, 3.0, 1.0}},
    {4, {0.8, 0.8, 5.0, 1.0, 0.5, 2.0}},
    {5, {3.0, 5.0, 1.0, 1.0, 4.0, 3.0}},
    {6, {1.5, 2.5, -4.0, -3.0, 1.5, 2.5}},
};

int cmd_demo_perturb(int preset, const BetaDemoParams& custom, bool has_custom,
                     int grid_n, const std::string& out_path) {
  BetaDemoParams params = custom;
  if (!has_custom) {
    const auto it = kDemoPresets.find(preset);
    if (it == kDemoPresets.end())
      throw std::domain_error("demo-perturb: preset must be 1..6");
    params = it->second;
  }
  require(grid_n >= 2, "demo-perturb: --grid-n must be at least 2");
  auto out = open_output(out_path);
  out << "y1,y2,density\n";
  Vector y(2);
  for (int i = 0; i < grid_n; ++i) {
    // Cell midpoints keep the grid strictly inside (-1, 1)^2.
    y(0) = -1.0 + 2.0 * (i + 0.5) / grid_n;
    for (int j = 0; j < grid_n; ++j) {
      y(1) = -1.0 + 2.0 * (j + 0.5) / grid_n;
      out << fmt(y(0)) << "," << fmt(y(1)) << ","
          << fmt(std::exp(beta_demo_logpdf(y, params))) << "\n";
    }
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Skew normal / skew t distributions: fitting, sampling and "
               "diagnostics"};
  app.require_subcommand(1);

  DistOptions dist;
  FitCommon fit_opt;
  std::string at, healy_out, svg_out, reference = "st", position = "hazen";
  std::string profile_params, profile_grid, out_path;
  std::string point_format = "csv", moment_format = "json";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int n_draws = 1000, mc_draws = 1000000;
  int preset = 1, grid_n = 64;
  BetaDemoParams custom;
  bool has_custom = false;

  auto* c_fit = app.add_subcommand("fit", "Maximum likelihood fit");
  add_fit_common(c_fit, fit_opt);
  c_fit->add_option("--out", fit_opt.out_path, "Fit report JSON")->required();
  c_fit->add_option("--healy-out", healy_out, "Also write a Healy CSV");

  auto* c_sample = app.add_subcommand("sample", "Draw random variates");
  add_dist_options(c_sample, dist);
  c_sample->add_option("--n", n_draws, "Number of draws")->required();
  c_sample->add_option("--seed", seed, "RNG seed (required)")->required();
  c_sample->add_option("--out", out_path, "Output CSV")->required();

  auto* c_pdf = app.add_subcommand("pdf", "Evaluate the density");
  add_dist_options(c_pdf, dist);
  c_pdf->add_option("--at", at, "Points, e.g. \"0,1;2,3\"")->required();
  c_pdf->add_option("--format", point_format, "csv or json");
  c_pdf->add_option("--out", out_path, "Output file (default stdout)");

  auto* c_cdf = app.add_subcommand("cdf", "Evaluate the distribution function");
  add_dist_options(c_cdf, dist);
  c_cdf->add_option("--at", at, "Points")->required();
  c_cdf->add_option("--seed", seed, "RNG seed (required when d > 1)")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  c_cdf->add_option("--mc-draws", mc_draws, "Monte Carlo draws for d > 1");
  c_cdf->add_option("--format", point_format, "csv or json");
  c_cdf->add_option("--out", out_path, "Output file (default stdout)");

  auto* c_mom = app.add_subcommand("moments", "Mean, variance, skewness, "
                                              "kurtosis");
  add_dist_options(c_mom, dist);
  c_mom->add_option("--format", moment_format, "json or csv");
  c_mom->add_option("--out", out_path, "Output file (default stdout)");

  auto* c_prof = app.add_subcommand("profile", "Profile deviance surface");
  add_fit_common(c_prof, fit_opt);
  c_prof->add_option("--params", profile_params,
                     "One or two of alpha, log_omega, log_nu")
      ->required();
  c_prof->add_option("--grid", profile_grid,
                     "start:stop:count per parameter, ';' separated")
      ->required();
  c_prof->add_option("--out", fit_opt.out_path, "Deviance CSV")->required();

  auto* c_healy = app.add_subcommand("healy", "Goodness-of-fit series");
  add_fit_common(c_healy, fit_opt);
  c_healy->add_option("--reference", reference, "st or normal");
  c_healy->add_option("--position", position,
                      "Plotting positions: hazen ((i-1/2)/n) or healy (i/n)");
  c_healy->add_option("--out", fit_opt.out_path, "Healy CSV")->required();
  c_healy->add_option("--svg-out", svg_out, "Optional SVG scatter");

  auto* c_demo = app.add_subcommand("demo-perturb",
                                    "Perturbed-Beta density grid");
  c_demo->add_option("--preset", preset, "Illustrative preset 1..6");
  auto on_custom = [&has_custom](const std::string&) { has_custom = true; };
  c_demo->add_option("--a", custom.a, "Beta shape a")->each(on_custom);
  c_demo->add_option("--b", custom.b, "Beta shape b")->each(on_custom);
  c_demo->add_option("--p1", custom.p1, "sin coefficient 1")->each(on_custom);
  c_demo->add_option("--p2", custom.p2, "sin coefficient 2")->each(on_custom);
  c_demo->add_option("--q1", custom.q1, "cos coefficient 1")->each(on_custom);
  c_demo->add_option("--q2", custom.q2, "cos coefficient 2")->each(on_custom);
  c_demo->add_option("--grid-n", grid_n, "Grid points per axis");
  c_demo->add_option("--out", out_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (c_fit->parsed()) return cmd_fit(fit_opt, healy_out);
    if (c_sample->parsed()) return cmd_sample(dist, n_draws, seed, out_path);
    if (c_pdf->parsed()) return cmd_pdf(dist, at, point_format, out_path);
    if (c_cdf->parsed())
      return cmd_cdf(dist, at, seed, seed_set, mc_draws, point_format,
                     out_path);
    if (c_mom->parsed()) return cmd_moments(dist, moment_format, out_path);
    if (c_prof->parsed())
      return cmd_profile(fit_opt, profile_params, profile_grid);
    if (c_healy->parsed())
      return cmd_healy(fit_opt, reference, position, svg_out);
    if (c_demo->parsed())
      return cmd_demo_perturb(preset, custom, has_custom, grid_n, out_path);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace skewt
