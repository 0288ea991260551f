#include "svar_app/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "svar/io.hpp"
#include "svar/montecarlo.hpp"
#include "svar/qml.hpp"
#include "svar/rng.hpp"
#include "svar_app/report_json.hpp"

namespace svar::app {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

TimeSeriesData read_input(const std::string& input) {
  if (input.empty()) throw ConfigurationError("no input file given");
  if (!fs::exists(input)) throw ConfigurationError("input file " + input + " does not exist");
  return read_csv(fs::path(input));
}

std::string g6(double x) { return fmt::format("{:.6g}", x); }

std::string matrix_rows_csv(const std::string& label, const std::vector<std::size_t>& horizons, const Matrix& values) {
  std::string out;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    if (!label.empty()) out += label + ",";
    out += std::to_string(horizons[h]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + g6(values(static_cast<Eigen::Index>(h), j));
    out += "\n";
  }
  return out;
}

std::string maturity_header(const std::vector<int>& maturities) {
  std::string out;
  for (int tau : maturities) out += "," + std::to_string(tau);
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  const std::uint64_t seed = derive_seed(config.general.seed, {kSimulateStream});
  const TimeSeriesData data =
      simulate(reference_design(), NoiseSpec(reference_noise_factor(), seed), config.simulate.T, config.simulate.burn_in);
  const fs::path out(config.simulate.output);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_csv(out, data);
  spdlog::info("wrote {} rows x {} series to {}", data.length(), data.dimension(), out.string());
  return 0;
}

int cmd_fit(const RunConfig& config) {
  const auto& fc = config.fit;
  if (!fc.lambda) throw ConfigurationError("fit needs a lambda; use the cv command to select one");
  const TimeSeriesData data = read_input(fc.input);
  const Regression reg = build_regression(data, fc.lags);
  const Moments mom = Moments::from(reg.X, reg.Y);
  const WeightingMatrix w = WeightingMatrix::identity(data.dimension());
  const FitConfig fit_config = config.solver.to_fit_config();
  const PenaltySpec spec = fc.penalty.make(*fc.lambda);

  FitResult fit = fit_at_lambda(mom, w, spec, fit_config);
  if (fc.certificate) fit.certificate = certify_fit(fit, mom, w, spec, fit_config.standardize);

  json out = to_json(fit);
  out["k"] = data.dimension();
  out["r"] = fc.lags;
  out["names"] = data.names.empty() ? default_names(data.dimension()) : data.names;
  out["penalty"] = {{"kind", to_string(spec.kind())}, {"a", spec.a()}};
  if (fc.covariance) {
    SandwichOptions opts;
    opts.estimator = fc.long_run == "bartlett" ? LongRunVariance::Bartlett : LongRunVariance::OuterProduct;
    const Matrix cov = sandwich_covariance(fit.theta, fit.support, reg.X, reg.Y, w, opts);
    out["covariance"] = {{"support", fit.support}, {"matrix", to_json(cov)}};
  }
  write_json(fc.output, out);

  spdlog::info("lambda {} support {} of {} objective {} converged {}", g6(fit.lambda), fit.support.size(),
               fit.theta.size(), g6(fit.objective), fit.converged);
  if (fit.certificate) {
    spdlog::info("certificate: gap {} inactive margin {} eigen margin {} passed {}",
                 g6(fit.certificate->stationarity_gap), g6(fit.certificate->inactive_margin),
                 g6(fit.certificate->eigen_margin), fit.certificate->passed);
  }
  return fit.converged ? 0 : 1;
}

int cmd_cv(const RunConfig& config) {
  const auto& cc = config.cv;
  const TimeSeriesData data = read_input(cc.input);
  const Regression reg = build_regression(data, cc.lags);
  const WeightingMatrix w = WeightingMatrix::identity(data.dimension());
  const CvResult cv = cross_validate(reg, w, cc.penalty.make(1.0), config.solver.to_fit_config(), cc.folds,
                                     derive_seed(config.general.seed, {kCvStream}));
  json out = to_json(cv);
  out["k"] = data.dimension();
  out["r"] = cc.lags;
  out["folds"] = cc.folds;
  write_json(cc.output, out);
  spdlog::info("best lambda {} (index {} of {}), support {}", g6(cv.best_lambda), cv.best_index, cv.lambdas.size(),
               cv.fit.support.size());
  return cv.fit.converged ? 0 : 1;
}

int cmd_montecarlo(const RunConfig& config) {
  const ExperimentSpec spec = make_experiment_spec(config);
  spdlog::info("Monte Carlo: {} sample sizes x {} estimators x {} replications on {} threads",
               spec.sample_sizes.size(), spec.estimators.size(), spec.replications, spec.threads);
  const ExperimentReport report = run_experiment(spec);
  const std::string table = render_table(report);
  write_json(config.montecarlo.output, to_json(report));
  write_text(config.montecarlo.table, table);
  std::fputs(table.c_str(), stdout);
  for (const auto& cell : report.cells) {
    for (const auto& err : cell.errors) spdlog::warn("T={} {}: {}", cell.T, cell.estimator.label(), err);
  }
  spdlog::info("finished in {} s, {} failed fits", g6(report.total_seconds), report.failures());
  return report.failures() == 0 ? 0 : 1;
}

YieldDataset forecast_dataset(const RunConfig& config) {
  if (config.forecast.input.empty()) {
    SyntheticYieldOptions opts;
    opts.seed = derive_seed(config.general.seed, {kForecastStream});
    return synthetic_yield_dataset(opts);
  }
  if (!fs::exists(config.forecast.input)) {
    throw ConfigurationError("input file " + config.forecast.input + " does not exist");
  }
  return read_yield_csv(fs::path(config.forecast.input));
}

std::string rmse_table_csv(const ForecastReport& report) {
  std::string out = "method,h" + maturity_header(report.maturities) + "\n";
  out += matrix_rows_csv("dns", report.horizons, report.rmse_dns);
  out += matrix_rows_csv("svar", report.horizons, report.rmse_svar);
  out += matrix_rows_csv("random_walk", report.horizons, report.rmse_rw);
  return out;
}

std::string ratio_table_csv(const ForecastReport& report) {
  return "h" + maturity_header(report.maturities) + "\n" + matrix_rows_csv("", report.horizons, report.svar_over_dns());
}

int cmd_forecast(const RunConfig& config) {
  const auto& fc = config.forecast;
  const YieldDataset data = forecast_dataset(config);
  spdlog::info("{} months x {} maturities, {} to {}", data.length(), data.width(), data.dates.front().iso(),
               data.dates.back().iso());
  const ForecastReport report =
      rolling_evaluation(data, MonthDate::parse(fc.start), MonthDate::parse(fc.end), make_forecast_options(config));

  const fs::path dir(fc.output_dir);
  fs::create_directories(dir);
  write_json(dir / "forecast.json", to_json(report));
  const std::string rmse = rmse_table_csv(report);
  const std::string ratio = ratio_table_csv(report);
  write_text(dir / "rmse.csv", rmse);
  write_text(dir / "ratio.csv", ratio);
  std::fputs(rmse.c_str(), stdout);
  std::fputs("\nsVAR/DNS\n", stdout);
  std::fputs(ratio.c_str(), stdout);
  std::string counts;
  for (std::size_t i = 0; i < report.horizons.size(); ++i) {
    counts += fmt::format("{}h={}:{}", i ? " " : "", report.horizons[i], report.counts[i]);
  }
  spdlog::info("forecasts per horizon {}; mean lambda {}; {} s", counts, g6(report.mean_lambda), g6(report.seconds));
  return 0;
}

}  // namespace svar::app
