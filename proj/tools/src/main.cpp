#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "svar_app/commands.hpp"
#include "svar_app/config.hpp"

namespace {

template <class T>
void apply(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

template <class T>
void apply(const std::optional<T>& flag, std::optional<T>& target) {
  if (flag) target = *flag;
}

struct Overrides {
  std::string config_path;
  bool print_config = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> log_level;

  std::optional<std::size_t> sim_T, sim_burn_in;
  std::optional<std::string> sim_output;

  std::optional<std::string> fit_input, fit_output, fit_penalty, fit_long_run;
  std::optional<std::size_t> fit_lags;
  std::optional<double> fit_a, fit_lambda;
  bool fit_certificate = false;
  bool fit_covariance = false;

  std::optional<std::string> cv_input, cv_output, cv_penalty;
  std::optional<std::size_t> cv_lags, cv_folds;
  std::optional<double> cv_a;

  std::optional<std::vector<std::size_t>> mc_sizes;
  std::optional<std::size_t> mc_reps, mc_folds;
  std::optional<std::vector<std::string>> mc_estimators;
  std::optional<std::string> mc_tuning, mc_output, mc_table;
  std::optional<double> mc_lambda;

  std::optional<std::string> fc_input, fc_start, fc_end, fc_output_dir;
  std::optional<std::vector<std::size_t>> fc_horizons;
  std::optional<double> fc_tau, fc_lambda;
  std::optional<std::size_t> fc_lags;
};

void apply_all(const Overrides& o, svar::app::RunConfig& c) {
  apply(o.seed, c.general.seed);
  apply(o.threads, c.general.threads);
  apply(o.log_level, c.general.log_level);

  apply(o.sim_T, c.simulate.T);
  apply(o.sim_burn_in, c.simulate.burn_in);
  apply(o.sim_output, c.simulate.output);

  apply(o.fit_input, c.fit.input);
  apply(o.fit_output, c.fit.output);
  apply(o.fit_penalty, c.fit.penalty.kind);
  apply(o.fit_a, c.fit.penalty.a);
  apply(o.fit_lags, c.fit.lags);
  apply(o.fit_lambda, c.fit.lambda);
  apply(o.fit_long_run, c.fit.long_run);
  if (o.fit_certificate) c.fit.certificate = true;
  if (o.fit_covariance) c.fit.covariance = true;

  apply(o.cv_input, c.cv.input);
  apply(o.cv_output, c.cv.output);
  apply(o.cv_penalty, c.cv.penalty.kind);
  apply(o.cv_a, c.cv.penalty.a);
  apply(o.cv_lags, c.cv.lags);
  apply(o.cv_folds, c.cv.folds);

  apply(o.mc_sizes, c.montecarlo.sample_sizes);
  apply(o.mc_reps, c.montecarlo.replications);
  apply(o.mc_folds, c.montecarlo.folds);
  apply(o.mc_estimators, c.montecarlo.estimators);
  apply(o.mc_tuning, c.montecarlo.tuning);
  apply(o.mc_lambda, c.montecarlo.lambda);
  apply(o.mc_output, c.montecarlo.output);
  apply(o.mc_table, c.montecarlo.table);

  apply(o.fc_input, c.forecast.input);
  apply(o.fc_start, c.forecast.start);
  apply(o.fc_end, c.forecast.end);
  apply(o.fc_output_dir, c.forecast.output_dir);
  apply(o.fc_horizons, c.forecast.horizons);
  apply(o.fc_tau, c.forecast.tau_medium);
  apply(o.fc_lambda, c.forecast.lambda);
  apply(o.fc_lags, c.forecast.lags);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse VAR estimation by penalized quasi-maximum likelihood"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config_path, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_flag("--print-config", o.print_config, "Print the effective configuration and exit");
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("-j,--threads", o.threads, "Worker threads");
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off (default from SVAR_LOG_LEVEL)");

  auto* sim = app.add_subcommand("simulate", "Simulate the reference sparse VAR(2) to CSV");
  sim->add_option("-T,--length", o.sim_T, "Observations to keep");
  sim->add_option("--burn-in", o.sim_burn_in, "Discarded initial observations");
  sim->add_option("-o,--output", o.sim_output, "Output CSV");

  auto* fit = app.add_subcommand("fit", "Penalized fit at one lambda");
  fit->add_option("-i,--input", o.fit_input, "Input CSV");
  fit->add_option("-r,--lags", o.fit_lags, "Lag order");
  fit->add_option("-p,--penalty", o.fit_penalty, "scad|mcp|lasso");
  fit->add_option("-a,--shape", o.fit_a, "Penalty shape parameter");
  fit->add_option("-l,--lambda", o.fit_lambda, "Tuning parameter (standardized scale)");
  fit->add_flag("--certificate", o.fit_certificate, "Check the local-maximizer conditions");
  fit->add_flag("--covariance", o.fit_covariance, "Sandwich covariance on the support");
  fit->add_option("--long-run", o.fit_long_run, "outer-product|bartlett");
  fit->add_option("-o,--output", o.fit_output, "Output JSON");

  auto* cv = app.add_subcommand("cv", "Cross-validated lambda and fit");
  cv->add_option("-i,--input", o.cv_input, "Input CSV");
  cv->add_option("-r,--lags", o.cv_lags, "Lag order");
  cv->add_option("-p,--penalty", o.cv_penalty, "scad|mcp|lasso");
  cv->add_option("-a,--shape", o.cv_a, "Penalty shape parameter");
  cv->add_option("-k,--folds", o.cv_folds, "Number of folds");
  cv->add_option("-o,--output", o.cv_output, "Output JSON");

  auto* mc = app.add_subcommand("montecarlo", "Estimation accuracy experiment");
  mc->add_option("--sizes", o.mc_sizes, "Sample sizes");
  mc->add_option("-R,--replications", o.mc_reps, "Replications per sample size");
  mc->add_option("--estimators", o.mc_estimators, "e.g. oracle mle scad(20) lasso");
  mc->add_option("--tuning", o.mc_tuning, "full-cv|pilot|fixed");
  mc->add_option("-l,--lambda", o.mc_lambda, "Lambda for fixed tuning");
  mc->add_option("-k,--folds", o.mc_folds, "Number of folds");
  mc->add_option("-o,--output,--out", o.mc_output, "Output JSON");
  mc->add_option("--table", o.mc_table, "Output text table");

  auto* fc = app.add_subcommand("forecast", "Rolling sVAR versus DNS yield forecasts");
  fc->add_option("-i,--input", o.fc_input, "Yield CSV (date, then one column per maturity)");
  fc->add_option("--start", o.fc_start, "First forecast origin, YYYY-MM");
  fc->add_option("--end", o.fc_end, "Last realized month, YYYY-MM");
  fc->add_option("--horizons", o.fc_horizons, "Forecast horizons in months");
  fc->add_option("--tau-medium", o.fc_tau, "Maturity whose curvature loading sets eta");
  fc->add_option("-r,--lags", o.fc_lags, "sVAR lag order");
  fc->add_option("-l,--lambda", o.fc_lambda, "Fixed lambda instead of (mT)^-0.4/4");
  fc->add_option("-o,--output-dir", o.fc_output_dir, "Directory for JSON and CSV tables");

  CLI11_PARSE(app, argc, argv);

  if (!o.log_level) {
    if (const char* env = std::getenv("SVAR_LOG_LEVEL")) o.log_level = std::string(env);
  }

  auto logger = spdlog::stderr_color_mt("svar");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  try {
    svar::app::RunConfig config = o.config_path.empty() ? svar::app::RunConfig{} : svar::app::load_config(o.config_path);
    apply_all(o, config);
    config.validate();
    spdlog::set_level(spdlog::level::from_str(config.general.log_level));
    if (o.print_config) {
      std::cout << svar::app::to_toml(config);
      return 0;
    }
    if (*sim) return svar::app::cmd_simulate(config);
    if (*fit) return svar::app::cmd_fit(config);
    if (*cv) return svar::app::cmd_cv(config);
    if (*mc) return svar::app::cmd_montecarlo(config);
    if (*fc) return svar::app::cmd_forecast(config);
  } catch (const std::exception& ex) {
    spdlog::error("{}", ex.what());
    return 2;
  }
  return 0;
}
