#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svar/forecast.hpp"
#include "svar/montecarlo.hpp"
#include "svar/penalties.hpp"
#include "svar/solver.hpp"

namespace svar::app {

struct GeneralConfig {
  std::uint64_t seed = 20150101;
  std::size_t threads = 1;
  std::string log_level = "info";

  friend bool operator==(const GeneralConfig&, const GeneralConfig&) = default;
};

struct SolverConfig {
  std::size_t n_lambda = 100;
  double lambda_min_ratio = 1e-3;
  std::size_t max_iter = 10000;
  double tol = 1e-7;
  bool standardize = true;
  std::string fold_scheme = "random";

  FitConfig to_fit_config() const;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct PenaltyConfig {
  std::string kind = "scad";
  std::optional<double> a;

  PenaltySpec make(double lambda) const;
  friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

struct SimulateConfig {
  std::size_t T = 500;
  std::size_t burn_in = kDefaultBurnIn;
  std::string output = "simulated.csv";

  friend bool operator==(const SimulateConfig&, const SimulateConfig&) = default;
};

struct FitCommandConfig {
  std::string input;
  std::size_t lags = 2;
  PenaltyConfig penalty;
  std::optional<double> lambda;
  bool certificate = false;
  bool covariance = false;
  std::string long_run = "outer-product";
  std::string output = "fit.json";

  friend bool operator==(const FitCommandConfig&, const FitCommandConfig&) = default;
};

struct CvCommandConfig {
  std::string input;
  std::size_t lags = 2;
  PenaltyConfig penalty;
  std::size_t folds = 10;
  std::string output = "cv.json";

  friend bool operator==(const CvCommandConfig&, const CvCommandConfig&) = default;
};

struct MonteCarloConfig {
  std::vector<std::size_t> sample_sizes{100, 300, 500, 1000};
  std::size_t replications = 1000;
  std::vector<std::string> estimators{"oracle", "mle", "scad(2.5)", "scad(20)", "mcp(1.5)", "mcp(20)", "lasso"};
  std::string tuning = "full-cv";
  std::optional<double> lambda;
  std::size_t folds = 10;
  std::size_t burn_in = kDefaultBurnIn;
  std::string output = "montecarlo.json";
  std::string table = "montecarlo.txt";

  friend bool operator==(const MonteCarloConfig&, const MonteCarloConfig&) = default;
};

struct ForecastCommandConfig {
  std::string input;  ///< empty: synthetic dataset from the general seed
  std::string start = "2001-12";
  std::string end = "2007-12";
  std::vector<std::size_t> horizons{1, 3, 6, 12};
  double tau_medium = 30.0;
  std::size_t lags = 12;
  PenaltyConfig penalty;
  std::optional<double> lambda;
  std::size_t path_points = 20;
  std::string output_dir = "forecast";

  friend bool operator==(const ForecastCommandConfig&, const ForecastCommandConfig&) = default;
};

struct RunConfig {
  GeneralConfig general;
  SolverConfig solver;
  SimulateConfig simulate;
  FitCommandConfig fit;
  CvCommandConfig cv;
  MonteCarloConfig montecarlo;
  ForecastCommandConfig forecast;

  /// Checks that enumerated strings parse and numbers are in range.
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parse TOML text; unknown sections or keys are rejected.
RunConfig parse_config(std::string_view toml_text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_toml(const RunConfig& config);

ExperimentSpec make_experiment_spec(const RunConfig& config);
ForecastOptions make_forecast_options(const RunConfig& config);

}  // namespace svar::app
