#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svar/penalties.hpp"
#include "svar/solver.hpp"
#include "svar/types.hpp"
#include "svar/var_model.hpp"

namespace svar {

enum class EstimatorKind { Oracle, MLE, SCAD, MCP, Lasso };

/// One column of the accuracy table: how theta is estimated from a simulated sample.
struct Estimator {
  EstimatorKind kind = EstimatorKind::MLE;
  double a = 0.0;  ///< shape parameter for SCAD / MCP

  bool penalized() const noexcept {
    return kind == EstimatorKind::SCAD || kind == EstimatorKind::MCP || kind == EstimatorKind::Lasso;
  }
  PenaltySpec penalty(double lambda) const;
  /// "oracle", "mle", "lasso", "scad(2.5)", "mcp(20)".
  std::string label() const;
  static Estimator parse(std::string_view text);

  friend bool operator==(const Estimator&, const Estimator&) = default;
};

/// Oracle, MLE, SCAD(2.5), SCAD(20), MCP(1.5), MCP(20), Lasso.
std::vector<Estimator> default_estimators();

enum class TuningMode {
  FullCv,  ///< cross-validate lambda in every replication
  Pilot,   ///< cross-validate once per (T, estimator) on a pilot sample, then reuse lambda
  Fixed,   ///< use ExperimentSpec::lambda throughout
};

std::string to_string(TuningMode mode);
TuningMode parse_tuning_mode(std::string_view text);

struct ExperimentSpec {
  VarParams var_params = reference_design();
  Matrix noise_factor = reference_noise_factor();
  std::vector<std::size_t> sample_sizes{100, 300, 500, 1000};
  std::size_t replications = 1000;
  std::vector<Estimator> estimators = default_estimators();
  TuningMode tuning = TuningMode::FullCv;
  std::optional<double> lambda;  ///< required when tuning == Fixed
  std::size_t folds = 10;
  std::uint64_t master_seed = 20150101;
  std::size_t burn_in = kDefaultBurnIn;
  std::size_t threads = 1;
  FitConfig fit;

  bool cv() const noexcept { return tuning != TuningMode::Fixed; }
  void validate() const;
};

struct Replication {
  Vector theta_hat;
  Vector theta_true;
  double lambda = 0.0;
};

/// Seed of the simulated sample for (T, replication); shared by every estimator.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t T, std::size_t replication);

/// Estimate theta on an already simulated sample. `lambda` overrides tuning when given.
Replication fit_estimator(const ExperimentSpec& spec, const TimeSeriesData& data, const Estimator& estimator,
                          std::uint64_t seed, std::optional<double> lambda = std::nullopt);

/// Simulate with `seed`, tune if configured, and fit.
Replication replicate_once(const ExperimentSpec& spec, std::size_t T, const Estimator& estimator,
                           std::uint64_t seed);

struct Metrics {
  double rmse = 0.0;
  double stdev = 0.0;
  double mssc_overall = 0.0;
  double mssc_nonzero = 0.0;
  double mssc_zero = 0.0;
};

Metrics compute_metrics(const std::vector<Vector>& estimates, const Vector& theta_true);

struct ExperimentCell {
  std::size_t T = 0;
  Estimator estimator;
  Metrics metrics;
  std::size_t replications = 0;  ///< successful replications entering the metrics
  std::size_t failures = 0;
  std::vector<std::string> errors;  ///< first few failure messages
  double mean_lambda = 0.0;
  std::optional<double> pilot_lambda;
  double seconds = 0.0;  ///< summed fit time; excluded from reproducibility comparisons
};

struct ExperimentReport {
  std::uint64_t master_seed = 0;
  std::vector<ExperimentCell> cells;
  double total_seconds = 0.0;

  const ExperimentCell& at(std::size_t T, const Estimator& estimator) const;
  std::size_t failures() const;
};

ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Aligned text rendering: rows T x metric, one column per estimator.
std::string render_table(const ExperimentReport& report);

}  // namespace svar
