#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "svar/moments.hpp"
#include "svar/penalties.hpp"
#include "svar/qml.hpp"
#include "svar/types.hpp"
#include "svar/var_model.hpp"

namespace svar {

enum class FoldScheme { Random, Contiguous };

struct FitConfig {
  /// Strictly descending; empty means n_lambda log-spaced points from lambda_max.
  std::vector<double> lambda_grid;
  std::size_t n_lambda = 100;
  double lambda_min_ratio = 1e-3;
  std::size_t max_iter = 10000;
  /// Convergence threshold on the largest coefficient change in a sweep.
  double tol = 1e-7;
  /// Scale regressors to unit second moment; lambda then lives on that scale.
  bool standardize = true;
  FoldScheme fold_scheme = FoldScheme::Random;

  void validate() const;
};

struct FitResult {
  Vector theta;
  IndexSet support;
  double lambda = 0.0;
  std::size_t n_iter = 0;
  bool converged = false;
  /// Q_T = L_T - sum_j p_lambda(|theta_j|), penalty on the fitted (possibly standardized) scale.
  double objective = 0.0;
  std::optional<CertificateReport> certificate;
};

/**
 * argmin over theta of v/2 (theta - z)^2 + p_lambda(|theta|).
 *
 * Every smooth piece of the penalty is minimized in closed form and the best
 * candidate wins, so the result is the global minimizer even when v is small
 * enough to make the scalar problem nonconvex. Exact ties go to the candidate
 * closest to zero. Throws DomainError for v <= 0.
 */
double univariate_update(double z, double v, const PenaltySpec& spec);

/// Smallest lambda at which theta = 0 satisfies the inactive-score condition: ||S_T(0)||_inf.
double lambda_max(const Matrix& X, const Matrix& Y, const WeightingMatrix& w, bool standardize = true);
double lambda_max(const Moments& m, const WeightingMatrix& w, bool standardize = true);

/// n log-spaced values from lmax down to ratio * lmax; {0} when lmax is 0.
std::vector<double> log_lambda_grid(double lmax, std::size_t n, double ratio);

/// Q_T at theta for the scale the fit used (scale = 1 when not standardizing).
double penalized_objective(const Vector& theta, const Moments& m, const WeightingMatrix& w,
                           const PenaltySpec& spec, bool standardize);

/// Cyclic coordinate descent on -Q_T from `init` (raw scale, zero-length means zeros).
FitResult coordinate_descent(const Matrix& X, const Matrix& Y, const WeightingMatrix& w,
                             const PenaltySpec& spec, const Vector& init,
                             const FitConfig& config = {});
FitResult coordinate_descent(const Moments& m, const WeightingMatrix& w, const PenaltySpec& spec,
                             const Vector& init, const FitConfig& config = {});

/// Warm-started fits along the (descending) lambda grid, starting from zero.
std::vector<FitResult> fit_path(const Matrix& X, const Matrix& Y, const WeightingMatrix& w,
                                const PenaltySpec& base_spec, const FitConfig& config = {});
std::vector<FitResult> fit_path(const Moments& m, const WeightingMatrix& w,
                                const PenaltySpec& base_spec, const FitConfig& config = {},
                                std::size_t stop_after = SIZE_MAX);

/**
 * Fit at spec.lambda() warm-started from lambda_max. With path_points < 2 the
 * path is the part of the default grid above the target; otherwise it is
 * path_points log-spaced values ending at the target.
 */
FitResult fit_at_lambda(const Moments& m, const WeightingMatrix& w, const PenaltySpec& spec,
                        const FitConfig& config = {}, std::size_t path_points = 0);

/// Unpenalized weighted least squares on `support`, zeros elsewhere.
FitResult oracle_fit(const Matrix& X, const Matrix& Y, const WeightingMatrix& w, const IndexSet& support);
FitResult oracle_fit(const Moments& m, const WeightingMatrix& w, const IndexSet& support);

/// Lemma-style certificate for a fit, evaluated on the scale the fit penalized.
CertificateReport certify_fit(const FitResult& fit, const Moments& m, const WeightingMatrix& w,
                              const PenaltySpec& spec, bool standardize, double tol = 1e-6);

/// Fold label in [0, folds) for each of n rows.
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed,
                                      FoldScheme scheme = FoldScheme::Random);

struct CvResult {
  double best_lambda = 0.0;
  std::size_t best_index = 0;
  std::vector<double> lambdas;
  /// Held-out -L_T per lambda, pooled over all held-out rows.
  std::vector<double> cv_loss;
  /// Full-data fit at best_lambda (warm-started along the grid).
  FitResult fit;
};

CvResult cross_validate(const Regression& reg, const WeightingMatrix& w, const PenaltySpec& base_spec,
                        const FitConfig& config = {}, std::size_t folds = 10, std::uint64_t seed = 0);
CvResult cross_validate(const TimeSeriesData& data, std::size_t r, const WeightingMatrix& w,
                        const PenaltySpec& base_spec, const FitConfig& config = {},
                        std::size_t folds = 10, std::uint64_t seed = 0);

}  // namespace svar
