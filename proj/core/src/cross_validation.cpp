#include <algorithm>
#include <numeric>

#include "svar/rng.hpp"
#include "svar/solver.hpp"

namespace svar {

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed,
                                      FoldScheme scheme) {
  if (folds < 2) throw ConfigurationError("cross-validation needs at least 2 folds");
  if (folds > n) throw ConfigurationError("more folds than regression rows leaves a fold empty");
  std::vector<std::size_t> label(n);
  if (scheme == FoldScheme::Contiguous) {
    for (std::size_t i = 0; i < n; ++i) label[i] = i * folds / n;
    return label;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t pos = 0; pos < n; ++pos) label[order[pos]] = pos % folds;
  return label;
}

CvResult cross_validate(const Regression& reg, const WeightingMatrix& w, const PenaltySpec& base_spec,
                        const FitConfig& config, std::size_t folds, std::uint64_t seed) {
  config.validate();
  const auto n = static_cast<std::size_t>(reg.X.rows());
  const std::vector<std::size_t> label = assign_folds(n, folds, seed, config.fold_scheme);
  const Moments full = Moments::from(reg.X, reg.Y);

  FitConfig grid_config = config;
  if (grid_config.lambda_grid.empty()) {
    grid_config.lambda_grid =
        log_lambda_grid(lambda_max(full, w, config.standardize), config.n_lambda, config.lambda_min_ratio);
  }
  const std::vector<double>& grid = grid_config.lambda_grid;

  CvResult out;
  out.lambdas = grid;
  out.cv_loss.assign(grid.size(), 0.0);

  std::vector<std::vector<std::size_t>> rows(folds);
  for (std::size_t i = 0; i < n; ++i) rows[label[i]].push_back(i);

  for (std::size_t f = 0; f < folds; ++f) {
    if (rows[f].empty()) throw ConfigurationError("cross-validation fold has no rows");
    const Moments held = Moments::from_rows(reg.X, reg.Y, rows[f]);
    const Moments train = full.without(held);
    const std::vector<FitResult> path = fit_path(train, w, base_spec, grid_config);
    for (std::size_t l = 0; l < path.size(); ++l) {
      out.cv_loss[l] -= loglik(path[l].theta, held, w) * held.n;
    }
  }
  for (double& loss : out.cv_loss) loss /= static_cast<double>(n);

  out.best_index = static_cast<std::size_t>(
      std::distance(out.cv_loss.begin(), std::min_element(out.cv_loss.begin(), out.cv_loss.end())));
  out.best_lambda = grid[out.best_index];
  out.fit = fit_path(full, w, base_spec, grid_config, out.best_index).back();
  return out;
}

CvResult cross_validate(const TimeSeriesData& data, std::size_t r, const WeightingMatrix& w,
                        const PenaltySpec& base_spec, const FitConfig& config, std::size_t folds,
                        std::uint64_t seed) {
  return cross_validate(build_regression(data, r), w, base_spec, config, folds, seed);
}

}  // namespace svar
