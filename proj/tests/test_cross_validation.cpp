#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "svar/montecarlo.hpp"
#include "svar/rng.hpp"
#include "svar/solver.hpp"

using namespace svar;

TEST_SUITE("cross_validation") {

TEST_CASE("fold assignment") {
  const auto folds = assign_folds(103, 10, 42);
  REQUIRE(folds.size() == 103);
  std::vector<std::size_t> counts(10, 0);
  for (std::size_t f : folds) {
    REQUIRE(f < 10);
    ++counts[f];
  }
  CHECK(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) <= 1);
  CHECK(assign_folds(103, 10, 42) == folds);
  CHECK(assign_folds(103, 10, 43) != folds);

  const auto blocks = assign_folds(25, 5, 1, FoldScheme::Contiguous);
  CHECK(std::is_sorted(blocks.begin(), blocks.end()));
  CHECK(blocks.front() == 0);
  CHECK(blocks.back() == 4);
}

TEST_CASE("pure noise selects heavy shrinkage") {
  const TimeSeriesData d = simulate(VarParams::zeros(4, 2), NoiseSpec(Matrix::Identity(4, 4), 123), 200);
  const CvResult cv = cross_validate(d, 2, WeightingMatrix::identity(4), PenaltySpec::lasso(0), {}, 10, 7);
  REQUIRE(cv.lambdas.size() == 100);
  CHECK(cv.cv_loss.size() == cv.lambdas.size());
  CHECK(cv.best_index < 10);
  CHECK(cv.best_lambda == cv.lambdas[cv.best_index]);
  CHECK(cv.cv_loss[cv.best_index] == *std::min_element(cv.cv_loss.begin(), cv.cv_loss.end()));
  CHECK(cv.fit.lambda == cv.best_lambda);
}

TEST_CASE("leave-one-out and invalid folds") {
  const TimeSeriesData d = simulate(reference_design(), NoiseSpec(reference_noise_factor(), 4), 60);
  FitConfig cfg;
  cfg.n_lambda = 15;
  const CvResult loo = cross_validate(d, 2, WeightingMatrix::identity(8), PenaltySpec::scad(0, 3.7), cfg, 58, 1);
  CHECK(loo.cv_loss.size() == 15);
  for (double l : loo.cv_loss) CHECK(std::isfinite(l));
  CHECK_THROWS_AS(cross_validate(d, 2, WeightingMatrix::identity(8), PenaltySpec::lasso(0), cfg, 1, 1),
                  ConfigurationError);
  CHECK_THROWS_AS(cross_validate(d, 2, WeightingMatrix::identity(8), PenaltySpec::lasso(0), cfg, 59, 1),
                  ConfigurationError);
}

TEST_CASE("cross-validation is deterministic in the seed") {
  const TimeSeriesData d = simulate(reference_design(), NoiseSpec(reference_noise_factor(), 10), 150);
  FitConfig cfg;
  cfg.n_lambda = 20;
  const auto a = cross_validate(d, 2, WeightingMatrix::identity(8), PenaltySpec::mcp(0, 20.0), cfg, 10, 5);
  const auto b = cross_validate(d, 2, WeightingMatrix::identity(8), PenaltySpec::mcp(0, 20.0), cfg, 10, 5);
  CHECK(a.cv_loss == b.cv_loss);
  CHECK(a.fit.theta == b.fit.theta);
}

TEST_CASE("SCAD(20) selection on the reference design") {
  const Vector truth = reference_design().theta();
  double total = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = derive_seed(99, {static_cast<std::uint64_t>(s)});
    const TimeSeriesData d = simulate(reference_design(), NoiseSpec(reference_noise_factor(), seed), 300);
    const CvResult cv = cross_validate(d, 2, WeightingMatrix::identity(8), PenaltySpec::scad(0, 20.0), {}, 10,
                                       derive_seed(seed, {1}));
    total += compute_metrics({cv.fit.theta}, truth).mssc_overall;
  }
  CHECK(total / seeds >= 0.80);
}

}
