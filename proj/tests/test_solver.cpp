#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "svar/solver.hpp"

using namespace svar;

namespace {

Regression reference_sample(std::size_t T, std::uint64_t seed) {
  return build_regression(simulate(reference_design(), NoiseSpec(reference_noise_factor(), seed), T), 2);
}

IndexSet all_indices(std::size_t p) {
  IndexSet out(p);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

FitConfig tight() {
  FitConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 200000;
  return cfg;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("univariate update examples") {
  CHECK(univariate_update(1.0, 1.0, PenaltySpec::lasso(0.3)) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(univariate_update(-1.0, 1.0, PenaltySpec::lasso(0.3)) == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK(univariate_update(0.2, 1.0, PenaltySpec::lasso(0.3)) == 0.0);
  for (const PenaltySpec& spec : {PenaltySpec::lasso(0.5), PenaltySpec::scad(0.5, 2.5), PenaltySpec::mcp(0.5, 1.5)}) {
    CHECK(univariate_update(0.0, 0.1, spec) == 0.0);
    CHECK(univariate_update(0.0, 10.0, spec) == 0.0);
    CHECK_THROWS_AS(univariate_update(1.0, 0.0, spec), DomainError);
    CHECK_THROWS_AS(univariate_update(1.0, -1.0, spec), DomainError);
  }
  // Beyond a*lambda SCAD and MCP leave z untouched.
  CHECK(univariate_update(5.0, 1.0, PenaltySpec::scad(1.0, 3.7)) == 5.0);
  CHECK(univariate_update(-4.0, 2.0, PenaltySpec::mcp(1.0, 3.0)) == -4.0);
  // MCP firm threshold in the convex regime.
  CHECK(univariate_update(1.5, 1.0, PenaltySpec::mcp(1.0, 3.0)) == doctest::Approx(0.5 / (1.0 - 1.0 / 3.0)));
}

TEST_CASE("univariate update is the global minimizer (grid oracle)") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 60; ++rep) {
    const double z = (unit(rng) - 0.5) * 6.0;
    const double v = 0.05 + 3.0 * unit(rng);
    const double l = 0.05 + unit(rng);
    const PenaltySpec spec = rep % 2 == 0 ? PenaltySpec::scad(l, 2.01 + 10.0 * unit(rng))
                                          : PenaltySpec::mcp(l, 1.0 + 10.0 * unit(rng));
    const double bound = 2.0 * std::abs(z) + 1.0;
    const double coarse = oracle::grid_argmin(z, v, spec, -bound, bound, 1e-3);
    const double fine = oracle::grid_argmin(z, v, spec, coarse - 2e-3, coarse + 2e-3, 1e-7);
    const double got = univariate_update(z, v, spec);
    const auto obj = [&](double t) { return 0.5 * v * (t - z) * (t - z) + penalty_value(spec, t); };
    CHECK(obj(got) <= obj(fine) + 1e-12);
    CHECK(std::abs(got - fine) < 2e-6);
  }
}

TEST_CASE("lambda_max") {
  Matrix x(2, 1);
  x << 1.0, -1.0;
  Matrix y(2, 1);
  y << 1.0, 1.0;
  CHECK(lambda_max(x, y, WeightingMatrix::identity(1), false) == 0.0);
  CHECK(lambda_max(x, Matrix::Zero(2, 1), WeightingMatrix::identity(1)) == 0.0);

  std::mt19937_64 rng(9);
  const Matrix X = oracle::random_matrix(rng, 30, 2);
  const Matrix Y = oracle::random_matrix(rng, 30, 2);
  const WeightingMatrix w(oracle::random_pd(rng, 2));
  const Vector s0 = score(Vector::Zero(4), X, Y, w);
  CHECK(lambda_max(X, Y, w, false) == doctest::Approx(s0.cwiseAbs().maxCoeff()).epsilon(1e-13));

  const Moments m = Moments::from(X, Y);
  for (const PenaltySpec& base : {PenaltySpec::lasso(0), PenaltySpec::scad(0, 3.7), PenaltySpec::mcp(0, 2.0)}) {
    for (bool standardize : {false, true}) {
      const double lmax = lambda_max(m, w, standardize);
      FitConfig cfg;
      cfg.standardize = standardize;
      CHECK(fit_at_lambda(m, w, base.with_lambda(lmax * (1.0 + 1e-6)), cfg).support.empty());
      CHECK_FALSE(fit_at_lambda(m, w, base.with_lambda(lmax * 0.9), cfg).support.empty());
      cfg.lambda_grid = {lmax * 1.01};
      const auto path = fit_path(m, w, base, cfg);
      REQUIRE(path.size() == 1);
      CHECK(path[0].support.empty());
    }
  }
}

TEST_CASE("zero penalty reproduces least squares") {
  const Regression reg = reference_sample(300, 12);
  const Moments m = Moments::from(reg.X, reg.Y);
  for (const WeightingMatrix& w : {WeightingMatrix::identity(8), WeightingMatrix(reference_noise_factor() * reference_noise_factor().transpose())}) {
    const Vector ols = oracle_fit(m, w, all_indices(128)).theta;
    for (const PenaltySpec& spec : {PenaltySpec::lasso(0), PenaltySpec::scad(0), PenaltySpec::mcp(0)}) {
      for (bool standardize : {false, true}) {
        FitConfig cfg = tight();
        cfg.standardize = standardize;
        const FitResult fit = coordinate_descent(m, w, spec, Vector(), cfg);
        CHECK(fit.converged);
        CHECK((fit.theta - ols).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
    CHECK(score(ols, m, w).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("two-parameter SCAD problem matches a brute-force grid") {
  const VarParams ar2({Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, -0.3)});
  const Regression reg = build_regression(simulate(ar2, NoiseSpec(Matrix::Identity(1, 1), 77), 200), 2);
  const Moments m = Moments::from(reg.X, reg.Y);
  const PenaltySpec spec = PenaltySpec::scad(0.1, 3.7);
  FitConfig cfg = tight();
  cfg.standardize = false;
  const FitResult fit = coordinate_descent(m, WeightingMatrix::identity(1), spec, Vector(), cfg);

  const auto neg_q = [&](double b1, double b2) {
    const double fit_xy = b1 * m.xy(0, 0) + b2 * m.xy(1, 0);
    const double quad = b1 * b1 * m.xx(0, 0) + 2.0 * b1 * b2 * m.xx(0, 1) + b2 * b2 * m.xx(1, 1);
    return 0.5 * (m.yy(0, 0) - 2.0 * fit_xy + quad) + penalty_value(spec, b1) + penalty_value(spec, b2);
  };
  const auto search = [&](double c1, double c2, double half, double step) {
    std::pair<double, double> best{c1, c2};
    double best_val = neg_q(c1, c2);
    const auto n = static_cast<int>(std::lround(half / step));
    for (int a = -n; a <= n; ++a) {
      for (int b = -n; b <= n; ++b) {
        const double t1 = c1 + a * step;
        const double t2 = c2 + b * step;
        const double val = neg_q(t1, t2);
        if (val < best_val) {
          best_val = val;
          best = {t1, t2};
        }
      }
    }
    return best;
  };
  const auto coarse = search(0.0, 0.0, 1.5, 1e-2);
  const auto fine = search(coarse.first, coarse.second, 2e-2, 1e-4);
  CHECK(std::abs(fit.theta(0) - fine.first) < 5e-4);
  CHECK(std::abs(fit.theta(1) - fine.second) < 5e-4);
  CHECK(neg_q(fit.theta(0), fit.theta(1)) <= neg_q(fine.first, fine.second) + 1e-12);
}

TEST_CASE("coordinatewise optimality and objective monotonicity") {
  const Regression reg = reference_sample(300, 21);
  const Moments m = Moments::from(reg.X, reg.Y);
  const WeightingMatrix eye = WeightingMatrix::identity(8);
  const WeightingMatrix gls(reference_noise_factor() * reference_noise_factor().transpose());
  std::mt19937_64 rng(6);
  for (const WeightingMatrix* w : {&eye, &gls}) {
    for (const PenaltySpec& spec : {PenaltySpec::lasso(0.03), PenaltySpec::scad(0.05, 3.7), PenaltySpec::scad(0.05, 20.0),
                                    PenaltySpec::mcp(0.05, 1.5), PenaltySpec::mcp(0.05, 20.0)}) {
      FitConfig cfg;
      cfg.standardize = false;
      const Vector init = 0.1 * oracle::random_matrix(rng, 128, 1);
      const FitResult fit = coordinate_descent(m, *w, spec, init, cfg);
      REQUIRE(fit.converged);
      const Vector S = score(fit.theta, m, *w);
      for (Eigen::Index j = 0; j < 128; ++j) {
        const double v = m.xx(j / 8, j / 8) * w->inverse()(j % 8, j % 8);
        CHECK(std::abs(univariate_update(fit.theta(j) + S(j) / v, v, spec) - fit.theta(j)) <= cfg.tol);
      }
      const double q = penalized_objective(fit.theta, m, *w, spec, false);
      CHECK(q == doctest::Approx(fit.objective).epsilon(1e-12));
      CHECK(q >= penalized_objective(Vector::Zero(128), m, *w, spec, false));
      CHECK(q >= penalized_objective(init, m, *w, spec, false));
      CHECK(fit.support == support_of(fit.theta));
      CHECK(fit.n_iter <= cfg.max_iter);
    }
  }
}

TEST_CASE("permutation invariance") {
  const TimeSeriesData d = simulate(reference_design(), NoiseSpec(reference_noise_factor(), 3), 300);
  const std::vector<Eigen::Index> perm{3, 7, 0, 5, 1, 6, 2, 4};
  Matrix permuted(d.values.rows(), 8);
  for (Eigen::Index j = 0; j < 8; ++j) permuted.col(j) = d.values.col(perm[static_cast<std::size_t>(j)]);
  const Moments m0 = Moments::from(build_regression(d.values, 2).X, build_regression(d.values, 2).Y);
  const Regression rp = build_regression(permuted, 2);
  const Moments m1 = Moments::from(rp.X, rp.Y);
  for (const PenaltySpec& spec : {PenaltySpec::lasso(0.05), PenaltySpec::scad(0.08, 3.7)}) {
    const Matrix B0 = theta_to_coefficients(fit_at_lambda(m0, WeightingMatrix::identity(8), spec, tight()).theta, 8);
    const Matrix B1 = theta_to_coefficients(fit_at_lambda(m1, WeightingMatrix::identity(8), spec, tight()).theta, 8);
    double worst = 0.0;
    for (Eigen::Index lag = 0; lag < 2; ++lag) {
      for (Eigen::Index v = 0; v < 8; ++v) {
        for (Eigen::Index e = 0; e < 8; ++e) {
          worst = std::max(worst, std::abs(B1(lag * 8 + v, e) - B0(lag * 8 + perm[static_cast<std::size_t>(v)],
                                                                   perm[static_cast<std::size_t>(e)])));
        }
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("lambda path") {
  const Regression reg = reference_sample(500, 5);
  const Moments m = Moments::from(reg.X, reg.Y);
  const WeightingMatrix w = WeightingMatrix::identity(8);
  FitConfig cfg;
  const auto path = fit_path(m, w, PenaltySpec::lasso(0), cfg);
  REQUIRE(path.size() == 100);
  CHECK(path.front().support.empty());
  std::size_t shrinks = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    CHECK(path[i].lambda < path[i - 1].lambda);
    shrinks += path[i].support.size() < path[i - 1].support.size() ? 1 : 0;
  }
  // Correlated lags can drop a coordinate briefly; the path still grows overall.
  CHECK(shrinks <= 5);
  CHECK(path.back().support.size() > path[50].support.size());

  // With orthonormal regressors the lasso is a soft threshold, so supports nest exactly.
  Matrix Q = Eigen::HouseholderQR<Matrix>(reg.X.leftCols(6)).householderQ() * Matrix::Identity(reg.X.rows(), 6);
  Q *= std::sqrt(static_cast<double>(Q.rows()));
  const Moments orth = Moments::from(Q, reg.Y);
  const auto nested = fit_path(orth, w, PenaltySpec::lasso(0), cfg);
  for (std::size_t i = 1; i < nested.size(); ++i) {
    for (std::size_t j : nested[i - 1].support) {
      CHECK(std::binary_search(nested[i].support.begin(), nested[i].support.end(), j));
    }
  }
  CHECK(path.back().lambda == doctest::Approx(path.front().lambda * 1e-3));

  FitConfig to_zero = tight();
  to_zero.lambda_grid = log_lambda_grid(lambda_max(m, w), 30, 1e-4);
  to_zero.lambda_grid.push_back(0.0);
  const auto full = fit_path(m, w, PenaltySpec::scad(0, 3.7), to_zero);
  const Vector ols = oracle_fit(m, w, all_indices(128)).theta;
  CHECK((full.back().theta - ols).cwiseAbs().maxCoeff() < 1e-4);

  const auto grid = log_lambda_grid(2.0, 5, 0.01);
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == 2.0);
  CHECK(grid.back() == doctest::Approx(0.02));
  CHECK(log_lambda_grid(0.0, 5, 0.01) == std::vector<double>{0.0});

  FitConfig bad;
  bad.lambda_grid = {0.1, 0.2};
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);
  bad.lambda_grid = {};
  bad.tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);
}

TEST_CASE("oracle fit") {
  const Regression reg = reference_sample(400, 8);
  const WeightingMatrix w = WeightingMatrix::identity(8);
  CHECK(oracle_fit(reg.X, reg.Y, w, {}).theta.isZero(0.0));
  const Matrix B = reg.X.colPivHouseholderQr().solve(reg.Y);
  CHECK((oracle_fit(reg.X, reg.Y, w, all_indices(128)).theta - coefficients_to_theta(B)).cwiseAbs().maxCoeff() < 1e-10);

  const IndexSet truth = support_of(reference_design().theta());
  const FitResult restricted = oracle_fit(reg.X, reg.Y, w, truth);
  CHECK(restricted.support.size() <= truth.size());
  const Vector s = score(restricted.theta, reg.X, reg.Y, w);
  for (std::size_t j : truth) CHECK(std::abs(s(static_cast<Eigen::Index>(j))) < 1e-10);

  Matrix Xs = reg.X;
  Xs.col(1) = Xs.col(0);
  CHECK_THROWS_AS(oracle_fit(Xs, reg.Y, w, IndexSet{0, 8}), RankDeficiencyError);
}

TEST_CASE("unpenalized maximizer does not depend on the weighting") {
  std::mt19937_64 rng(14);
  const Regression reg = reference_sample(300, 14);
  const Vector ols = oracle_fit(reg.X, reg.Y, WeightingMatrix::identity(8), all_indices(128)).theta;
  for (int rep = 0; rep < 5; ++rep) {
    const WeightingMatrix w(oracle::random_pd(rng, 8));
    CHECK((oracle_fit(reg.X, reg.Y, w, all_indices(128)).theta - ols).cwiseAbs().maxCoeff() < 1e-8);
  }
  const IndexSet truth = support_of(reference_design().theta());
  const Matrix sig = reference_noise_factor() * reference_noise_factor().transpose();
  const Vector ls = oracle_fit(reg.X, reg.Y, WeightingMatrix::identity(8), truth).theta;
  const Vector gls = oracle_fit(reg.X, reg.Y, WeightingMatrix(sig), truth).theta;
  CHECK((ls - gls).cwiseAbs().maxCoeff() > 1e-4);
}

TEST_CASE("certificate at a converged SCAD fit") {
  const Regression reg = reference_sample(500, 2);
  const Moments m = Moments::from(reg.X, reg.Y);
  const WeightingMatrix w = WeightingMatrix::identity(8);
  const PenaltySpec spec = PenaltySpec::scad(0.1, 20.0);
  const FitResult fit = fit_at_lambda(m, w, spec);
  REQUIRE(fit.converged);
  const CertificateReport cert = certify_fit(fit, m, w, spec, true);
  CHECK(cert.stationarity_gap < 1e-6);
  CHECK(cert.inactive_margin > 0.0);
  CHECK(cert.eigen_margin > 0.0);
  CHECK(cert.passed);
}

}
