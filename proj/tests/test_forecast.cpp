#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "svar/forecast.hpp"

using namespace svar;

namespace {

YieldDataset monthly(const Matrix& yields, const std::vector<int>& maturities, MonthDate first = {2000, 1}) {
  YieldDataset d;
  d.maturities = maturities;
  d.yields = yields;
  for (Eigen::Index t = 0; t < yields.rows(); ++t) d.dates.push_back(first.plus_months(t));
  return d;
}

DnsFactors factors_from(const Vector& b1, const Vector& b2, const Vector& b3) {
  return {b1, b2, b3, Vector::Constant(b1.size(), dns_select_eta(30.0))};
}

}  // namespace

TEST_SUITE("forecast") {

TEST_CASE("month dates") {
  const MonthDate d = MonthDate::parse("2001-12");
  CHECK(d.year == 2001);
  CHECK(d.month == 12);
  CHECK(MonthDate::parse("2001-12-31") == d);
  CHECK(d.plus_months(1) == MonthDate{2002, 1});
  CHECK(d.plus_months(-12) == MonthDate{2000, 12});
  CHECK(d.iso() == "2001-12-01");
  CHECK(MonthDate::parse(d.iso()) == d);
  CHECK(MonthDate{1986, 1} < d);
  CHECK_THROWS(MonthDate::parse("2001-13"));
  CHECK_THROWS(MonthDate::parse("Dec 2001"));
}

TEST_CASE("loadings") {
  const Eigen::Vector3d small = dns_loadings(0.0609, 1e-8);
  CHECK(std::abs(small(0) - 1.0) < 1e-6);
  CHECK(std::abs(small(1) - 1.0) < 1e-6);
  CHECK(std::abs(small(2)) < 1e-6);
  const Eigen::Vector3d large = dns_loadings(0.0609, 1e6);
  CHECK(large(0) == 1.0);
  CHECK(std::abs(large(1)) < 1e-4);
  CHECK(std::abs(large(2)) < 1e-4);
  CHECK_THROWS_AS(dns_loadings(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(dns_loadings(0.1, -1.0), DomainError);

  for (double c : {0.5, 2.0, 3.0}) {
    for (double tau : {3.0, 30.0, 120.0}) {
      const Eigen::Vector3d a = dns_loadings(0.0609 * c, tau / c);
      const Eigen::Vector3d b = dns_loadings(0.0609, tau);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  const double x = 1.3;
  const Eigen::Vector3d l = dns_loadings(x / 10.0, 10.0);
  CHECK(l(1) == doctest::Approx((1.0 - std::exp(-x)) / x).epsilon(1e-14));
  CHECK(l(2) == doctest::Approx((1.0 - std::exp(-x)) / x - std::exp(-x)).epsilon(1e-14));
}

TEST_CASE("eta selection") {
  const double eta = dns_select_eta(30.0);
  // Grid oracle over eta with step 1e-5.
  double best = 0.0;
  double best_val = -1.0;
  for (int i = 1; i <= 20000; ++i) {
    const double e = i * 1e-5;
    const double v = dns_loadings(e, 30.0)(2);
    if (v > best_val) {
      best_val = v;
      best = e;
    }
  }
  CHECK(std::abs(eta - best) <= 1e-5);
  CHECK(dns_loadings(eta, 30.0)(2) >= best_val);
  CHECK(std::abs(dns_select_eta(60.0) - eta / 2.0) < 1e-8);
  CHECK(std::abs(dns_select_eta(120.0) - eta / 4.0) < 1e-8);
  CHECK(eta == doctest::Approx(0.0597761).epsilon(1e-6));
}

TEST_CASE("cross-sectional fit") {
  const std::vector<int> taus{3, 6, 12, 24, 36, 60, 84, 120};
  const double eta = dns_select_eta(30.0);
  std::mt19937_64 rng(1);
  const Matrix beta = oracle::random_matrix(rng, 20, 3);
  Matrix y(20, 8);
  for (Eigen::Index t = 0; t < 20; ++t) {
    for (std::size_t j = 0; j < taus.size(); ++j) {
      y(t, static_cast<Eigen::Index>(j)) = dns_loadings(eta, taus[j]).dot(beta.row(t).transpose());
    }
  }
  const DnsFactors f = dns_fit(monthly(y, taus));
  CHECK((f.beta1 - beta.col(0)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((f.beta2 - beta.col(1)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((f.beta3 - beta.col(2)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((f.eta.array() == eta).all());

  const DnsFactors flat = dns_fit(monthly(Matrix::Constant(4, 8, 5.25), taus));
  CHECK((flat.beta1.array() - 5.25).abs().maxCoeff() < 1e-10);
  CHECK(flat.beta2.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(flat.beta3.cwiseAbs().maxCoeff() < 1e-10);

  const Matrix noisy = y + oracle::random_matrix(rng, 20, 8);
  const DnsFactors nf = dns_fit(monthly(noisy, taus));
  Matrix L(8, 3);
  for (std::size_t j = 0; j < taus.size(); ++j) L.row(static_cast<Eigen::Index>(j)) = dns_loadings(eta, taus[j]).transpose();
  for (Eigen::Index t = 0; t < 20; ++t) {
    const Vector resid = noisy.row(t).transpose() - L * nf.at(static_cast<std::size_t>(t));
    CHECK((L.transpose() * resid).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(dns_fit(monthly(Matrix::Ones(3, 2), {12, 24})), InsufficientDataError);
}

TEST_CASE("direct factor forecasts") {
  const DnsFactors constant = factors_from(Vector::Constant(30, 4.0), Vector::Constant(30, -1.0), Vector::Zero(30));
  for (std::size_t h : {1, 6, 12}) {
    const Eigen::Vector3d f = dns_forecast(constant, h);
    CHECK(f(0) == doctest::Approx(4.0));
    CHECK(f(1) == doctest::Approx(-1.0));
    CHECK(std::abs(f(2)) < 1e-14);
  }

  const double c = 0.3;
  const double phi = 0.9;
  Vector b(60);
  b(0) = 8.0;
  for (Eigen::Index t = 1; t < 60; ++t) b(t) = c + phi * b(t - 1);
  const DnsFactors ar = factors_from(b, b, b);
  for (std::size_t h : {1, 3, 6, 12}) {
    double expect = b(59);
    for (std::size_t s = 0; s < h; ++s) expect = c + phi * expect;
    const Eigen::Vector3d f = dns_forecast(ar, h);
    CHECK(f(0) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(f(2) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK_THROWS_AS(dns_forecast(ar.head(5), 4), InsufficientDataError);
  CHECK_THROWS_AS(dns_forecast(ar, 0), DomainError);

  // Noisy AR(1): forecast errors against the conditional mean are centred.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  const int sims = 400;
  const std::size_t h = 3;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < sims; ++s) {
    Vector x(300);
    x(0) = 2.0;
    for (Eigen::Index t = 1; t < 300; ++t) x(t) = 0.2 + 0.9 * x(t - 1) + 0.1 * z(rng);
    double mean = x(299);
    for (std::size_t k = 0; k < h; ++k) mean = 0.2 + 0.9 * mean;
    const double e = dns_forecast(factors_from(x, x, x), h)(0) - mean;
    sum += e;
    sum_sq += e * e;
  }
  const double avg = sum / sims;
  const double sd = std::sqrt(sum_sq / sims - avg * avg);
  CHECK(std::abs(avg) < 4.0 * sd / std::sqrt(static_cast<double>(sims)) + 0.01);
  CHECK(sd < 0.1);
}

TEST_CASE("sVAR forecast") {
  CHECK(svar_default_lambda(8, 264) == doctest::Approx(0.0116967).epsilon(1e-5));
  CHECK(svar_default_lambda(4, 100) == doctest::Approx(std::pow(400.0, -0.4) / 4.0).epsilon(1e-14));

  std::mt19937_64 rng(2);
  const Matrix levels = 5.0 + oracle::random_matrix(rng, 80, 3).array();
  SvarForecastOptions huge;
  huge.r = 2;
  huge.lambda = 1e6;
  const SvarForecast rw = svar_forecast(levels, 6, huge);
  CHECK(rw.fit.support.empty());
  for (Eigen::Index h = 0; h < 6; ++h) CHECK(rw.yields.row(h) == levels.row(79));
  CHECK(rw.differences.isZero(0.0));
  CHECK_THROWS_AS(svar_forecast(levels.topRows(3), 1, huge), InsufficientDataError);

  // h = 1 agrees with the fitted value of the stacked regression.
  SvarForecastOptions opts;
  opts.r = 2;
  opts.lambda = 0.02;
  const SvarForecast one = svar_forecast(levels, 1, opts);
  Matrix diffs = Matrix::Zero(80, 3);
  diffs.topRows(79) = levels.bottomRows(79) - levels.topRows(79);
  const Regression reg = build_regression(diffs, 2);
  const Matrix B = theta_to_coefficients(one.fit.theta, 3);
  const Vector fitted = (reg.X.row(reg.X.rows() - 1) * B).transpose();
  CHECK((one.differences.row(0).transpose() - fitted).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((one.yields.row(0).transpose() - levels.row(79).transpose() - fitted).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(one.lambda == 0.02);
}

TEST_CASE("noiseless sparse difference VAR is forecast exactly") {
  Matrix phi = Matrix::Zero(3, 3);
  const double rho = 0.97;
  const double ang = 0.4;
  phi(0, 0) = rho * std::cos(ang);
  phi(0, 1) = -rho * std::sin(ang);
  phi(1, 0) = rho * std::sin(ang);
  phi(1, 1) = rho * std::cos(ang);
  phi(2, 2) = 0.95;
  const Eigen::Index T = 70;
  const Eigen::Index H = 12;
  Matrix d(T + H, 3);
  d.row(0) << 1.0, 0.5, -1.0;
  for (Eigen::Index t = 1; t < T + H; ++t) d.row(t) = (phi * d.row(t - 1).transpose()).transpose();
  Matrix levels(T + H, 3);
  levels.row(0) = Eigen::RowVector3d(2.0, 3.0, 4.0) + d.row(0);
  for (Eigen::Index t = 1; t < T + H; ++t) levels.row(t) = levels.row(t - 1) + d.row(t);

  SvarForecastOptions opts;
  opts.r = 1;
  opts.lambda = 0.0;
  opts.fit.tol = 1e-14;
  opts.fit.max_iter = 1000000;
  const SvarForecast f = svar_forecast(levels.topRows(T), static_cast<std::size_t>(H), opts);
  CHECK((f.yields - levels.bottomRows(H)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((theta_to_coefficients(f.fit.theta, 3) - phi.transpose()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rolling evaluation") {
  const YieldDataset data = synthetic_yield_dataset();
  REQUIRE(data.length() == 264);
  CHECK(data.dates.front() == MonthDate{1986, 1});
  CHECK(data.dates.back() == MonthDate{2007, 12});
  CHECK(data.maturities == std::vector<int>{3, 6, 12, 24, 36, 60, 84, 120});

  const ForecastReport full = rolling_evaluation(data, {2001, 12}, {2007, 12});
  CHECK(full.counts == std::vector<std::size_t>{72, 70, 67, 61});
  CHECK(full.rmse_dns.rows() == 4);
  CHECK(full.rmse_dns.cols() == 8);
  CHECK((full.rmse_svar.array() >= 0.0).all());
  CHECK((full.rmse_rw.array() > 0.0).all());
  CHECK(full.svar_over_dns().allFinite());

  ForecastOptions opts;
  opts.threads = 2;
  const ForecastReport again = rolling_evaluation(data, {2001, 12}, {2007, 12}, opts);
  CHECK(again.rmse_svar == full.rmse_svar);
  CHECK(again.rmse_dns == full.rmse_dns);
  CHECK(again.mean_lambda == full.mean_lambda);

  ForecastOptions single;
  single.horizons = {1};
  const ForecastReport one = rolling_evaluation(data, {2007, 11}, {2007, 12}, single);
  CHECK(one.counts == std::vector<std::size_t>{1});
  const std::size_t o = data.index_of({2007, 11});
  const SvarForecast sv = svar_forecast(data.head(o + 1), 1);
  const Vector dns = dns_yield_forecast(dns_fit(data.head(o + 1)), 1, data.maturities);
  for (Eigen::Index j = 0; j < 8; ++j) {
    CHECK(one.rmse_svar(0, j) == doctest::Approx(std::abs(sv.yields(0, j) - data.yields(263, j))).epsilon(1e-12));
    CHECK(one.rmse_dns(0, j) == doctest::Approx(std::abs(dns(j) - data.yields(263, j))).epsilon(1e-12));
    CHECK(one.rmse_rw(0, j) == doctest::Approx(std::abs(data.yields(262, j) - data.yields(263, j))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rolling_evaluation(data, {2007, 12}, {2007, 12}, single), ConfigurationError);
  CHECK_THROWS_AS(rolling_evaluation(data, {1970, 1}, {2007, 12}, single), ConfigurationError);
}

TEST_CASE("synthetic dataset") {
  SyntheticYieldOptions o;
  o.seed = 4;
  const YieldDataset a = synthetic_yield_dataset(o);
  const YieldDataset b = synthetic_yield_dataset(o);
  CHECK(a.yields == b.yields);
  o.seed = 5;
  CHECK(synthetic_yield_dataset(o).yields != a.yields);
  CHECK(is_stable(synthetic_difference_design(8)));
  CHECK(synthetic_difference_design(8).r() == 12);
}

}
