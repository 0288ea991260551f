#include "svar/forecast.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "svar/parallel.hpp"
#include "svar/var_model.hpp"

namespace svar {

MonthDate MonthDate::parse(std::string_view text) {
  int y = 0;
  int m = 0;
  int d = 1;
  const std::string s(text);
  const int got = std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d);
  if (got < 2 || m < 1 || m > 12 || d < 1 || d > 31) throw ConfigurationError("bad date '" + s + "'");
  return {y, m};
}

MonthDate MonthDate::from_serial(long serial) {
  const long year = serial >= 0 ? serial / 12 : (serial - 11) / 12;
  return {static_cast<int>(year), static_cast<int>(serial - year * 12) + 1};
}

std::string MonthDate::iso() const {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02d-01", year, month);
  return buf;
}

void YieldDataset::validate() const {
  if (static_cast<std::size_t>(yields.rows()) != dates.size() ||
      static_cast<std::size_t>(yields.cols()) != maturities.size()) {
    throw DimensionError("yield matrix does not match dates x maturities");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) throw ConfigurationError("dates must strictly increase");
  }
  for (std::size_t j = 0; j < maturities.size(); ++j) {
    if (maturities[j] <= 0) throw ConfigurationError("maturities must be positive");
    if (j > 0 && maturities[j - 1] >= maturities[j]) throw ConfigurationError("maturities must strictly increase");
  }
  if (!yields.allFinite()) throw ConfigurationError("yield panel has missing or non-finite cells");
}

std::size_t YieldDataset::index_of(const MonthDate& date) const {
  const auto it = std::lower_bound(dates.begin(), dates.end(), date);
  if (it == dates.end() || *it != date) throw ConfigurationError("date " + date.iso() + " not in dataset");
  return static_cast<std::size_t>(it - dates.begin());
}

YieldDataset YieldDataset::head(std::size_t n) const {
  if (n > length()) throw DimensionError("head longer than dataset");
  YieldDataset out;
  out.dates.assign(dates.begin(), dates.begin() + static_cast<std::ptrdiff_t>(n));
  out.maturities = maturities;
  out.yields = yields.topRows(static_cast<Eigen::Index>(n));
  return out;
}

DnsFactors DnsFactors::head(std::size_t n) const {
  if (n > length()) throw DimensionError("head longer than factor paths");
  const auto k = static_cast<Eigen::Index>(n);
  return {beta1.head(k), beta2.head(k), beta3.head(k), eta.head(k)};
}

Eigen::Vector3d dns_loadings(double eta, double tau) {
  if (!(eta > 0.0) || !(tau > 0.0)) throw DomainError("dns_loadings needs eta > 0 and tau > 0");
  const double x = eta * tau;
  const double slope = -std::expm1(-x) / x;
  return {1.0, slope, slope - std::exp(-x)};
}

namespace {

// Derivative of (1 - e^{-x})/x - e^{-x} in x.
double curvature_slope(double x) {
  return std::exp(-x) * (1.0 + 1.0 / x) + std::expm1(-x) / (x * x);
}

}  // namespace

double dns_select_eta(double tau_medium) {
  if (!(tau_medium > 0.0)) throw DomainError("tau_medium must be positive");
  double lo = 1e-3;  // slope > 0
  double hi = 20.0;  // slope < 0
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (curvature_slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / tau_medium;
}

DnsFactors dns_fit(const YieldDataset& data, double tau_medium) {
  data.validate();
  const auto m = static_cast<Eigen::Index>(data.width());
  if (m < 3) throw InsufficientDataError("DNS needs at least 3 maturities");
  const double eta = dns_select_eta(tau_medium);
  Matrix L(m, 3);
  for (Eigen::Index j = 0; j < m; ++j) L.row(j) = dns_loadings(eta, data.maturities[j]).transpose();
  const Eigen::ColPivHouseholderQR<Matrix> qr(L);
  if (qr.rank() < 3) throw RankDeficiencyError("DNS loadings are collinear at these maturities");
  const Matrix beta = qr.solve(data.yields.transpose());
  const auto T = static_cast<Eigen::Index>(data.length());
  return {beta.row(0).transpose(), beta.row(1).transpose(), beta.row(2).transpose(), Vector::Constant(T, eta)};
}

Eigen::Vector3d dns_forecast(const DnsFactors& factors, std::size_t h) {
  if (h == 0) throw DomainError("horizon must be positive");
  const std::size_t T = factors.length();
  if (T < h + 2) throw InsufficientDataError("direct DNS forecast needs at least h + 2 periods");
  const auto n = static_cast<Eigen::Index>(T - h);
  const auto lag = static_cast<Eigen::Index>(h);
  Eigen::Vector3d out;
  const Vector* paths[] = {&factors.beta1, &factors.beta2, &factors.beta3};
  for (int i = 0; i < 3; ++i) {
    const Vector& b = *paths[i];
    const Vector x = b.head(n);
    const Vector y = b.segment(lag, n);
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
    const double phi = sxx > 1e-14 * (1.0 + x.squaredNorm()) ? sxy / sxx : 0.0;
    out(i) = (my - phi * mx) + phi * b(static_cast<Eigen::Index>(T) - 1);
  }
  return out;
}

Vector dns_yield_forecast(const DnsFactors& factors, std::size_t h, const std::vector<int>& maturities) {
  const Eigen::Vector3d beta = dns_forecast(factors, h);
  const double eta = factors.eta(factors.eta.size() - 1);
  Vector out(static_cast<Eigen::Index>(maturities.size()));
  for (std::size_t j = 0; j < maturities.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = dns_loadings(eta, maturities[j]).dot(beta);
  }
  return out;
}

double svar_default_lambda(std::size_t m, std::size_t T) {
  if (m == 0 || T == 0) throw DomainError("svar_default_lambda needs m, T > 0");
  return std::pow(static_cast<double>(m) * static_cast<double>(T), -0.4) / 4.0;
}

SvarForecast svar_forecast(const Matrix& levels, std::size_t h_max, const SvarForecastOptions& options) {
  const auto T = static_cast<std::size_t>(levels.rows());
  const auto m = static_cast<std::size_t>(levels.cols());
  const std::size_t r = options.r;
  if (r == 0) throw ConfigurationError("lag order must be positive");
  if (h_max == 0) throw DomainError("h_max must be positive");
  if (T <= r + 1) throw InsufficientDataError("sVAR forecast needs more than r + 1 observations");

  const Matrix diffs = levels.bottomRows(T - 1) - levels.topRows(T - 1);
  const Regression reg = build_regression(diffs, r);
  const Moments mom = Moments::from(reg.X, reg.Y);
  const WeightingMatrix w = WeightingMatrix::identity(m);

  SvarForecast out;
  out.lambda = options.lambda ? *options.lambda : svar_default_lambda(m, T);

  out.fit = fit_at_lambda(mom, w, options.penalty.with_lambda(out.lambda), options.fit, options.path_points);

  const Matrix B = theta_to_coefficients(out.fit.theta, m);
  // history.row(l) holds the difference l steps before the next one predicted.
  Matrix history(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m));
  for (std::size_t l = 0; l < r; ++l) history.row(static_cast<Eigen::Index>(l)) = diffs.row(diffs.rows() - 1 - l);
  out.differences.resize(static_cast<Eigen::Index>(h_max), static_cast<Eigen::Index>(m));
  out.yields.resize(static_cast<Eigen::Index>(h_max), static_cast<Eigen::Index>(m));
  Vector level = levels.row(levels.rows() - 1).transpose();
  Vector x(static_cast<Eigen::Index>(r * m));
  for (std::size_t h = 0; h < h_max; ++h) {
    for (std::size_t l = 0; l < r; ++l) {
      x.segment(static_cast<Eigen::Index>(l * m), static_cast<Eigen::Index>(m)) =
          history.row(static_cast<Eigen::Index>(l)).transpose();
    }
    const Vector d = B.transpose() * x;
    for (Eigen::Index l = history.rows() - 1; l > 0; --l) history.row(l) = history.row(l - 1);
    history.row(0) = d.transpose();
    level += d;
    out.differences.row(static_cast<Eigen::Index>(h)) = d.transpose();
    out.yields.row(static_cast<Eigen::Index>(h)) = level.transpose();
  }
  return out;
}

SvarForecast svar_forecast(const YieldDataset& data, std::size_t h_max, const SvarForecastOptions& options) {
  data.validate();
  return svar_forecast(data.yields, h_max, options);
}

ForecastReport rolling_evaluation(const YieldDataset& data, const MonthDate& start, const MonthDate& end,
                                  const ForecastOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  data.validate();
  if (options.horizons.empty()) throw ConfigurationError("no forecast horizons");
  for (std::size_t h : options.horizons) {
    if (h == 0) throw ConfigurationError("forecast horizons must be positive");
  }
  const std::size_t s = data.index_of(start);
  const std::size_t e = data.index_of(end);
  const std::size_t h_min = *std::min_element(options.horizons.begin(), options.horizons.end());
  const std::size_t h_max = *std::max_element(options.horizons.begin(), options.horizons.end());
  for (std::size_t h : options.horizons) {
    if (s + h > e) throw ConfigurationError("evaluation window too short for horizon " + std::to_string(h));
  }

  const std::size_t nh = options.horizons.size();
  const auto m = static_cast<Eigen::Index>(data.width());
  const DnsFactors factors = dns_fit(data, options.tau_medium);
  const std::size_t n_origins = e - h_min - s + 1;

  struct OriginResult {
    std::vector<std::optional<std::array<Vector, 3>>> errors;  // per horizon: dns, svar, rw
    double lambda = 0.0;
  };
  std::vector<OriginResult> results(n_origins);

  parallel_for(n_origins, options.threads, [&](std::size_t i) {
    const std::size_t o = s + i;
    OriginResult& res = results[i];
    res.errors.resize(nh);
    const SvarForecast sv = svar_forecast(data.yields.topRows(static_cast<Eigen::Index>(o + 1)), h_max, options.svar);
    res.lambda = sv.lambda;
    const DnsFactors window = factors.head(o + 1);
    const Vector origin = data.yields.row(static_cast<Eigen::Index>(o)).transpose();
    for (std::size_t hi = 0; hi < nh; ++hi) {
      const std::size_t h = options.horizons[hi];
      if (o + h > e) continue;
      const Vector actual = data.yields.row(static_cast<Eigen::Index>(o + h)).transpose();
      const Vector dns = dns_yield_forecast(window, h, data.maturities);
      const Vector svar = sv.yields.row(static_cast<Eigen::Index>(h - 1)).transpose();
      res.errors[hi] = std::array<Vector, 3>{actual - dns, actual - svar, actual - origin};
    }
  });

  ForecastReport report;
  report.maturities = data.maturities;
  report.horizons = options.horizons;
  report.counts.assign(nh, 0);
  report.start = start;
  report.end = end;
  const auto rows = static_cast<Eigen::Index>(nh);
  Matrix sums[3] = {Matrix::Zero(rows, m), Matrix::Zero(rows, m), Matrix::Zero(rows, m)};
  for (const auto& res : results) {
    report.mean_lambda += res.lambda;
    for (std::size_t hi = 0; hi < nh; ++hi) {
      if (!res.errors[hi]) continue;
      ++report.counts[hi];
      for (int k = 0; k < 3; ++k) {
        sums[k].row(static_cast<Eigen::Index>(hi)) += (*res.errors[hi])[k].array().square().matrix().transpose();
      }
    }
  }
  report.mean_lambda /= static_cast<double>(n_origins);
  Vector counts(rows);
  for (std::size_t hi = 0; hi < nh; ++hi) counts(static_cast<Eigen::Index>(hi)) = static_cast<double>(report.counts[hi]);
  auto rmse = [&](const Matrix& sum) {
    return Matrix((sum.array().colwise() / counts.array()).sqrt());
  };
  report.rmse_dns = rmse(sums[0]);
  report.rmse_svar = rmse(sums[1]);
  report.rmse_rw = rmse(sums[2]);
  report.seconds = std::chrono::duration<double>(Clock::now() - started).count();
  return report;
}

VarParams synthetic_difference_design(std::size_t m) {
  if (m < 2) throw ConfigurationError("synthetic design needs at least 2 maturities");
  const auto k = static_cast<Eigen::Index>(m);
  std::vector<Matrix> lags(12, Matrix::Zero(k, k));
  for (Eigen::Index i = 0; i < k; ++i) {
    lags[0](i, i) = 0.35;
    if (i + 1 < k) lags[0](i, i + 1) = 0.15;
    if (i % 2 == 0) lags[2](i, i) = -0.15;
    lags[11](i, i) = 0.2;
  }
  lags[0](k - 1, 0) = -0.1;
  return VarParams(std::move(lags));
}

YieldDataset synthetic_yield_dataset(const SyntheticYieldOptions& options) {
  const std::size_t m = options.maturities.size();
  if (options.months < 2) throw ConfigurationError("synthetic dataset needs at least 2 months");
  const auto k = static_cast<Eigen::Index>(m);
  Matrix U = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    U(i, 0) = 0.12;
    U(i, i) += 0.15;
  }
  const TimeSeriesData diffs =
      simulate(synthetic_difference_design(m), NoiseSpec(U, options.seed), options.months - 1, options.burn_in);

  YieldDataset out;
  out.maturities = options.maturities;
  out.dates.reserve(options.months);
  for (std::size_t t = 0; t < options.months; ++t) out.dates.push_back(options.first.plus_months(static_cast<long>(t)));
  out.yields.resize(static_cast<Eigen::Index>(options.months), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    out.yields(0, j) = 2.0 + 3.0 * (1.0 - std::exp(-options.maturities[static_cast<std::size_t>(j)] / 36.0));
  }
  for (Eigen::Index t = 1; t < out.yields.rows(); ++t) out.yields.row(t) = out.yields.row(t - 1) + diffs.values.row(t - 1);
  out.validate();
  return out;
}

}  // namespace svar
