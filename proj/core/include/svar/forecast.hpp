#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "svar/penalties.hpp"
#include "svar/solver.hpp"
#include "svar/types.hpp"

namespace svar {

/// Calendar month. Ordering and arithmetic go through a month count.
struct MonthDate {
  int year = 1970;
  int month = 1;  ///< 1..12

  /// Accepts "YYYY-MM" and "YYYY-MM-DD" (the day is ignored).
  static MonthDate parse(std::string_view text);
  static MonthDate from_serial(long serial);
  long serial() const noexcept { return static_cast<long>(year) * 12 + (month - 1); }
  MonthDate plus_months(long n) const { return from_serial(serial() + n); }
  /// ISO form "YYYY-MM-01".
  std::string iso() const;

  friend bool operator==(const MonthDate&, const MonthDate&) = default;
  friend auto operator<=>(const MonthDate& a, const MonthDate& b) { return a.serial() <=> b.serial(); }
};

/// Monthly yield panel: one row per date, one column per maturity (months), percent.
struct YieldDataset {
  std::vector<MonthDate> dates;
  std::vector<int> maturities;
  Matrix yields;

  std::size_t length() const noexcept { return dates.size(); }
  std::size_t width() const noexcept { return maturities.size(); }
  /// Throws unless dates and maturities strictly increase and every cell is finite.
  void validate() const;
  /// Row of `date`; throws ConfigurationError when absent.
  std::size_t index_of(const MonthDate& date) const;
  /// First n rows.
  YieldDataset head(std::size_t n) const;
};

struct DnsFactors {
  Vector beta1;  ///< level
  Vector beta2;  ///< slope
  Vector beta3;  ///< curvature
  Vector eta;

  std::size_t length() const noexcept { return static_cast<std::size_t>(beta1.size()); }
  Eigen::Vector3d at(std::size_t t) const { return {beta1(t), beta2(t), beta3(t)}; }
  DnsFactors head(std::size_t n) const;
};

/// (1, (1 - e^{-x})/x, (1 - e^{-x})/x - e^{-x}) with x = eta * tau.
Eigen::Vector3d dns_loadings(double eta, double tau);

/// eta maximizing the curvature loading at maturity tau_medium.
double dns_select_eta(double tau_medium);

/// Per-period least squares of the yields on the three loadings.
DnsFactors dns_fit(const YieldDataset& data, double tau_medium = 30.0);

/// Direct h-step forecast of each factor: beta_t on (1, beta_{t-h}).
Eigen::Vector3d dns_forecast(const DnsFactors& factors, std::size_t h);

/// Yields implied by factor forecasts at the last period's eta.
Vector dns_yield_forecast(const DnsFactors& factors, std::size_t h, const std::vector<int>& maturities);

/// (m T)^{-0.4} / 4.
double svar_default_lambda(std::size_t m, std::size_t T);

struct SvarForecastOptions {
  std::size_t r = 12;
  PenaltySpec penalty = PenaltySpec::scad(0.0, kDefaultScadShape);  ///< lambda replaced per window
  std::optional<double> lambda;  ///< fixed override of the default formula
  std::size_t path_points = 20;  ///< warm-start steps from lambda_max down to lambda
  FitConfig fit;
};

struct SvarForecast {
  Matrix differences;  ///< h_max x m predicted first differences
  Matrix yields;       ///< h_max x m predicted levels
  FitResult fit;
  double lambda = 0.0;
};

/// Penalized VAR(r) on first differences of `levels` (T x m), iterated h_max steps ahead.
SvarForecast svar_forecast(const Matrix& levels, std::size_t h_max, const SvarForecastOptions& options = {});
SvarForecast svar_forecast(const YieldDataset& data, std::size_t h_max, const SvarForecastOptions& options = {});

struct ForecastOptions {
  std::vector<std::size_t> horizons{1, 3, 6, 12};
  double tau_medium = 30.0;
  SvarForecastOptions svar;
  std::size_t threads = 1;
};

struct ForecastReport {
  std::vector<int> maturities;
  std::vector<std::size_t> horizons;
  std::vector<std::size_t> counts;  ///< forecasts per horizon
  MonthDate start;
  MonthDate end;
  Matrix rmse_dns;   ///< horizons x maturities
  Matrix rmse_svar;
  Matrix rmse_rw;    ///< random walk: no change from the origin
  double mean_lambda = 0.0;
  double seconds = 0.0;

  Matrix svar_over_dns() const { return rmse_svar.cwiseQuotient(rmse_dns); }
  Matrix svar_over_rw() const { return rmse_svar.cwiseQuotient(rmse_rw); }
};

/**
 * Expanding-window evaluation. A forecast for horizon h is made at every
 * origin o with start <= o and o + h <= end, using data up to and including o.
 */
ForecastReport rolling_evaluation(const YieldDataset& data, const MonthDate& start, const MonthDate& end,
                                  const ForecastOptions& options = {});

struct SyntheticYieldOptions {
  MonthDate first{1986, 1};
  std::size_t months = 264;
  std::vector<int> maturities{3, 6, 12, 24, 36, 60, 84, 120};
  std::uint64_t seed = 1;
  std::size_t burn_in = 200;
};

/// Sparse VAR(12) with the same width as `maturities` driving the yield differences.
VarParams synthetic_difference_design(std::size_t m);

/// Yields whose first differences follow synthetic_difference_design.
YieldDataset synthetic_yield_dataset(const SyntheticYieldOptions& options = {});

}  // namespace svar
