#pragma once

#include <cstdint>
#include <string>

#include "svar/forecast.hpp"
#include "svar_app/config.hpp"

namespace svar::app {

/// Second-level labels under the master seed, one per command that draws randomness.
/// Monte Carlo replications derive from the master seed directly.
inline constexpr std::uint64_t kSimulateStream = 1;
inline constexpr std::uint64_t kCvStream = 2;
inline constexpr std::uint64_t kForecastStream = 3;

int cmd_simulate(const RunConfig& config);
int cmd_fit(const RunConfig& config);
int cmd_cv(const RunConfig& config);
int cmd_montecarlo(const RunConfig& config);
int cmd_forecast(const RunConfig& config);

/// Dataset named by forecast.input, or the synthetic panel when it is empty.
YieldDataset forecast_dataset(const RunConfig& config);

/// Rows method x h, one column per maturity.
std::string rmse_table_csv(const ForecastReport& report);
/// Rows h, sVAR/DNS ratio per maturity.
std::string ratio_table_csv(const ForecastReport& report);

}  // namespace svar::app
