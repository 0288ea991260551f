#pragma once

#include <filesystem>
#include <iosfwd>

#include "svar/forecast.hpp"
#include "svar/var_model.hpp"

namespace svar {

/// Header row of variable names, prefixed by "date" when dates are present. Values at full precision.
void write_csv(std::ostream& os, const TimeSeriesData& data);
void write_csv(const std::filesystem::path& path, const TimeSeriesData& data);

/// A first column named "date" becomes TimeSeriesData::dates.
TimeSeriesData read_csv(std::istream& is);
TimeSeriesData read_csv(const std::filesystem::path& path);

/// "date" column followed by one column per maturity in months.
void write_yield_csv(std::ostream& os, const YieldDataset& data);
void write_yield_csv(const std::filesystem::path& path, const YieldDataset& data);
YieldDataset read_yield_csv(std::istream& is);
YieldDataset read_yield_csv(const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_exact(double x);

}  // namespace svar
