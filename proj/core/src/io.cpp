#include "svar/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace svar {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigurationError("line " + std::to_string(line) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DimensionError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                           " fields, found " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw ConfigurationError("CSV input is empty");
  return t;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(os);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return is;
}

}  // namespace

std::string format_exact(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& os, const TimeSeriesData& data) {
  if (data.dates && data.dates->size() != data.length()) throw DimensionError("dates and values differ in length");
  const auto names = data.names.empty() ? default_names(data.dimension()) : data.names;
  if (names.size() != data.dimension()) throw DimensionError("names and values differ in width");
  if (data.dates) os << "date,";
  for (std::size_t j = 0; j < names.size(); ++j) os << (j ? "," : "") << names[j];
  os << '\n';
  for (Eigen::Index t = 0; t < data.values.rows(); ++t) {
    if (data.dates) os << (*data.dates)[static_cast<std::size_t>(t)] << ',';
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) os << (j ? "," : "") << format_exact(data.values(t, j));
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const TimeSeriesData& data) {
  write_file(path, [&](std::ostream& os) { write_csv(os, data); });
}

TimeSeriesData read_csv(std::istream& is) {
  const Table t = read_table(is);
  const bool dated = !t.header.empty() && t.header.front() == "date";
  const std::size_t offset = dated ? 1 : 0;
  TimeSeriesData data;
  data.names.assign(t.header.begin() + static_cast<std::ptrdiff_t>(offset), t.header.end());
  data.values.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(data.names.size()));
  if (dated) data.dates.emplace();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (dated) data.dates->push_back(t.rows[i][0]);
    for (std::size_t j = 0; j < data.names.size(); ++j) {
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(t.rows[i][j + offset], i + 2);
    }
  }
  return data;
}

TimeSeriesData read_csv(const std::filesystem::path& path) {
  auto is = open_input(path);
  return read_csv(is);
}

void write_yield_csv(std::ostream& os, const YieldDataset& data) {
  data.validate();
  os << "date";
  for (int tau : data.maturities) os << ',' << tau;
  os << '\n';
  for (std::size_t t = 0; t < data.length(); ++t) {
    os << data.dates[t].iso();
    for (Eigen::Index j = 0; j < data.yields.cols(); ++j) os << ',' << format_exact(data.yields(static_cast<Eigen::Index>(t), j));
    os << '\n';
  }
}

void write_yield_csv(const std::filesystem::path& path, const YieldDataset& data) {
  write_file(path, [&](std::ostream& os) { write_yield_csv(os, data); });
}

YieldDataset read_yield_csv(std::istream& is) {
  const Table t = read_table(is);
  if (t.header.size() < 2) throw ConfigurationError("yield CSV needs a date column and at least one maturity");
  YieldDataset data;
  for (std::size_t j = 1; j < t.header.size(); ++j) {
    int tau = 0;
    const std::string& h = t.header[j];
    const auto [ptr, ec] = std::from_chars(h.data(), h.data() + h.size(), tau);
    if (ec != std::errc() || ptr != h.data() + h.size()) {
      throw ConfigurationError("maturity header '" + h + "' is not an integer number of months");
    }
    data.maturities.push_back(tau);
  }
  data.yields.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(data.maturities.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    data.dates.push_back(MonthDate::parse(t.rows[i][0]));
    for (std::size_t j = 0; j < data.maturities.size(); ++j) {
      data.yields(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(t.rows[i][j + 1], i + 2);
    }
  }
  data.validate();
  return data;
}

YieldDataset read_yield_csv(const std::filesystem::path& path) {
  auto is = open_input(path);
  return read_yield_csv(is);
}

}  // namespace svar
