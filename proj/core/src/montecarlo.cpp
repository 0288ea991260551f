#include "svar/montecarlo.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "svar/parallel.hpp"
#include "svar/rng.hpp"

namespace svar {

namespace {

constexpr std::uint64_t kPilotLabel = 0x9171'07ULL;
constexpr std::uint64_t kFoldLabel = 1;
constexpr std::size_t kMaxRecordedErrors = 5;

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

PenaltySpec Estimator::penalty(double lambda) const {
  switch (kind) {
    case EstimatorKind::SCAD:
      return PenaltySpec::scad(lambda, a);
    case EstimatorKind::MCP:
      return PenaltySpec::mcp(lambda, a);
    case EstimatorKind::Lasso:
      return PenaltySpec::lasso(lambda);
    default:
      throw ConfigurationError("estimator " + label() + " has no penalty");
  }
}

std::string Estimator::label() const {
  switch (kind) {
    case EstimatorKind::Oracle:
      return "oracle";
    case EstimatorKind::MLE:
      return "mle";
    case EstimatorKind::Lasso:
      return "lasso";
    case EstimatorKind::SCAD:
      return "scad(" + format_number(a) + ")";
    case EstimatorKind::MCP:
      return "mcp(" + format_number(a) + ")";
  }
  return "unknown";
}

Estimator Estimator::parse(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s == "oracle") return {EstimatorKind::Oracle, 0.0};
  if (s == "mle") return {EstimatorKind::MLE, 0.0};
  if (s == "lasso" || s == "l1") return {EstimatorKind::Lasso, 0.0};
  const auto open = s.find('(');
  const std::string name = s.substr(0, open);
  EstimatorKind kind;
  if (name == "scad") {
    kind = EstimatorKind::SCAD;
  } else if (name == "mcp") {
    kind = EstimatorKind::MCP;
  } else {
    throw ConfigurationError("unknown estimator '" + std::string(text) + "'");
  }
  double a = kind == EstimatorKind::SCAD ? kDefaultScadShape : kDefaultMcpShape;
  if (open != std::string::npos) {
    const auto close = s.find(')', open);
    if (close == std::string::npos) throw ConfigurationError("unbalanced parenthesis in '" + std::string(text) + "'");
    try {
      a = std::stod(s.substr(open + 1, close - open - 1));
    } catch (const std::exception&) {
      throw ConfigurationError("bad shape parameter in '" + std::string(text) + "'");
    }
  }
  Estimator e{kind, a};
  (void)e.penalty(1.0);  // validates a
  return e;
}

std::vector<Estimator> default_estimators() {
  return {{EstimatorKind::Oracle, 0.0}, {EstimatorKind::MLE, 0.0},  {EstimatorKind::SCAD, 2.5},
          {EstimatorKind::SCAD, 20.0},  {EstimatorKind::MCP, 1.5},  {EstimatorKind::MCP, 20.0},
          {EstimatorKind::Lasso, 0.0}};
}

std::string to_string(TuningMode mode) {
  switch (mode) {
    case TuningMode::FullCv:
      return "full-cv";
    case TuningMode::Pilot:
      return "pilot";
    case TuningMode::Fixed:
      return "fixed";
  }
  return "unknown";
}

TuningMode parse_tuning_mode(std::string_view text) {
  if (text == "full-cv") return TuningMode::FullCv;
  if (text == "pilot" || text == "fixed-lambda") return TuningMode::Pilot;
  if (text == "fixed") return TuningMode::Fixed;
  throw ConfigurationError("unknown tuning mode '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const {
  if (replications < 1) throw ConfigurationError("replications must be at least 1");
  if (sample_sizes.empty()) throw ConfigurationError("no sample sizes");
  if (estimators.empty()) throw ConfigurationError("no estimators");
  if (static_cast<std::size_t>(noise_factor.rows()) != var_params.k()) {
    throw DimensionError("noise factor and VAR dimension differ");
  }
  NoiseSpec check(noise_factor, 0);
  (void)check;
  for (std::size_t T : sample_sizes) {
    if (T <= var_params.r()) throw ConfigurationError("sample size must exceed the lag order");
  }
  for (const auto& e : estimators) {
    if (e.penalized()) (void)e.penalty(1.0);
  }
  if (tuning == TuningMode::Fixed && !lambda) throw ConfigurationError("fixed tuning needs lambda");
  if (lambda && !(*lambda >= 0.0)) throw ConfigurationError("lambda must be nonnegative");
  if (cv() && folds < 2) throw ConfigurationError("folds must be at least 2");
  fit.validate();
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t T, std::size_t replication) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(replication)});
}

Replication fit_estimator(const ExperimentSpec& spec, const TimeSeriesData& data, const Estimator& estimator,
                          std::uint64_t seed, std::optional<double> lambda) {
  const Regression reg = build_regression(data, spec.var_params.r());
  const WeightingMatrix w = WeightingMatrix::identity(spec.var_params.k());
  Replication out;
  out.theta_true = spec.var_params.theta();
  switch (estimator.kind) {
    case EstimatorKind::Oracle:
      out.theta_hat = oracle_fit(reg.X, reg.Y, w, support_of(out.theta_true)).theta;
      return out;
    case EstimatorKind::MLE: {
      IndexSet all(spec.var_params.p());
      for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
      out.theta_hat = oracle_fit(reg.X, reg.Y, w, all).theta;
      return out;
    }
    default:
      break;
  }
  if (!lambda && spec.tuning == TuningMode::Fixed) lambda = spec.lambda;
  if (lambda) {
    out.theta_hat = fit_at_lambda(Moments::from(reg.X, reg.Y), w, estimator.penalty(*lambda), spec.fit).theta;
    out.lambda = *lambda;
    return out;
  }
  const CvResult cv = cross_validate(reg, w, estimator.penalty(1.0), spec.fit, spec.folds,
                                     derive_seed(seed, {kFoldLabel}));
  out.theta_hat = cv.fit.theta;
  out.lambda = cv.best_lambda;
  return out;
}

namespace {

double pilot_lambda(const ExperimentSpec& spec, std::size_t T, const Estimator& estimator) {
  const std::uint64_t seed = derive_seed(spec.master_seed, {static_cast<std::uint64_t>(T), kPilotLabel});
  const TimeSeriesData data = simulate(spec.var_params, NoiseSpec(spec.noise_factor, seed), T, spec.burn_in);
  ExperimentSpec cv_spec = spec;
  cv_spec.tuning = TuningMode::FullCv;
  return fit_estimator(cv_spec, data, estimator, seed).lambda;
}

}  // namespace

Replication replicate_once(const ExperimentSpec& spec, std::size_t T, const Estimator& estimator,
                           std::uint64_t seed) {
  const TimeSeriesData data = simulate(spec.var_params, NoiseSpec(spec.noise_factor, seed), T, spec.burn_in);
  std::optional<double> lambda;
  if (estimator.penalized() && spec.tuning == TuningMode::Pilot) lambda = pilot_lambda(spec, T, estimator);
  return fit_estimator(spec, data, estimator, seed, lambda);
}

Metrics compute_metrics(const std::vector<Vector>& estimates, const Vector& theta_true) {
  if (estimates.empty()) throw ConfigurationError("compute_metrics: no estimates");
  const auto p = theta_true.size();
  const double R = static_cast<double>(estimates.size());
  Vector mean = Vector::Zero(p);
  for (const auto& e : estimates) {
    if (e.size() != p) throw DimensionError("compute_metrics: estimate length differs from theta_true");
    mean += e;
  }
  mean /= R;

  std::size_t n_nonzero = 0;
  for (Eigen::Index j = 0; j < p; ++j) n_nonzero += theta_true(j) != 0.0 ? 1 : 0;
  const std::size_t n_zero = static_cast<std::size_t>(p) - n_nonzero;

  Metrics m;
  double sq_err = 0.0;
  double sq_dev = 0.0;
  for (const auto& e : estimates) {
    sq_err += (e - theta_true).squaredNorm();
    sq_dev += (e - mean).squaredNorm();
    std::size_t ok_all = 0;
    std::size_t ok_nonzero = 0;
    std::size_t ok_zero = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const bool same = sign_of(e(j)) == sign_of(theta_true(j));
      ok_all += same ? 1 : 0;
      if (theta_true(j) != 0.0) {
        ok_nonzero += same ? 1 : 0;
      } else {
        ok_zero += same ? 1 : 0;
      }
    }
    m.mssc_overall += static_cast<double>(ok_all) / static_cast<double>(p);
    m.mssc_nonzero += n_nonzero ? static_cast<double>(ok_nonzero) / static_cast<double>(n_nonzero) : 1.0;
    m.mssc_zero += n_zero ? static_cast<double>(ok_zero) / static_cast<double>(n_zero) : 1.0;
  }
  m.rmse = std::sqrt(sq_err / R);
  m.stdev = std::sqrt(sq_dev / R);
  m.mssc_overall /= R;
  m.mssc_nonzero /= R;
  m.mssc_zero /= R;
  return m;
}

const ExperimentCell& ExperimentReport::at(std::size_t T, const Estimator& estimator) const {
  for (const auto& c : cells) {
    if (c.T == T && c.estimator == estimator) return c;
  }
  throw std::out_of_range("no cell for T=" + std::to_string(T) + " estimator " + estimator.label());
}

std::size_t ExperimentReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.failures;
  return n;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  const std::size_t nT = spec.sample_sizes.size();
  const std::size_t nE = spec.estimators.size();
  const std::size_t R = spec.replications;

  // Pilot lambdas are tuned up front so every replication sees the same value.
  std::vector<std::optional<double>> pilot(nT * nE);
  if (spec.tuning == TuningMode::Pilot) {
    parallel_for(nT * nE, spec.threads, [&](std::size_t idx) {
      const Estimator& e = spec.estimators[idx % nE];
      if (e.penalized()) pilot[idx] = pilot_lambda(spec, spec.sample_sizes[idx / nE], e);
    });
  }

  struct Outcome {
    std::optional<Replication> fit;
    std::string error;
    double seconds = 0.0;
  };
  std::vector<Outcome> outcomes(nT * R * nE);

  parallel_for(nT * R, spec.threads, [&](std::size_t task) {
    const std::size_t ti = task / R;
    const std::size_t rep = task % R;
    const std::size_t T = spec.sample_sizes[ti];
    const std::uint64_t seed = replication_seed(spec.master_seed, T, rep);
    std::optional<TimeSeriesData> data;
    std::string sim_error;
    try {
      data = simulate(spec.var_params, NoiseSpec(spec.noise_factor, seed), T, spec.burn_in);
    } catch (const std::exception& ex) {
      sim_error = ex.what();
    }
    for (std::size_t ei = 0; ei < nE; ++ei) {
      Outcome& out = outcomes[(ti * R + rep) * nE + ei];
      if (!data) {
        out.error = sim_error;
        continue;
      }
      const auto t0 = Clock::now();
      try {
        out.fit = fit_estimator(spec, *data, spec.estimators[ei], seed, pilot[ti * nE + ei]);
      } catch (const std::exception& ex) {
        out.error = ex.what();
      }
      out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    }
  });

  ExperimentReport report;
  report.master_seed = spec.master_seed;
  const Vector theta_true = spec.var_params.theta();
  for (std::size_t ti = 0; ti < nT; ++ti) {
    for (std::size_t ei = 0; ei < nE; ++ei) {
      ExperimentCell cell;
      cell.T = spec.sample_sizes[ti];
      cell.estimator = spec.estimators[ei];
      cell.pilot_lambda = pilot[ti * nE + ei];
      std::vector<Vector> estimates;
      estimates.reserve(R);
      double lambda_sum = 0.0;
      for (std::size_t rep = 0; rep < R; ++rep) {
        const Outcome& out = outcomes[(ti * R + rep) * nE + ei];
        cell.seconds += out.seconds;
        if (out.fit) {
          estimates.push_back(out.fit->theta_hat);
          lambda_sum += out.fit->lambda;
        } else {
          ++cell.failures;
          if (cell.errors.size() < kMaxRecordedErrors) cell.errors.push_back(out.error);
        }
      }
      cell.replications = estimates.size();
      if (!estimates.empty()) {
        cell.metrics = compute_metrics(estimates, theta_true);
        cell.mean_lambda = lambda_sum / static_cast<double>(estimates.size());
      }
      report.cells.push_back(std::move(cell));
    }
  }
  report.total_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  return report;
}

std::string render_table(const ExperimentReport& report) {
  std::vector<std::size_t> Ts;
  std::vector<Estimator> ests;
  for (const auto& c : report.cells) {
    if (std::find(Ts.begin(), Ts.end(), c.T) == Ts.end()) Ts.push_back(c.T);
    if (std::find(ests.begin(), ests.end(), c.estimator) == ests.end()) ests.push_back(c.estimator);
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"T", "metric"};
  for (const auto& e : ests) header.push_back(e.label());
  rows.push_back(header);

  struct Row {
    const char* name;
    double Metrics::*field;
    double factor;
    bool selection;
  };
  const Row layout[] = {{"RMSE", &Metrics::rmse, 1.0, false},
                        {"STDEV", &Metrics::stdev, 1.0, false},
                        {"MSSC[%]", &Metrics::mssc_overall, 100.0, true},
                        {"(nonzero)", &Metrics::mssc_nonzero, 100.0, true},
                        {"(zero)", &Metrics::mssc_zero, 100.0, true}};
  // RMSE block, STDEV block, then an MSSC block with its two sub-rates per T.
  for (int block = 0; block < 3; ++block) {
    for (std::size_t T : Ts) {
      const int first = block < 2 ? block : 2;
      const int last = block < 2 ? block : 4;
      for (int r = first; r <= last; ++r) {
        std::vector<std::string> line{r == first ? std::to_string(T) : "", layout[r].name};
        for (const auto& e : ests) {
          const ExperimentCell& c = report.at(T, e);
          if ((layout[r].selection && !e.penalized()) || c.replications == 0) {
            line.emplace_back("--");
          } else {
            line.push_back(format_number(layout[r].factor * (c.metrics.*(layout[r].field))));
          }
        }
        rows.push_back(std::move(line));
      }
    }
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream os;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    for (std::size_t i = 0; i < rows[ri].size(); ++i) {
      const std::string& cell = rows[ri][i];
      os << (i ? "  " : "");
      if (i < 2) {
        os << cell << std::string(width[i] - cell.size(), ' ');
      } else {
        os << std::string(width[i] - cell.size(), ' ') << cell;
      }
    }
    os << '\n';
    if (ri == 0) os << std::string(std::accumulate(width.begin(), width.end(), std::size_t{0}) + 2 * (width.size() - 1), '-') << '\n';
  }
  return os.str();
}

}  // namespace svar
