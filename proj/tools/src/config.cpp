#include "svar_app/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace svar::app {

namespace {

// Reads keys out of one TOML table and remembers which were consumed.
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  template <class T>
  void get(const char* key, T& out) {
    const toml::node* node = find(key);
    if (!node) return;
    out = convert<T>(*node, key);
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    const toml::node* node = find(key);
    if (!node) return;
    out = convert<T>(*node, key);
  }

  template <class T>
  void get(const char* key, std::vector<T>& out) {
    const toml::node* node = find(key);
    if (!node) return;
    const toml::array* arr = node->as_array();
    if (!arr) fail(key, "an array");
    out.clear();
    for (const auto& item : *arr) out.push_back(convert<T>(item, key));
  }

  Section sub(const char* key) {
    const toml::node* node = find(key);
    if (!node) return {nullptr, name_ + "." + key};
    if (!node->is_table()) fail(key, "a table");
    return {node->as_table(), name_ + "." + key};
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [key, value] : *table_) {
      if (!seen_.count(std::string(key.str()))) {
        throw ConfigurationError("unknown key '" + name_ + "." + std::string(key.str()) + "'");
      }
    }
  }

 private:
  const toml::node* find(const char* key) {
    seen_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigurationError("'" + name_ + "." + key + "' must be " + what);
  }

  template <class T>
  T convert(const toml::node& node, const char* key) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node.value_exact<bool>()) return *v;
      fail(key, "a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = node.value_exact<std::string>()) return *v;
      fail(key, "a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto v = node.value<double>()) return *v;
      fail(key, "a number");
    } else {
      const auto v = node.value_exact<std::int64_t>();
      if (!v || *v < 0) fail(key, "a nonnegative integer");
      return static_cast<T>(*v);
    }
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_penalty(Section s, PenaltyConfig& p) {
  s.get("kind", p.kind);
  s.get("a", p.a);
  s.finish();
}

template <class T>
toml::array to_array(const std::vector<T>& v) {
  toml::array arr;
  for (const auto& x : v) {
    if constexpr (std::is_integral_v<T>) {
      arr.push_back(static_cast<std::int64_t>(x));
    } else {
      arr.push_back(x);
    }
  }
  return arr;
}

std::int64_t as_int(std::uint64_t v) {
  if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ConfigurationError("value too large for a TOML integer");
  }
  return static_cast<std::int64_t>(v);
}

toml::table penalty_table(const PenaltyConfig& p) {
  toml::table t{{"kind", p.kind}};
  if (p.a) t.insert("a", *p.a);
  return t;
}

}  // namespace

FitConfig SolverConfig::to_fit_config() const {
  FitConfig c;
  c.n_lambda = n_lambda;
  c.lambda_min_ratio = lambda_min_ratio;
  c.max_iter = max_iter;
  c.tol = tol;
  c.standardize = standardize;
  if (fold_scheme == "random") {
    c.fold_scheme = FoldScheme::Random;
  } else if (fold_scheme == "contiguous") {
    c.fold_scheme = FoldScheme::Contiguous;
  } else {
    throw ConfigurationError("fold_scheme must be 'random' or 'contiguous'");
  }
  c.validate();
  return c;
}

PenaltySpec PenaltyConfig::make(double lambda) const { return PenaltySpec(parse_penalty_kind(kind), lambda, a); }

void RunConfig::validate() const {
  if (general.threads == 0) throw ConfigurationError("threads must be at least 1");
  static const std::set<std::string> levels{"trace", "debug", "info", "warn", "error", "critical", "off"};
  if (!levels.count(general.log_level)) throw ConfigurationError("unknown log level '" + general.log_level + "'");
  (void)solver.to_fit_config();
  (void)fit.penalty.make(1.0);
  (void)cv.penalty.make(1.0);
  (void)forecast.penalty.make(1.0);
  if (fit.long_run != "outer-product" && fit.long_run != "bartlett") {
    throw ConfigurationError("fit.long_run must be 'outer-product' or 'bartlett'");
  }
  if (fit.lambda && !(*fit.lambda >= 0.0)) throw ConfigurationError("fit.lambda must be nonnegative");
  if (forecast.lambda && !(*forecast.lambda >= 0.0)) throw ConfigurationError("forecast.lambda must be nonnegative");
  if (fit.lags == 0 || cv.lags == 0 || forecast.lags == 0) throw ConfigurationError("lags must be positive");
  (void)make_experiment_spec(*this);
  (void)MonthDate::parse(forecast.start);
  (void)MonthDate::parse(forecast.end);
  if (!(forecast.tau_medium > 0.0)) throw ConfigurationError("forecast.tau_medium must be positive");
}

RunConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& err) {
    std::ostringstream os;
    os << "config parse error: " << err.description() << " at line " << err.source().begin.line;
    throw ConfigurationError(os.str());
  }

  RunConfig c;
  Section top(&root, "config");

  Section g = top.sub("general");
  g.get("seed", c.general.seed);
  g.get("threads", c.general.threads);
  g.get("log_level", c.general.log_level);
  g.finish();

  Section s = top.sub("solver");
  s.get("n_lambda", c.solver.n_lambda);
  s.get("lambda_min_ratio", c.solver.lambda_min_ratio);
  s.get("max_iter", c.solver.max_iter);
  s.get("tol", c.solver.tol);
  s.get("standardize", c.solver.standardize);
  s.get("fold_scheme", c.solver.fold_scheme);
  s.finish();

  Section sim = top.sub("simulate");
  sim.get("T", c.simulate.T);
  sim.get("burn_in", c.simulate.burn_in);
  sim.get("output", c.simulate.output);
  sim.finish();

  Section f = top.sub("fit");
  f.get("input", c.fit.input);
  f.get("lags", c.fit.lags);
  read_penalty(f.sub("penalty"), c.fit.penalty);
  f.get("lambda", c.fit.lambda);
  f.get("certificate", c.fit.certificate);
  f.get("covariance", c.fit.covariance);
  f.get("long_run", c.fit.long_run);
  f.get("output", c.fit.output);
  f.finish();

  Section cv = top.sub("cv");
  cv.get("input", c.cv.input);
  cv.get("lags", c.cv.lags);
  read_penalty(cv.sub("penalty"), c.cv.penalty);
  cv.get("folds", c.cv.folds);
  cv.get("output", c.cv.output);
  cv.finish();

  Section mc = top.sub("montecarlo");
  mc.get("sample_sizes", c.montecarlo.sample_sizes);
  mc.get("replications", c.montecarlo.replications);
  mc.get("estimators", c.montecarlo.estimators);
  mc.get("tuning", c.montecarlo.tuning);
  mc.get("lambda", c.montecarlo.lambda);
  mc.get("folds", c.montecarlo.folds);
  mc.get("burn_in", c.montecarlo.burn_in);
  mc.get("output", c.montecarlo.output);
  mc.get("table", c.montecarlo.table);
  mc.finish();

  Section fc = top.sub("forecast");
  fc.get("input", c.forecast.input);
  fc.get("start", c.forecast.start);
  fc.get("end", c.forecast.end);
  fc.get("horizons", c.forecast.horizons);
  fc.get("tau_medium", c.forecast.tau_medium);
  fc.get("lags", c.forecast.lags);
  read_penalty(fc.sub("penalty"), c.forecast.penalty);
  fc.get("lambda", c.forecast.lambda);
  fc.get("path_points", c.forecast.path_points);
  fc.get("output_dir", c.forecast.output_dir);
  fc.finish();

  top.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigurationError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_toml(const RunConfig& c) {
  toml::table root;
  root.insert("general", toml::table{{"seed", as_int(c.general.seed)},
                                     {"threads", as_int(c.general.threads)},
                                     {"log_level", c.general.log_level}});
  root.insert("solver", toml::table{{"n_lambda", as_int(c.solver.n_lambda)},
                                    {"lambda_min_ratio", c.solver.lambda_min_ratio},
                                    {"max_iter", as_int(c.solver.max_iter)},
                                    {"tol", c.solver.tol},
                                    {"standardize", c.solver.standardize},
                                    {"fold_scheme", c.solver.fold_scheme}});
  root.insert("simulate", toml::table{{"T", as_int(c.simulate.T)},
                                      {"burn_in", as_int(c.simulate.burn_in)},
                                      {"output", c.simulate.output}});

  toml::table fit{{"input", c.fit.input},
                  {"lags", as_int(c.fit.lags)},
                  {"penalty", penalty_table(c.fit.penalty)},
                  {"certificate", c.fit.certificate},
                  {"covariance", c.fit.covariance},
                  {"long_run", c.fit.long_run},
                  {"output", c.fit.output}};
  if (c.fit.lambda) fit.insert("lambda", *c.fit.lambda);
  root.insert("fit", std::move(fit));

  root.insert("cv", toml::table{{"input", c.cv.input},
                                {"lags", as_int(c.cv.lags)},
                                {"penalty", penalty_table(c.cv.penalty)},
                                {"folds", as_int(c.cv.folds)},
                                {"output", c.cv.output}});

  toml::table mc{{"sample_sizes", to_array(c.montecarlo.sample_sizes)},
                 {"replications", as_int(c.montecarlo.replications)},
                 {"estimators", to_array(c.montecarlo.estimators)},
                 {"tuning", c.montecarlo.tuning},
                 {"folds", as_int(c.montecarlo.folds)},
                 {"burn_in", as_int(c.montecarlo.burn_in)},
                 {"output", c.montecarlo.output},
                 {"table", c.montecarlo.table}};
  if (c.montecarlo.lambda) mc.insert("lambda", *c.montecarlo.lambda);
  root.insert("montecarlo", std::move(mc));

  toml::table fc{{"input", c.forecast.input},
                 {"start", c.forecast.start},
                 {"end", c.forecast.end},
                 {"horizons", to_array(c.forecast.horizons)},
                 {"tau_medium", c.forecast.tau_medium},
                 {"lags", as_int(c.forecast.lags)},
                 {"penalty", penalty_table(c.forecast.penalty)},
                 {"path_points", as_int(c.forecast.path_points)},
                 {"output_dir", c.forecast.output_dir}};
  if (c.forecast.lambda) fc.insert("lambda", *c.forecast.lambda);
  root.insert("forecast", std::move(fc));

  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

ExperimentSpec make_experiment_spec(const RunConfig& c) {
  ExperimentSpec spec;
  spec.sample_sizes = c.montecarlo.sample_sizes;
  spec.replications = c.montecarlo.replications;
  spec.estimators.clear();
  for (const auto& e : c.montecarlo.estimators) spec.estimators.push_back(Estimator::parse(e));
  spec.tuning = parse_tuning_mode(c.montecarlo.tuning);
  spec.lambda = c.montecarlo.lambda;
  spec.folds = c.montecarlo.folds;
  spec.master_seed = c.general.seed;
  spec.burn_in = c.montecarlo.burn_in;
  spec.threads = c.general.threads;
  spec.fit = c.solver.to_fit_config();
  spec.validate();
  return spec;
}

ForecastOptions make_forecast_options(const RunConfig& c) {
  ForecastOptions o;
  o.horizons = c.forecast.horizons;
  o.tau_medium = c.forecast.tau_medium;
  o.svar.r = c.forecast.lags;
  o.svar.penalty = c.forecast.penalty.make(0.0);
  o.svar.lambda = c.forecast.lambda;
  o.svar.path_points = c.forecast.path_points;
  o.svar.fit = c.solver.to_fit_config();
  o.threads = c.general.threads;
  return o;
}

}  // namespace svar::app
