#include "svar_app/report_json.hpp"

#include <cmath>

namespace svar::app {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

json to_json(const CertificateReport& c) {
  return {{"stationarity_gap", number(c.stationarity_gap)},
          {"inactive_margin", number(c.inactive_margin)},
          {"eigen_margin", number(c.eigen_margin)},
          {"passed", c.passed}};
}

json to_json(const FitResult& fit) {
  json theta = json::object();
  for (std::size_t j : fit.support) theta[std::to_string(j)] = number(fit.theta(static_cast<Eigen::Index>(j)));
  json out{{"p", fit.theta.size()},
           {"theta", theta},
           {"support", fit.support},
           {"lambda", number(fit.lambda)},
           {"n_iter", fit.n_iter},
           {"converged", fit.converged},
           {"objective", number(fit.objective)}};
  if (fit.certificate) out["certificate"] = to_json(*fit.certificate);
  return out;
}

json to_json(const CvResult& cv) {
  json loss = json::array();
  for (double l : cv.cv_loss) loss.push_back(number(l));
  return {{"best_lambda", number(cv.best_lambda)},
          {"best_index", cv.best_index},
          {"lambdas", cv.lambdas},
          {"cv_loss", loss},
          {"fit", to_json(cv.fit)}};
}

json to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json cell{{"T", c.T},
              {"estimator", c.estimator.label()},
              {"replications", c.replications},
              {"failures", c.failures},
              {"errors", c.errors},
              {"rmse", number(c.metrics.rmse)},
              {"stdev", number(c.metrics.stdev)},
              {"mean_lambda", number(c.mean_lambda)},
              {"seconds", c.seconds}};
    if (c.estimator.penalized()) {
      cell["mssc_overall"] = number(c.metrics.mssc_overall);
      cell["mssc_nonzero"] = number(c.metrics.mssc_nonzero);
      cell["mssc_zero"] = number(c.metrics.mssc_zero);
    }
    if (c.pilot_lambda) cell["pilot_lambda"] = number(*c.pilot_lambda);
    cells.push_back(std::move(cell));
  }
  return {{"master_seed", report.master_seed}, {"total_seconds", report.total_seconds}, {"cells", cells}};
}

json to_json(const ForecastReport& report) {
  return {{"maturities", report.maturities},
          {"horizons", report.horizons},
          {"counts", report.counts},
          {"start", report.start.iso()},
          {"end", report.end.iso()},
          {"rmse", {{"dns", to_json(report.rmse_dns)}, {"svar", to_json(report.rmse_svar)}, {"random_walk", to_json(report.rmse_rw)}}},
          {"ratio_svar_dns", to_json(report.svar_over_dns())},
          {"ratio_svar_rw", to_json(report.svar_over_rw())},
          {"mean_lambda", number(report.mean_lambda)},
          {"seconds", report.seconds}};
}

}  // namespace svar::app
