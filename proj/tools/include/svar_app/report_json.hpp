#pragma once

#include <json.hpp>

#include "svar/forecast.hpp"
#include "svar/montecarlo.hpp"
#include "svar/qml.hpp"
#include "svar/solver.hpp"

namespace svar::app {

using nlohmann::json;

/// Non-finite values become null.
json number(double x);
json to_json(const Vector& v);
json to_json(const Matrix& m);  ///< array of rows
json to_json(const CertificateReport& c);
/// theta as a sparse {"index": value} map over the support, plus its length p.
json to_json(const FitResult& fit);
json to_json(const CvResult& cv);
json to_json(const ExperimentReport& report);
json to_json(const ForecastReport& report);

}  // namespace svar::app
