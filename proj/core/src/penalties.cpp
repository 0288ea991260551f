#include "svar/penalties.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "svar/types.hpp"

namespace svar {

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::L1:
      return "l1";
    case PenaltyKind::SCAD:
      return "scad";
    case PenaltyKind::MCP:
      return "mcp";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "l1" || lower == "lasso") return PenaltyKind::L1;
  if (lower == "scad") return PenaltyKind::SCAD;
  if (lower == "mcp") return PenaltyKind::MCP;
  throw ConfigurationError("unknown penalty '" + std::string(name) + "' (expected l1, scad or mcp)");
}

PenaltySpec::PenaltySpec(PenaltyKind kind, double lambda, std::optional<double> a)
    : kind_(kind), lambda_(lambda), a_(0.0) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ConfigurationError("penalty lambda must be finite and nonnegative");
  }
  switch (kind) {
    case PenaltyKind::L1:
      a_ = a.value_or(0.0);
      break;
    case PenaltyKind::SCAD:
      a_ = a.value_or(kDefaultScadShape);
      if (!(a_ > 2.0)) throw ConfigurationError("SCAD requires a > 2");
      break;
    case PenaltyKind::MCP:
      a_ = a.value_or(kDefaultMcpShape);
      if (!(a_ >= 1.0)) throw ConfigurationError("MCP requires a >= 1");
      break;
  }
}

double penalty_derivative(const PenaltySpec& spec, double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("penalty_derivative: x must be nonnegative");
  const double lam = spec.lambda();
  const double a = spec.a();
  switch (spec.kind()) {
    case PenaltyKind::L1:
      return lam;
    case PenaltyKind::SCAD:
      if (x <= lam) return lam;
      return std::max(a * lam - x, 0.0) / (a - 1.0);
    case PenaltyKind::MCP:
      return std::max(a * lam - x, 0.0) / a;
  }
  return 0.0;
}

double penalty_value(const PenaltySpec& spec, double x) {
  const double t = std::abs(x);
  const double lam = spec.lambda();
  const double a = spec.a();
  switch (spec.kind()) {
    case PenaltyKind::L1:
      return lam * t;
    case PenaltyKind::SCAD:
      if (t <= lam) return lam * t;
      if (t <= a * lam) return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0));
      return 0.5 * (a + 1.0) * lam * lam;
    case PenaltyKind::MCP:
      if (t <= a * lam) return lam * t - 0.5 * t * t / a;
      return 0.5 * a * lam * lam;
  }
  return 0.0;
}

double penalty_curvature(const PenaltySpec& spec, double x) {
  const double t = std::abs(x);
  const double lam = spec.lambda();
  const double a = spec.a();
  if (lam == 0.0) return 0.0;
  switch (spec.kind()) {
    case PenaltyKind::L1:
      return 0.0;
    case PenaltyKind::SCAD:
      return (t >= lam && t <= a * lam) ? 1.0 / (a - 1.0) : 0.0;
    case PenaltyKind::MCP:
      return t <= a * lam ? 1.0 / a : 0.0;
  }
  return 0.0;
}

double local_concavity(const PenaltySpec& spec, std::span<const double> coords) {
  if (!(spec.lambda() > 0.0)) throw DomainError("local_concavity: lambda must be positive");
  double kappa = 0.0;
  for (double x : coords) {
    if (x == 0.0) throw DomainError("local_concavity: coordinates must be nonzero");
    kappa = std::max(kappa, penalty_curvature(spec, x) / spec.lambda());
  }
  return kappa;
}

PenaltyDiagnostics diagnose(const PenaltySpec& spec, double d, long q, long T) {
  if (!(d > 0.0)) throw DomainError("diagnose: d must be positive");
  const double lam = spec.lambda();
  PenaltyDiagnostics out;
  out.lambda_rho_prime_at_d = penalty_derivative(spec, d);
  // rho' = p'/lambda; for L1 it is 1 for every lambda, including the limit lambda -> 0.
  out.rho_prime_at_d = lam > 0.0 ? out.lambda_rho_prime_at_d / lam : 1.0;
  out.d_over_lambda = lam > 0.0 ? d / lam : std::numeric_limits<double>::max();
  if (lam > 0.0) {
    const double a = spec.a();
    switch (spec.kind()) {
      case PenaltyKind::L1:
        out.kappa_sup = 0.0;
        break;
      case PenaltyKind::SCAD:
        // Curved piece [lam, a lam] meets (0, 2d] iff lam <= 2d.
        out.kappa_sup = lam <= 2.0 * d ? 1.0 / ((a - 1.0) * lam) : 0.0;
        break;
      case PenaltyKind::MCP:
        out.kappa_sup = 1.0 / (a * lam);
        break;
    }
  }
  const double scale = std::sqrt(static_cast<double>(q) * static_cast<double>(T));
  out.satisfies_A4a_hint = out.lambda_rho_prime_at_d * scale < 1.0;
  return out;
}

}  // namespace svar
