#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace svar {

enum class PenaltyKind { L1, SCAD, MCP };

/// Config spelling: "l1" | "scad" | "mcp".
std::string to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(std::string_view name);

/// Default shape parameters used when a config omits `a`.
inline constexpr double kDefaultScadShape = 3.7;
inline constexpr double kDefaultMcpShape = 3.0;

/**
 * A member of the folded-concave penalty family, p_lambda(|x|).
 *
 * lambda = 0 is accepted and means "no penalty"; every derivative and value
 * is then identically zero. The shape parameter must satisfy a > 2 for SCAD
 * and a >= 1 for MCP, and is ignored for L1.
 */
class PenaltySpec {
 public:
  PenaltySpec(PenaltyKind kind, double lambda, std::optional<double> a = std::nullopt);

  static PenaltySpec lasso(double lambda) { return {PenaltyKind::L1, lambda}; }
  static PenaltySpec scad(double lambda, double a = kDefaultScadShape) {
    return {PenaltyKind::SCAD, lambda, a};
  }
  static PenaltySpec mcp(double lambda, double a = kDefaultMcpShape) {
    return {PenaltyKind::MCP, lambda, a};
  }

  PenaltyKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  double a() const noexcept { return a_; }

  PenaltySpec with_lambda(double lambda) const { return {kind_, lambda, a_}; }

  friend bool operator==(const PenaltySpec&, const PenaltySpec&) = default;

 private:
  PenaltyKind kind_;
  double lambda_;
  double a_;
};

/// p'_lambda(x) for x >= 0. Throws DomainError on negative x.
double penalty_derivative(const PenaltySpec& spec, double x);

/// p_lambda(|x|), the exact antiderivative of penalty_derivative with p(0) = 0.
double penalty_value(const PenaltySpec& spec, double x);

/**
 * -p''_lambda(|x|), the curvature lost by the penalty at |x|.
 *
 * Branch points take the value of the adjacent curved piece, which is what
 * the two-sided limit defining local concavity produces there.
 */
double penalty_curvature(const PenaltySpec& spec, double x);

/// max_j -rho''(|x_j|) with rho = p_lambda / lambda. Requires lambda > 0 and nonzero coords.
double local_concavity(const PenaltySpec& spec, std::span<const double> coords);

struct PenaltyDiagnostics {
  double rho_prime_at_d = 0.0;
  double lambda_rho_prime_at_d = 0.0;
  double d_over_lambda = 0.0;
  /// Supremum of the local concavity over the interval (0, 2d].
  double kappa_sup = 0.0;
  /// lambda * rho'(d) * sqrt(q T) < 1. A finite-sample hint, not a verdict.
  bool satisfies_A4a_hint = false;
};

/// Finite-sample report on the signal-strength conditions for half-minimum-signal d.
PenaltyDiagnostics diagnose(const PenaltySpec& spec, double d, long q, long T);

}  // namespace svar
