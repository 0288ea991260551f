#pragma once

#include <span>

#include "svar/types.hpp"

namespace svar {

/**
 * Sufficient statistics of the quadratic VAR loss for a set of regression rows.
 *
 * All three blocks are averages over the n rows, so the loss, score and
 * Hessian of any coefficient matrix can be evaluated without touching the
 * raw data again. Moments of disjoint row sets combine exactly, which is
 * how cross-validation forms its training sets.
 */
struct Moments {
  Matrix xx;  ///< X^T X / n, kr x kr
  Matrix xy;  ///< X^T Y / n, kr x k
  Matrix yy;  ///< Y^T Y / n, k x k
  double n = 0.0;

  static Moments from(const Matrix& X, const Matrix& Y);
  static Moments from_rows(const Matrix& X, const Matrix& Y, std::span<const std::size_t> rows);

  /// Moments of the rows in *this that are not in `part` (part must be a subset).
  Moments without(const Moments& part) const;

  /// Moments of the design with column c divided by scale(c).
  Moments scaled(const Vector& scale) const;

  std::size_t regressors() const noexcept { return static_cast<std::size_t>(xx.rows()); }
  std::size_t equations() const noexcept { return static_cast<std::size_t>(xy.cols()); }
};

/// Column scales that give every regressor unit sample second moment; zero columns keep scale 1.
Vector unit_second_moment_scale(const Moments& m);

}  // namespace svar
