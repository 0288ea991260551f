#include "svar/moments.hpp"

#include <cmath>

namespace svar {

Moments Moments::from(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows()) throw DimensionError("Moments: X and Y row counts differ");
  if (X.rows() == 0) throw InsufficientDataError("Moments: no rows");
  const double n = static_cast<double>(X.rows());
  Moments m;
  m.xx = Matrix(X.cols(), X.cols());
  m.xx.setZero();
  m.xx.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0 / n);
  m.xx = m.xx.selfadjointView<Eigen::Lower>();
  m.xy = X.transpose() * Y / n;
  m.yy = Y.transpose() * Y / n;
  m.n = n;
  return m;
}

Moments Moments::from_rows(const Matrix& X, const Matrix& Y, std::span<const std::size_t> rows) {
  Matrix xs(static_cast<Eigen::Index>(rows.size()), X.cols());
  Matrix ys(static_cast<Eigen::Index>(rows.size()), Y.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(rows[i]);
    if (src >= X.rows()) throw DimensionError("Moments: row index out of range");
    xs.row(static_cast<Eigen::Index>(i)) = X.row(src);
    ys.row(static_cast<Eigen::Index>(i)) = Y.row(src);
  }
  return from(xs, ys);
}

Moments Moments::without(const Moments& part) const {
  const double rest = n - part.n;
  if (!(rest > 0.0)) throw InsufficientDataError("Moments: removing all rows");
  Moments m;
  m.xx = (n * xx - part.n * part.xx) / rest;
  m.xy = (n * xy - part.n * part.xy) / rest;
  m.yy = (n * yy - part.n * part.yy) / rest;
  m.n = rest;
  return m;
}

Moments Moments::scaled(const Vector& scale) const {
  const Vector inv = scale.cwiseInverse();
  Moments m;
  m.xx = inv.asDiagonal() * xx * inv.asDiagonal();
  m.xy = inv.asDiagonal() * xy;
  m.yy = yy;
  m.n = n;
  return m;
}

Vector unit_second_moment_scale(const Moments& m) {
  Vector s = m.xx.diagonal().cwiseSqrt();
  for (Eigen::Index c = 0; c < s.size(); ++c) {
    if (!(s(c) > 0.0)) s(c) = 1.0;
  }
  return s;
}

}  // namespace svar
