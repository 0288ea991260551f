#include "svar/qml.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "svar/var_model.hpp"

namespace svar {

namespace {

void check_dims(const Vector& theta, const Matrix& X, const Matrix& Y, const WeightingMatrix& w) {
  if (X.rows() != Y.rows()) throw DimensionError("X and Y must have the same number of rows");
  if (static_cast<std::size_t>(Y.cols()) != w.k()) throw DimensionError("Y columns differ from Sigma dimension");
  if (theta.size() != X.cols() * Y.cols()) throw DimensionError("theta length must equal kr * k");
  if (X.rows() == 0) throw InsufficientDataError("no observations");
}

void check_dims(const Vector& theta, const Moments& m, const WeightingMatrix& w) {
  if (m.equations() != w.k()) throw DimensionError("moments and Sigma dimensions differ");
  if (static_cast<std::size_t>(theta.size()) != m.regressors() * m.equations()) {
    throw DimensionError("theta length must equal kr * k");
  }
}

}  // namespace

WeightingMatrix WeightingMatrix::identity(std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  return WeightingMatrix(Matrix::Identity(kk, kk));
}

WeightingMatrix::WeightingMatrix(Matrix sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() == 0) {
    throw DimensionError("weighting matrix must be square and nonempty");
  }
  if (!sigma_.isApprox(sigma_.transpose(), 1e-12)) {
    throw ConfigurationError("weighting matrix must be symmetric");
  }
  Eigen::LLT<Matrix> llt(sigma_);
  if (llt.info() != Eigen::Success) throw ConfigurationError("weighting matrix must be positive definite");
  const auto k = sigma_.rows();
  inverse_ = llt.solve(Matrix::Identity(k, k));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose());
  inverse_chol_ = Eigen::LLT<Matrix>(inverse_).matrixL();
  const Matrix off = sigma_ - Matrix(sigma_.diagonal().asDiagonal());
  diagonal_ = off.cwiseAbs().maxCoeff() == 0.0;
  identity_ = diagonal_ && (sigma_.diagonal().array() == 1.0).all();
}

double loglik(const Vector& theta, const Matrix& X, const Matrix& Y, const WeightingMatrix& w) {
  check_dims(theta, X, Y, w);
  const Matrix B = theta_to_coefficients(theta, static_cast<std::size_t>(Y.cols()));
  const Matrix R = Y - X * B;
  const double quad = (R * w.inverse()).cwiseProduct(R).sum();
  return -0.5 * quad / static_cast<double>(X.rows());
}

double loglik(const Vector& theta, const Moments& m, const WeightingMatrix& w) {
  check_dims(theta, m, w);
  const Matrix B = theta_to_coefficients(theta, m.equations());
  // n^{-1} R^T R = yy - B^T xy - xy^T B + B^T xx B
  const Matrix rr = m.yy - B.transpose() * m.xy - m.xy.transpose() * B + B.transpose() * m.xx * B;
  return -0.5 * rr.cwiseProduct(w.inverse()).sum();
}

Vector score(const Vector& theta, const Matrix& X, const Matrix& Y, const WeightingMatrix& w) {
  check_dims(theta, X, Y, w);
  const Matrix B = theta_to_coefficients(theta, static_cast<std::size_t>(Y.cols()));
  const Matrix S = X.transpose() * (Y - X * B) * w.inverse() / static_cast<double>(X.rows());
  return coefficients_to_theta(S);
}

Vector score(const Vector& theta, const Moments& m, const WeightingMatrix& w) {
  check_dims(theta, m, w);
  const Matrix B = theta_to_coefficients(theta, m.equations());
  return coefficients_to_theta((m.xy - m.xx * B) * w.inverse());
}

Matrix per_period_scores(const Vector& theta, const Matrix& X, const Matrix& Y,
                         const WeightingMatrix& w) {
  check_dims(theta, X, Y, w);
  const Eigen::Index k = Y.cols();
  const Matrix B = theta_to_coefficients(theta, static_cast<std::size_t>(k));
  const Matrix WR = (Y - X * B) * w.inverse();  // row t is (W r_t)^T
  Matrix S(X.rows(), X.cols() * k);
  for (Eigen::Index t = 0; t < X.rows(); ++t) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      S.row(t).segment(c * k, k) = X(t, c) * WR.row(t);
    }
  }
  return S;
}

KroneckerHessian::KroneckerHessian(Matrix gram, Matrix weight_inverse)
    : gram_(std::move(gram)), weight_inverse_(std::move(weight_inverse)) {}

double KroneckerHessian::operator()(std::size_t row, std::size_t col) const {
  const auto k = static_cast<std::size_t>(weight_inverse_.rows());
  return -gram_(static_cast<Eigen::Index>(row / k), static_cast<Eigen::Index>(col / k)) *
         weight_inverse_(static_cast<Eigen::Index>(row % k), static_cast<Eigen::Index>(col % k));
}

Matrix KroneckerHessian::block(const IndexSet& support) const {
  const auto q = static_cast<Eigen::Index>(support.size());
  Matrix out(q, q);
  for (Eigen::Index a = 0; a < q; ++a) {
    for (Eigen::Index b = 0; b < q; ++b) {
      out(a, b) = (*this)(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

Matrix KroneckerHessian::dense() const {
  const Eigen::Index k = weight_inverse_.rows();
  const Eigen::Index m = gram_.rows();
  Matrix out(m * k, m * k);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) out.block(a * k, b * k, k, k) = -gram_(a, b) * weight_inverse_;
  }
  return out;
}

KroneckerHessian hessian(const Matrix& X, const WeightingMatrix& w) {
  if (X.rows() == 0) throw InsufficientDataError("hessian: no observations");
  return {X.transpose() * X / static_cast<double>(X.rows()), w.inverse()};
}

KroneckerHessian hessian(const Moments& m, const WeightingMatrix& w) {
  if (m.equations() != w.k()) throw DimensionError("moments and Sigma dimensions differ");
  return {m.xx, w.inverse()};
}

std::size_t default_bartlett_bandwidth(std::size_t n) {
  return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

Matrix sandwich_covariance(const Vector& theta_hat, const IndexSet& support, const Matrix& X,
                           const Matrix& Y, const WeightingMatrix& w,
                           const SandwichOptions& options) {
  check_dims(theta_hat, X, Y, w);
  if (support.empty()) throw ConfigurationError("sandwich_covariance: support must be nonempty");
  const auto q = static_cast<Eigen::Index>(support.size());
  const auto n = X.rows();

  const Matrix J = -hessian(X, w).block(support);
  Eigen::FullPivLU<Matrix> lu(J);
  if (!lu.isInvertible()) throw RankDeficiencyError("sandwich_covariance: restricted Hessian is singular");

  const Matrix all = per_period_scores(theta_hat, X, Y, w);
  Matrix s(n, q);
  for (Eigen::Index a = 0; a < q; ++a) s.col(a) = all.col(static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]));

  Matrix info = s.transpose() * s / static_cast<double>(n);
  if (options.estimator == LongRunVariance::Bartlett) {
    const std::size_t L = options.bandwidth.value_or(default_bartlett_bandwidth(static_cast<std::size_t>(n)));
    for (std::size_t lag = 1; lag <= L && static_cast<Eigen::Index>(lag) < n; ++lag) {
      const auto l = static_cast<Eigen::Index>(lag);
      const Matrix gamma = s.bottomRows(n - l).transpose() * s.topRows(n - l) / static_cast<double>(n);
      const double weight = 1.0 - static_cast<double>(lag) / static_cast<double>(L + 1);
      info += weight * (gamma + gamma.transpose());
    }
  }
  const Matrix Jinv = lu.inverse();
  Matrix V = Jinv * info * Jinv;
  return 0.5 * (V + V.transpose());
}

IndexSet support_of(const Vector& theta) {
  IndexSet out;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (theta(j) != 0.0) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

CertificateReport certify_local_max(const Vector& theta_hat, const PenaltySpec& spec,
                                    const Moments& m, const WeightingMatrix& w, double tol) {
  check_dims(theta_hat, m, w);
  const Vector S = score(theta_hat, m, w);
  const IndexSet active = support_of(theta_hat);

  CertificateReport rep;
  double inactive_sup = 0.0;
  std::size_t next = 0;
  for (Eigen::Index j = 0; j < theta_hat.size(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (next < active.size() && active[next] == ju) {
      ++next;
      const double t = theta_hat(j);
      const double target = penalty_derivative(spec, std::abs(t)) * (t > 0.0 ? 1.0 : -1.0);
      rep.stationarity_gap = std::max(rep.stationarity_gap, std::abs(S(j) - target));
    } else {
      inactive_sup = std::max(inactive_sup, std::abs(S(j)));
    }
  }
  rep.inactive_margin = penalty_derivative(spec, 0.0) - inactive_sup;

  if (active.empty()) {
    rep.eigen_margin = std::numeric_limits<double>::infinity();
  } else {
    const Matrix negH = -hessian(m, w).block(active);
    Eigen::SelfAdjointEigenSolver<Matrix> es(negH, Eigen::EigenvaluesOnly);
    double lambda_kappa = 0.0;  // lambda * kappa(rho; theta_active) = max_j -p''(|theta_j|)
    for (std::size_t j : active) {
      lambda_kappa = std::max(lambda_kappa, penalty_curvature(spec, theta_hat(static_cast<Eigen::Index>(j))));
    }
    rep.eigen_margin = es.eigenvalues().minCoeff() - lambda_kappa;
  }
  rep.passed = rep.stationarity_gap <= tol && rep.inactive_margin > 0.0 && rep.eigen_margin > 0.0;
  return rep;
}

CertificateReport certify_local_max(const Vector& theta_hat, const PenaltySpec& spec,
                                    const Matrix& X, const Matrix& Y, const WeightingMatrix& w,
                                    double tol) {
  check_dims(theta_hat, X, Y, w);
  return certify_local_max(theta_hat, spec, Moments::from(X, Y), w, tol);
}

}  // namespace svar
