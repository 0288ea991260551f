#pragma once

#include <optional>

#include "svar/moments.hpp"
#include "svar/penalties.hpp"
#include "svar/types.hpp"

namespace svar {

/**
 * Positive definite weighting matrix Sigma of the quasi-Gaussian likelihood.
 * Sigma = I gives least squares; Sigma = Sigma_eps gives (infeasible) GLS.
 */
class WeightingMatrix {
 public:
  static WeightingMatrix identity(std::size_t k);
  explicit WeightingMatrix(Matrix sigma);

  std::size_t k() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }
  const Matrix& sigma() const noexcept { return sigma_; }
  const Matrix& inverse() const noexcept { return inverse_; }
  /// Lower Cholesky factor L of Sigma^{-1} = L L^T.
  const Matrix& inverse_cholesky() const noexcept { return inverse_chol_; }
  bool is_diagonal() const noexcept { return diagonal_; }
  bool is_identity() const noexcept { return identity_; }

 private:
  Matrix sigma_;
  Matrix inverse_;
  Matrix inverse_chol_;
  bool diagonal_ = false;
  bool identity_ = false;
};

/// L_T(theta) = -(2n)^{-1} sum_t r_t^T Sigma^{-1} r_t, r_t = y_t - (x_t^T kron I) theta.
double loglik(const Vector& theta, const Matrix& X, const Matrix& Y, const WeightingMatrix& w);
double loglik(const Vector& theta, const Moments& m, const WeightingMatrix& w);

/// Exact gradient of loglik.
Vector score(const Vector& theta, const Matrix& X, const Matrix& Y, const WeightingMatrix& w);
Vector score(const Vector& theta, const Moments& m, const WeightingMatrix& w);

/// n x p matrix whose row t is s_t = (x_t kron Sigma^{-1}) r_t.
Matrix per_period_scores(const Vector& theta, const Matrix& X, const Matrix& Y,
                         const WeightingMatrix& w);

/**
 * H_T = -(X^T X / n) kron Sigma^{-1}, kept in factored form.
 * Entry ((c, i), (c', i')) at flat indices c*k+i, c'*k+i' is -G(c, c') W(i, i').
 */
class KroneckerHessian {
 public:
  KroneckerHessian(Matrix gram, Matrix weight_inverse);

  std::size_t p() const noexcept {
    return static_cast<std::size_t>(gram_.rows() * weight_inverse_.rows());
  }
  double operator()(std::size_t row, std::size_t col) const;
  Matrix block(const IndexSet& support) const;
  Matrix dense() const;

  const Matrix& gram() const noexcept { return gram_; }
  const Matrix& weight_inverse() const noexcept { return weight_inverse_; }

 private:
  Matrix gram_;
  Matrix weight_inverse_;
};

KroneckerHessian hessian(const Matrix& X, const WeightingMatrix& w);
KroneckerHessian hessian(const Moments& m, const WeightingMatrix& w);

enum class LongRunVariance { OuterProduct, Bartlett };

struct SandwichOptions {
  LongRunVariance estimator = LongRunVariance::OuterProduct;
  /// Bartlett lag truncation; defaults to floor(4 (n/100)^{2/9}).
  std::optional<std::size_t> bandwidth;
};

std::size_t default_bartlett_bandwidth(std::size_t n);

/**
 * J^{-1} I J^{-1} restricted to `support`, estimating Var(sqrt(n)(theta_hat - theta0)) on it.
 * Throws RankDeficiencyError when the restricted Hessian block is singular.
 */
Matrix sandwich_covariance(const Vector& theta_hat, const IndexSet& support, const Matrix& X,
                           const Matrix& Y, const WeightingMatrix& w,
                           const SandwichOptions& options = {});

struct CertificateReport {
  double stationarity_gap = 0.0;  ///< max over the active set of |S_j - p'(|theta_j|) sgn theta_j|
  double inactive_margin = 0.0;   ///< lambda rho'(0+) - max over inactive of |S_j|
  double eigen_margin = 0.0;      ///< lambda_min(-H_active) - lambda kappa(theta_active)
  bool passed = false;
};

/**
 * Numerical check of the sufficient conditions for theta_hat to be a strict
 * local maximizer of L_T - sum p_lambda(|theta_j|). An empty active set
 * makes the stationarity and curvature conditions vacuous (gap 0, margin +inf).
 */
CertificateReport certify_local_max(const Vector& theta_hat, const PenaltySpec& spec,
                                    const Matrix& X, const Matrix& Y, const WeightingMatrix& w,
                                    double tol = 1e-6);
CertificateReport certify_local_max(const Vector& theta_hat, const PenaltySpec& spec,
                                    const Moments& m, const WeightingMatrix& w,
                                    double tol = 1e-6);

/// Indices of nonzero entries.
IndexSet support_of(const Vector& theta);

}  // namespace svar
