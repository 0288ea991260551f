#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svar/types.hpp"

namespace svar {

/**
 * Parameter layout shared by every module.
 *
 * theta = vec(Phi^T) where Phi^T = (Phi_1, ..., Phi_r) is k x kr. With
 * regressor column c = lag * k + variable (lag counted from 0 for y_{t-1}),
 * entry theta[c * k + equation] is (Phi_{lag+1})(equation, variable).
 * Equivalently, theta is the kr x k coefficient matrix B of Y = X B + E
 * stored row-major.
 */
struct CoefficientIndex {
  std::size_t equation;
  std::size_t lag;  ///< 0-based: 0 means y_{t-1}
  std::size_t variable;
};

CoefficientIndex coefficient_index(std::size_t j, std::size_t k);
std::size_t flat_index(const CoefficientIndex& idx, std::size_t k);

/// kr x k matrix B with Y = X B, read from theta.
Matrix theta_to_coefficients(const Vector& theta, std::size_t k);
Vector coefficients_to_theta(const Matrix& B);

/// VAR(r) coefficient matrices Phi_1..Phi_r, each k x k.
class VarParams {
 public:
  explicit VarParams(std::vector<Matrix> lags);
  static VarParams from_theta(const Vector& theta, std::size_t k, std::size_t r);
  static VarParams zeros(std::size_t k, std::size_t r);

  std::size_t k() const noexcept { return k_; }
  std::size_t r() const noexcept { return lags_.size(); }
  std::size_t p() const noexcept { return k_ * k_ * lags_.size(); }
  const std::vector<Matrix>& lags() const noexcept { return lags_; }
  const Matrix& lag(std::size_t i) const { return lags_.at(i); }

  Vector theta() const;
  Matrix coefficients() const;  ///< kr x k, B = Phi

 private:
  std::size_t k_;
  std::vector<Matrix> lags_;
};

/// Gaussian innovations eps_t = U z_t, Sigma_eps = U U^T.
struct NoiseSpec {
  Matrix factor_u;
  std::uint64_t seed = 0;

  NoiseSpec(Matrix u, std::uint64_t seed_);
  Matrix covariance() const { return factor_u * factor_u.transpose(); }
};

struct TimeSeriesData {
  Matrix values;  ///< T x k, rows indexed by time
  std::vector<std::string> names;
  std::optional<std::vector<std::string>> dates;

  std::size_t length() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Default variable names y1..yk.
std::vector<std::string> default_names(std::size_t k);

Matrix companion_matrix(const VarParams& params);
double spectral_radius(const VarParams& params);
bool is_stable(const VarParams& params, double tol = 1e-10);

inline constexpr std::size_t kDefaultBurnIn = 500;

/// Draw T observations after burn_in discarded ones. Throws ConfigurationError if unstable.
TimeSeriesData simulate(const VarParams& params, const NoiseSpec& noise, std::size_t T,
                        std::size_t burn_in = kDefaultBurnIn);

/// Stacked regression y_t = B^T x_t + e_t, x_t = (y_{t-1}^T, ..., y_{t-r}^T)^T.
struct Regression {
  Matrix X;  ///< (T - r) x kr
  Matrix Y;  ///< (T - r) x k
};

Regression build_regression(const Matrix& values, std::size_t r);
inline Regression build_regression(const TimeSeriesData& data, std::size_t r) {
  return build_regression(data.values, r);
}

/// The sparse k = 8, r = 2 design and error factor used in the simulation study.
VarParams reference_design();
Matrix reference_noise_factor();

}  // namespace svar
