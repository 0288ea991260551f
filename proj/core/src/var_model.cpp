#include "svar/var_model.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "svar/rng.hpp"

namespace svar {

CoefficientIndex coefficient_index(std::size_t j, std::size_t k) {
  const std::size_t column = j / k;
  return {j % k, column / k, column % k};
}

std::size_t flat_index(const CoefficientIndex& idx, std::size_t k) {
  return (idx.lag * k + idx.variable) * k + idx.equation;
}

Matrix theta_to_coefficients(const Vector& theta, std::size_t k) {
  if (k == 0 || theta.size() % static_cast<Eigen::Index>(k) != 0) {
    throw DimensionError("theta length is not a multiple of k");
  }
  const Eigen::Index rows = theta.size() / static_cast<Eigen::Index>(k);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(theta.data(), rows, static_cast<Eigen::Index>(k));
}

Vector coefficients_to_theta(const Matrix& B) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor rm = B;
  return Eigen::Map<const Vector>(rm.data(), rm.size());
}

VarParams::VarParams(std::vector<Matrix> lags) : k_(0), lags_(std::move(lags)) {
  if (lags_.empty()) throw ConfigurationError("VarParams needs at least one lag");
  k_ = static_cast<std::size_t>(lags_.front().rows());
  if (k_ == 0) throw ConfigurationError("VarParams dimension must be positive");
  for (const auto& m : lags_) {
    if (static_cast<std::size_t>(m.rows()) != k_ || static_cast<std::size_t>(m.cols()) != k_) {
      throw DimensionError("all lag matrices must be k x k");
    }
  }
}

VarParams VarParams::from_theta(const Vector& theta, std::size_t k, std::size_t r) {
  if (static_cast<std::size_t>(theta.size()) != k * k * r) {
    throw DimensionError("theta length must be k^2 r");
  }
  const Matrix B = theta_to_coefficients(theta, k);
  std::vector<Matrix> lags;
  lags.reserve(r);
  const auto kk = static_cast<Eigen::Index>(k);
  for (std::size_t l = 0; l < r; ++l) {
    lags.emplace_back(B.block(static_cast<Eigen::Index>(l) * kk, 0, kk, kk).transpose());
  }
  return VarParams(std::move(lags));
}

VarParams VarParams::zeros(std::size_t k, std::size_t r) {
  const auto kk = static_cast<Eigen::Index>(k);
  return VarParams(std::vector<Matrix>(r, Matrix::Zero(kk, kk)));
}

Matrix VarParams::coefficients() const {
  const auto kk = static_cast<Eigen::Index>(k_);
  Matrix B(kk * static_cast<Eigen::Index>(r()), kk);
  for (std::size_t l = 0; l < r(); ++l) {
    B.block(static_cast<Eigen::Index>(l) * kk, 0, kk, kk) = lags_[l].transpose();
  }
  return B;
}

Vector VarParams::theta() const { return coefficients_to_theta(coefficients()); }

NoiseSpec::NoiseSpec(Matrix u, std::uint64_t seed_) : factor_u(std::move(u)), seed(seed_) {
  if (factor_u.rows() != factor_u.cols() || factor_u.rows() == 0) {
    throw DimensionError("noise factor U must be square");
  }
  Eigen::LLT<Matrix> llt(factor_u * factor_u.transpose());
  if (llt.info() != Eigen::Success || (llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any()) {
    throw ConfigurationError("U U^T must be positive definite");
  }
}

std::vector<std::string> default_names(std::size_t k) {
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t i = 0; i < k; ++i) names.push_back("y" + std::to_string(i + 1));
  return names;
}

Matrix companion_matrix(const VarParams& params) {
  const auto k = static_cast<Eigen::Index>(params.k());
  const auto r = static_cast<Eigen::Index>(params.r());
  Matrix F = Matrix::Zero(k * r, k * r);
  for (Eigen::Index l = 0; l < r; ++l) F.block(0, l * k, k, k) = params.lag(static_cast<std::size_t>(l));
  if (r > 1) F.block(k, 0, k * (r - 1), k * (r - 1)).setIdentity();
  return F;
}

double spectral_radius(const VarParams& params) {
  Eigen::EigenSolver<Matrix> es(companion_matrix(params), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const VarParams& params, double tol) { return spectral_radius(params) < 1.0 - tol; }

TimeSeriesData simulate(const VarParams& params, const NoiseSpec& noise, std::size_t T,
                        std::size_t burn_in) {
  const std::size_t k = params.k();
  if (static_cast<std::size_t>(noise.factor_u.rows()) != k) {
    throw DimensionError("noise factor dimension differs from VAR dimension");
  }
  if (!is_stable(params)) throw ConfigurationError("simulate: VAR parameters are not stable");

  const std::size_t r = params.r();
  const std::size_t total = T + burn_in;
  const auto kk = static_cast<Eigen::Index>(k);
  // The first r rows are the zero initial state.
  Matrix path = Matrix::Zero(static_cast<Eigen::Index>(total + r), kk);

  Rng rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(kk);
  Vector y(kk);
  for (std::size_t t = 0; t < total; ++t) {
    const auto row = static_cast<Eigen::Index>(t + r);
    for (Eigen::Index i = 0; i < kk; ++i) z(i) = normal(rng);
    y.noalias() = noise.factor_u * z;
    for (std::size_t l = 0; l < r; ++l) {
      y.noalias() += params.lag(l) * path.row(row - 1 - static_cast<Eigen::Index>(l)).transpose();
    }
    path.row(row) = y.transpose();
  }

  TimeSeriesData out;
  out.values = path.bottomRows(static_cast<Eigen::Index>(T));
  out.names = default_names(k);
  return out;
}

Regression build_regression(const Matrix& values, std::size_t r) {
  const auto T = static_cast<std::size_t>(values.rows());
  if (r == 0) throw ConfigurationError("lag order must be positive");
  if (T <= r) throw InsufficientDataError("build_regression: need more than r observations");
  const auto k = values.cols();
  const auto n = static_cast<Eigen::Index>(T - r);
  const auto rr = static_cast<Eigen::Index>(r);
  Regression reg{Matrix(n, k * rr), values.bottomRows(n)};
  for (Eigen::Index l = 0; l < rr; ++l) {
    reg.X.middleCols(l * k, k) = values.middleRows(rr - 1 - l, n);
  }
  return reg;
}

VarParams reference_design() {
  Matrix phi1 = Matrix::Zero(8, 8);
  Matrix phi2 = Matrix::Zero(8, 8);
  phi1(0, 0) = 0.7;
  phi1(0, 1) = 0.1;
  phi1(1, 1) = 0.4;
  phi1(1, 2) = 0.1;
  phi1(2, 0) = 0.6;
  phi1(2, 1) = -0.2;
  phi1(2, 2) = 0.6;
  phi1(3, 2) = -0.2;
  phi1(3, 3) = 0.4;
  phi1(4, 4) = 0.3;

  phi2(0, 0) = -0.2;
  phi2(1, 1) = 0.2;
  phi2(1, 2) = 0.1;
  phi2(3, 3) = -0.3;
  phi2(4, 4) = -0.4;
  return VarParams({phi1, phi2});
}

Matrix reference_noise_factor() {
  Matrix u = Matrix::Zero(8, 8);
  u(0, 0) = 0.5;
  u(0, 1) = 0.1;
  u(1, 1) = 0.3;
  u(2, 2) = 0.9;
  u(3, 2) = 0.2;
  u(3, 3) = 0.4;
  u(4, 3) = -0.2;
  u(4, 4) = 0.3;
  for (Eigen::Index i = 5; i < 8; ++i) u(i, i) = 0.3;
  return u;
}

}  // namespace svar
