#include "svar/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace svar {

void FitConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigurationError("FitConfig: tol must be positive");
  if (max_iter == 0) throw ConfigurationError("FitConfig: max_iter must be positive");
  if (lambda_grid.empty()) {
    if (n_lambda == 0) throw ConfigurationError("FitConfig: n_lambda must be positive");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0)) {
      throw ConfigurationError("FitConfig: lambda_min_ratio must lie in (0, 1]");
    }
  }
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] >= 0.0) || !std::isfinite(lambda_grid[i])) {
      throw ConfigurationError("FitConfig: lambda values must be finite and nonnegative");
    }
    if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1])) {
      throw ConfigurationError("FitConfig: lambda grid must be strictly descending");
    }
  }
}

namespace {

double scalar_objective(double theta, double z, double v, const PenaltySpec& spec) {
  const double d = theta - z;
  return 0.5 * v * d * d + penalty_value(spec, theta);
}

// Global minimizer over theta >= 0 for z > 0 by enumerating piecewise optima.
double nonnegative_minimizer(double z, double v, const PenaltySpec& spec) {
  const double lam = spec.lambda();
  const double a = spec.a();
  std::array<double, 6> cand{};
  std::size_t n = 0;
  cand[n++] = 0.0;
  switch (spec.kind()) {
    case PenaltyKind::L1:
      cand[n++] = std::max(0.0, z - lam / v);
      break;
    case PenaltyKind::SCAD: {
      cand[n++] = std::clamp(z - lam / v, 0.0, lam);
      const double curv = 1.0 / (a - 1.0);
      if (v > curv) {
        cand[n++] = std::clamp((v * z - a * lam * curv) / (v - curv), lam, a * lam);
      } else {
        cand[n++] = lam;
        cand[n++] = a * lam;
      }
      cand[n++] = std::max(z, a * lam);
      break;
    }
    case PenaltyKind::MCP: {
      const double curv = 1.0 / a;
      if (v > curv) {
        cand[n++] = std::clamp((v * z - lam) / (v - curv), 0.0, a * lam);
      } else {
        cand[n++] = a * lam;
      }
      cand[n++] = std::max(z, a * lam);
      break;
    }
  }
  std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n));
  double best = cand[0];
  double best_val = scalar_objective(best, z, v, spec);
  for (std::size_t i = 1; i < n; ++i) {
    const double val = scalar_objective(cand[i], z, v, spec);
    if (val < best_val) {
      best = cand[i];
      best_val = val;
    }
  }
  return best;
}

// Closed forms for the strictly convex scalar problems.
double convex_minimizer(double z, double v, const PenaltySpec& spec) {
  const double lam = spec.lambda();
  const double a = spec.a();
  switch (spec.kind()) {
    case PenaltyKind::L1:
      return std::max(0.0, z - lam / v);
    case PenaltyKind::SCAD: {
      if (z <= lam * (1.0 + 1.0 / v)) return std::max(0.0, z - lam / v);
      if (z <= a * lam) {
        const double curv = 1.0 / (a - 1.0);
        return (v * z - a * lam * curv) / (v - curv);
      }
      return z;
    }
    case PenaltyKind::MCP:
      if (z <= a * lam) return std::max(0.0, v * z - lam) / (v - 1.0 / a);
      return z;
  }
  return z;
}

bool scalar_problem_convex(double v, const PenaltySpec& spec) {
  switch (spec.kind()) {
    case PenaltyKind::L1:
      return true;
    case PenaltyKind::SCAD:
      return v > 1.0 / (spec.a() - 1.0);
    case PenaltyKind::MCP:
      return v > 1.0 / spec.a();
  }
  return false;
}

// p'(t) = alpha - beta * t on the smooth piece containing t > 0. Piece ids let
// the polishing step check that a solution stayed on the same piece.
struct LinearPiece {
  int id;
  double alpha;
  double beta;
};

LinearPiece piece_at(double t, const PenaltySpec& spec) {
  const double lam = spec.lambda();
  const double a = spec.a();
  switch (spec.kind()) {
    case PenaltyKind::L1:
      return {0, lam, 0.0};
    case PenaltyKind::SCAD:
      if (t <= lam) return {0, lam, 0.0};
      if (t < a * lam) return {1, a * lam / (a - 1.0), 1.0 / (a - 1.0)};
      return {2, 0.0, 0.0};
    case PenaltyKind::MCP:
      if (t < a * lam) return {0, lam, 1.0 / a};
      return {1, 0.0, 0.0};
  }
  return {0, 0.0, 0.0};
}

void check_finite(const Moments& m) {
  if (!m.xx.allFinite() || !m.xy.allFinite() || !m.yy.allFinite()) {
    throw NumericError("non-finite values in regression data");
  }
}

// Moments on the working scale plus the column scale that maps back.
struct Problem {
  Moments m;
  Vector scale;

  Problem(const Moments& raw, bool standardize) {
    if (standardize) {
      scale = unit_second_moment_scale(raw);
      m = raw.scaled(scale);
    } else {
      scale = Vector::Ones(static_cast<Eigen::Index>(raw.regressors()));
      m = raw;
    }
  }

  Matrix to_working(const Matrix& B_raw) const { return scale.asDiagonal() * B_raw; }
  Matrix to_raw(const Matrix& B_work) const { return scale.cwiseInverse().asDiagonal() * B_work; }
};

class CoordinateEngine {
 public:
  CoordinateEngine(const Moments& m, const WeightingMatrix& w)
      : m_(m), W_(w.inverse()), identity_(w.is_identity()), diagonal_(w.is_diagonal()) {
    const auto rows = static_cast<Eigen::Index>(m.regressors());
    const auto k = static_cast<Eigen::Index>(m.equations());
    curvature_.resize(rows * k);
    for (Eigen::Index c = 0; c < rows; ++c) {
      for (Eigen::Index i = 0; i < k; ++i) curvature_(c * k + i) = m.xx(c, c) * W_(i, i);
    }
    all_.resize(static_cast<std::size_t>(rows * k));
    for (std::size_t j = 0; j < all_.size(); ++j) all_[j] = j;
    set_start(Matrix::Zero(rows, k));
  }

  void set_start(const Matrix& B0) {
    B_ = B0;
    M_ = m_.xy - m_.xx * B_;
  }

  const Matrix& coefficients() const noexcept { return B_; }

  // Returns (sweeps, converged).
  std::pair<std::size_t, bool> run(const PenaltySpec& spec, const FitConfig& cfg) {
    std::size_t sweeps = 0;
    std::vector<std::size_t> active;
    while (sweeps < cfg.max_iter) {
      const double full_change = sweep(all_, spec);
      ++sweeps;
      if (full_change < cfg.tol) {
        polish(spec);
        return {sweeps, true};
      }
      active.clear();
      const auto k = static_cast<std::size_t>(B_.cols());
      for (std::size_t j : all_) {
        if (B_(static_cast<Eigen::Index>(j / k), static_cast<Eigen::Index>(j % k)) != 0.0) active.push_back(j);
      }
      while (sweeps < cfg.max_iter) {
        const double change = sweep(active, spec);
        ++sweeps;
        if (change < cfg.tol) break;
      }
    }
    return {sweeps, false};
  }

 private:
  double working_score(Eigen::Index c, Eigen::Index i) const {
    if (identity_) return M_(c, i);
    if (diagonal_) return M_(c, i) * W_(i, i);
    return M_.row(c).dot(W_.col(i));
  }

  double sweep(const std::vector<std::size_t>& coords, const PenaltySpec& spec) {
    const auto k = static_cast<std::size_t>(B_.cols());
    double max_change = 0.0;
    for (std::size_t j : coords) {
      const double v = curvature_(static_cast<Eigen::Index>(j));
      if (!(v > 0.0)) continue;
      const auto c = static_cast<Eigen::Index>(j / k);
      const auto i = static_cast<Eigen::Index>(j % k);
      const double old = B_(c, i);
      const double z = old + working_score(c, i) / v;
      const double updated = univariate_update(z, v, spec);
      const double delta = updated - old;
      if (delta != 0.0) {
        B_(c, i) = updated;
        M_.col(i).noalias() -= m_.xx.col(c) * delta;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    return max_change;
  }

  // Solve the stationarity equations exactly on the active set with signs and
  // penalty pieces frozen; keep the result only if it stays consistent.
  void polish(const PenaltySpec& spec) {
    const auto k = static_cast<std::size_t>(B_.cols());
    std::vector<std::size_t> active;
    for (std::size_t j : all_) {
      if (B_(static_cast<Eigen::Index>(j / k), static_cast<Eigen::Index>(j % k)) != 0.0 &&
          curvature_(static_cast<Eigen::Index>(j)) > 0.0) {
        active.push_back(j);
      }
    }
    if (active.empty()) return;

    Matrix candidate = B_;
    std::vector<std::vector<std::size_t>> groups;
    if (diagonal_) {
      groups.resize(k);
      for (std::size_t j : active) groups[j % k].push_back(j);
    } else {
      groups.push_back(active);
    }
    const Matrix b = m_.xy * W_;
    for (const auto& g : groups) {
      if (g.empty()) continue;
      const auto q = static_cast<Eigen::Index>(g.size());
      Matrix H(q, q);
      Vector rhs(q);
      for (Eigen::Index a = 0; a < q; ++a) {
        const std::size_t ja = g[static_cast<std::size_t>(a)];
        const auto ca = static_cast<Eigen::Index>(ja / k);
        const auto ia = static_cast<Eigen::Index>(ja % k);
        const double theta = B_(ca, ia);
        const LinearPiece piece = piece_at(std::abs(theta), spec);
        const double sgn = theta > 0.0 ? 1.0 : -1.0;
        for (Eigen::Index bb = 0; bb < q; ++bb) {
          const std::size_t jb = g[static_cast<std::size_t>(bb)];
          H(a, bb) = m_.xx(ca, static_cast<Eigen::Index>(jb / k)) * W_(ia, static_cast<Eigen::Index>(jb % k));
        }
        H(a, a) -= piece.beta;
        rhs(a) = b(ca, ia) - piece.alpha * sgn;
      }
      Eigen::PartialPivLU<Matrix> lu(H);
      const Vector sol = lu.solve(rhs);
      if (!sol.allFinite() || (H * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
        return;
      }
      for (Eigen::Index a = 0; a < q; ++a) {
        const std::size_t ja = g[static_cast<std::size_t>(a)];
        const auto ca = static_cast<Eigen::Index>(ja / k);
        const auto ia = static_cast<Eigen::Index>(ja % k);
        const double before = B_(ca, ia);
        const double after = sol(a);
        if ((before > 0.0) != (after > 0.0) || after == 0.0) return;
        if (piece_at(std::abs(before), spec).id != piece_at(std::abs(after), spec).id) return;
        candidate(ca, ia) = after;
      }
    }

    const Matrix candidate_M = m_.xy - m_.xx * candidate;
    // Zero coordinates must remain coordinatewise optimal.
    const Matrix S = candidate_M * W_;
    for (std::size_t j : all_) {
      const auto c = static_cast<Eigen::Index>(j / k);
      const auto i = static_cast<Eigen::Index>(j % k);
      const double v = curvature_(static_cast<Eigen::Index>(j));
      if (candidate(c, i) != 0.0 || !(v > 0.0)) continue;
      if (univariate_update(S(c, i) / v, v, spec) != 0.0) return;
    }
    if (objective(candidate, spec) + 1e-12 * (1.0 + std::abs(objective(B_, spec))) < objective(B_, spec)) return;
    B_ = candidate;
    M_ = candidate_M;
  }

  double objective(const Matrix& B, const PenaltySpec& spec) const {
    const Matrix rr = m_.yy - B.transpose() * m_.xy - m_.xy.transpose() * B + B.transpose() * m_.xx * B;
    double q = -0.5 * rr.cwiseProduct(W_).sum();
    for (Eigen::Index idx = 0; idx < B.size(); ++idx) q -= penalty_value(spec, B.data()[idx]);
    return q;
  }

  const Moments& m_;
  const Matrix& W_;
  bool identity_;
  bool diagonal_;
  Vector curvature_;
  std::vector<std::size_t> all_;
  Matrix B_;
  Matrix M_;
};

FitResult make_result(const Problem& prob, const Matrix& B_work, const WeightingMatrix& w,
                      const PenaltySpec& spec, std::size_t iters, bool converged) {
  FitResult out;
  out.theta = coefficients_to_theta(prob.to_raw(B_work));
  out.support = support_of(out.theta);
  out.lambda = spec.lambda();
  out.n_iter = iters;
  out.converged = converged;
  const Vector work = coefficients_to_theta(B_work);
  double q = loglik(work, prob.m, w);
  for (Eigen::Index j = 0; j < work.size(); ++j) q -= penalty_value(spec, work(j));
  out.objective = q;
  return out;
}

Matrix initial_coefficients(const Vector& init, const Moments& m) {
  const auto rows = static_cast<Eigen::Index>(m.regressors());
  const auto k = static_cast<Eigen::Index>(m.equations());
  if (init.size() == 0) return Matrix::Zero(rows, k);
  if (init.size() != rows * k) throw DimensionError("initial theta has the wrong length");
  return theta_to_coefficients(init, static_cast<std::size_t>(k));
}

}  // namespace

double univariate_update(double z, double v, const PenaltySpec& spec) {
  if (!(v > 0.0)) throw DomainError("univariate_update: v must be positive");
  if (z == 0.0) return 0.0;
  const double az = std::abs(z);
  const double t = scalar_problem_convex(v, spec) ? convex_minimizer(az, v, spec)
                                                   : nonnegative_minimizer(az, v, spec);
  return z > 0.0 ? t : -t;
}

double lambda_max(const Moments& m, const WeightingMatrix& w, bool standardize) {
  if (m.equations() != w.k()) throw DimensionError("moments and Sigma dimensions differ");
  const Problem prob(m, standardize);
  // ||S_T(0)||_inf / rho'(0+), and rho'(0+) = 1 for every supported family.
  return (prob.m.xy * w.inverse()).cwiseAbs().maxCoeff();
}

double lambda_max(const Matrix& X, const Matrix& Y, const WeightingMatrix& w, bool standardize) {
  return lambda_max(Moments::from(X, Y), w, standardize);
}

std::vector<double> log_lambda_grid(double lmax, std::size_t n, double ratio) {
  if (!(lmax > 0.0)) return {0.0};
  if (n == 1) return {lmax};
  std::vector<double> grid(n);
  const double lo = std::log(lmax * ratio);
  const double hi = std::log(lmax);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::exp(hi + (lo - hi) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  grid.front() = lmax;
  return grid;
}

double penalized_objective(const Vector& theta, const Moments& m, const WeightingMatrix& w,
                           const PenaltySpec& spec, bool standardize) {
  const Problem prob(m, standardize);
  const Matrix B = prob.to_working(theta_to_coefficients(theta, m.equations()));
  const Vector work = coefficients_to_theta(B);
  double q = loglik(work, prob.m, w);
  for (Eigen::Index j = 0; j < work.size(); ++j) q -= penalty_value(spec, work(j));
  return q;
}

FitResult coordinate_descent(const Moments& m, const WeightingMatrix& w, const PenaltySpec& spec,
                             const Vector& init, const FitConfig& config) {
  config.validate();
  check_finite(m);
  if (m.equations() != w.k()) throw DimensionError("moments and Sigma dimensions differ");
  if (!(m.n >= 1.0)) throw InsufficientDataError("coordinate_descent: no regression rows");
  const Problem prob(m, config.standardize);
  CoordinateEngine engine(prob.m, w);
  engine.set_start(prob.to_working(initial_coefficients(init, m)));
  const auto [iters, converged] = engine.run(spec, config);
  return make_result(prob, engine.coefficients(), w, spec, iters, converged);
}

FitResult coordinate_descent(const Matrix& X, const Matrix& Y, const WeightingMatrix& w,
                             const PenaltySpec& spec, const Vector& init, const FitConfig& config) {
  if (!X.allFinite() || !Y.allFinite()) throw NumericError("non-finite values in regression data");
  return coordinate_descent(Moments::from(X, Y), w, spec, init, config);
}

std::vector<FitResult> fit_path(const Moments& m, const WeightingMatrix& w, const PenaltySpec& base_spec,
                                const FitConfig& config, std::size_t stop_after) {
  config.validate();
  check_finite(m);
  if (m.equations() != w.k()) throw DimensionError("moments and Sigma dimensions differ");
  const std::vector<double> grid =
      config.lambda_grid.empty()
          ? log_lambda_grid(lambda_max(m, w, config.standardize), config.n_lambda, config.lambda_min_ratio)
          : config.lambda_grid;
  const Problem prob(m, config.standardize);
  CoordinateEngine engine(prob.m, w);
  std::vector<FitResult> path;
  path.reserve(std::min(grid.size(), stop_after == SIZE_MAX ? grid.size() : stop_after + 1));
  for (std::size_t i = 0; i < grid.size() && i <= stop_after; ++i) {
    const PenaltySpec spec = base_spec.with_lambda(grid[i]);
    const auto [iters, converged] = engine.run(spec, config);
    path.push_back(make_result(prob, engine.coefficients(), w, spec, iters, converged));
  }
  return path;
}

std::vector<FitResult> fit_path(const Matrix& X, const Matrix& Y, const WeightingMatrix& w,
                                const PenaltySpec& base_spec, const FitConfig& config) {
  if (!X.allFinite() || !Y.allFinite()) throw NumericError("non-finite values in regression data");
  return fit_path(Moments::from(X, Y), w, base_spec, config);
}

FitResult fit_at_lambda(const Moments& m, const WeightingMatrix& w, const PenaltySpec& spec,
                        const FitConfig& config, std::size_t path_points) {
  const double target = spec.lambda();
  const double lmax = lambda_max(m, w, config.standardize);
  FitConfig cfg = config;
  cfg.lambda_grid.clear();
  if (path_points >= 2) {
    if (target > 0.0 && target < lmax) {
      const double step = std::log(target / lmax) / static_cast<double>(path_points - 1);
      for (std::size_t i = 0; i + 1 < path_points; ++i) {
        cfg.lambda_grid.push_back(lmax * std::exp(step * static_cast<double>(i)));
      }
    }
  } else {
    for (double l : log_lambda_grid(lmax, config.n_lambda, config.lambda_min_ratio)) {
      if (l > target) cfg.lambda_grid.push_back(l);
    }
  }
  cfg.lambda_grid.push_back(target);
  return fit_path(m, w, spec, cfg).back();
}

FitResult oracle_fit(const Moments& m, const WeightingMatrix& w, const IndexSet& support) {
  check_finite(m);
  if (m.equations() != w.k()) throw DimensionError("moments and Sigma dimensions differ");
  const std::size_t k = m.equations();
  const std::size_t p = m.regressors() * k;
  for (std::size_t j : support) {
    if (j >= p) throw DimensionError("oracle_fit: support index out of range");
  }
  IndexSet sorted = support;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const Matrix& W = w.inverse();
  const Matrix b = m.xy * W;
  Vector theta = Vector::Zero(static_cast<Eigen::Index>(p));

  auto solve_group = [&](const IndexSet& g) {
    const auto q = static_cast<Eigen::Index>(g.size());
    if (q == 0) return;
    Matrix H(q, q);
    Vector rhs(q);
    for (Eigen::Index a = 0; a < q; ++a) {
      const std::size_t ja = g[static_cast<std::size_t>(a)];
      const auto ca = static_cast<Eigen::Index>(ja / k);
      const auto ia = static_cast<Eigen::Index>(ja % k);
      for (Eigen::Index bb = 0; bb < q; ++bb) {
        const std::size_t jb = g[static_cast<std::size_t>(bb)];
        H(a, bb) = m.xx(ca, static_cast<Eigen::Index>(jb / k)) * W(ia, static_cast<Eigen::Index>(jb % k));
      }
      rhs(a) = b(ca, ia);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(H);
    if (qr.rank() < q) throw RankDeficiencyError("oracle_fit: restricted design is rank deficient");
    const Vector sol = qr.solve(rhs);
    for (Eigen::Index a = 0; a < q; ++a) theta(static_cast<Eigen::Index>(g[static_cast<std::size_t>(a)])) = sol(a);
  };

  if (w.is_diagonal()) {
    std::vector<IndexSet> groups(k);
    for (std::size_t j : sorted) groups[j % k].push_back(j);
    for (const auto& g : groups) solve_group(g);
  } else {
    solve_group(sorted);
  }

  FitResult out;
  out.theta = theta;
  out.support = support_of(theta);
  out.lambda = 0.0;
  out.n_iter = 0;
  out.converged = true;
  out.objective = loglik(theta, m, w);
  return out;
}

FitResult oracle_fit(const Matrix& X, const Matrix& Y, const WeightingMatrix& w, const IndexSet& support) {
  return oracle_fit(Moments::from(X, Y), w, support);
}

CertificateReport certify_fit(const FitResult& fit, const Moments& m, const WeightingMatrix& w,
                              const PenaltySpec& spec, bool standardize, double tol) {
  const Problem prob(m, standardize);
  const Matrix B = prob.to_working(theta_to_coefficients(fit.theta, m.equations()));
  return certify_local_max(coefficients_to_theta(B), spec, prob.m, w, tol);
}

}  // namespace svar
