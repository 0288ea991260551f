#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "svar/penalties.hpp"

using namespace svar;
using doctest::Approx;

TEST_SUITE("penalties") {

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(PenaltySpec::scad(1.0, 2.0), ConfigurationError);
  CHECK_THROWS_AS(PenaltySpec::mcp(1.0, 0.5), ConfigurationError);
  CHECK_THROWS_AS(PenaltySpec::lasso(-0.1), ConfigurationError);
  CHECK_NOTHROW(PenaltySpec::mcp(1.0, 1.0));
  CHECK(PenaltySpec::scad(0.5).a() == doctest::Approx(kDefaultScadShape));
  CHECK(PenaltySpec::mcp(0.5).a() == doctest::Approx(kDefaultMcpShape));
  CHECK(parse_penalty_kind("Lasso") == PenaltyKind::L1);
  CHECK(parse_penalty_kind("scad") == PenaltyKind::SCAD);
  CHECK_THROWS(parse_penalty_kind("ridge"));
}

TEST_CASE("derivative closed forms") {
  CHECK(penalty_derivative(PenaltySpec::scad(1.0, 3.7), 0.5) == Approx(1.0));
  CHECK(penalty_derivative(PenaltySpec::scad(1.0, 3.7), 2.0) == Approx(1.7 / 2.7).epsilon(1e-12));
  CHECK(penalty_derivative(PenaltySpec::mcp(1.0, 3.0), 4.0) == 0.0);
  for (double x : {0.0, 0.3, 7.0}) CHECK(penalty_derivative(PenaltySpec::lasso(0.25), x) == 0.25);
  CHECK_THROWS_AS(penalty_derivative(PenaltySpec::lasso(0.25), -1.0), DomainError);
}

TEST_CASE("value matches quadrature of the derivative") {
  CHECK(penalty_value(PenaltySpec::scad(1.0, 3.7), 0.0) == 0.0);
  CHECK(penalty_value(PenaltySpec::lasso(0.5), -2.0) == Approx(1.0));
  const PenaltySpec scad = PenaltySpec::scad(1.0, 3.7);
  CHECK(std::abs(penalty_value(scad, 5.0) - oracle::penalty_by_quadrature(scad, 5.0)) < 1e-8);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.05, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const int family = i % 3;
    const double l = lam(rng);
    const PenaltySpec spec = family == 0   ? PenaltySpec::lasso(l)
                             : family == 1 ? PenaltySpec::scad(l, 2.01 + 20.0 * unit(rng))
                                           : PenaltySpec::mcp(l, 1.0 + 20.0 * unit(rng));
    const double top = 10.0 * l * std::max(spec.a(), 1.0);
    for (int g = 0; g <= 20; ++g) {
      const double x = top * g / 20.0;
      CHECK(std::abs(penalty_value(spec, x) - oracle::penalty_by_quadrature(spec, x)) < 1e-8);
      CHECK(penalty_value(spec, -x) == penalty_value(spec, x));
    }
  }
}

TEST_CASE("derivative is nonincreasing, positive at 0+, continuous at branch points") {
  for (const PenaltySpec& spec :
       {PenaltySpec::lasso(0.4), PenaltySpec::scad(0.4, 2.5), PenaltySpec::scad(0.4, 20.0), PenaltySpec::mcp(0.4, 1.5),
        PenaltySpec::mcp(0.4, 20.0)}) {
    CHECK(penalty_derivative(spec, 1e-12) > 0.0);
    double prev = penalty_derivative(spec, 0.0);
    for (int i = 1; i <= 20000; ++i) {
      const double d = penalty_derivative(spec, i * 1e-3);
      CHECK_LE(d, prev + 1e-15);
      prev = d;
    }
    for (double b : {spec.lambda(), spec.a() * spec.lambda()}) {
      const double h = 1e-10;
      if (b <= h) continue;
      CHECK(std::abs(penalty_derivative(spec, b + h) - penalty_derivative(spec, b)) < 1e-8);
      CHECK(std::abs(penalty_derivative(spec, b) - penalty_derivative(spec, b - h)) < 1e-8);
    }
  }
}

TEST_CASE("curvature matches finite differences of the derivative away from kinks") {
  for (const PenaltySpec& spec : {PenaltySpec::scad(0.7, 3.7), PenaltySpec::mcp(0.7, 2.0)}) {
    for (double x = 0.013; x < 5.0; x += 0.0517) {
      const double l = spec.lambda();
      if (std::abs(x - l) < 1e-3 || std::abs(x - spec.a() * l) < 1e-3) continue;
      const double h = 1e-6;
      const double fd = -(penalty_derivative(spec, x + h) - penalty_derivative(spec, x - h)) / (2 * h);
      CHECK(penalty_curvature(spec, x) == Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("local concavity") {
  const std::vector<double> coords{2.0};
  CHECK(local_concavity(PenaltySpec::lasso(0.3), coords) == 0.0);
  CHECK(local_concavity(PenaltySpec::scad(1.0, 3.7), coords) == Approx(1.0 / 2.7).epsilon(1e-12));
  const std::vector<double> far{5.0};
  CHECK(local_concavity(PenaltySpec::mcp(0.5, 2.0), far) == 0.0);
  const std::vector<double> with_zero{1.0, 0.0};
  CHECK_THROWS_AS(local_concavity(PenaltySpec::scad(1.0), with_zero), DomainError);
  const std::vector<double> mixed{-0.1, 3.0};
  CHECK(local_concavity(PenaltySpec::mcp(1.0, 2.0), mixed) == Approx(0.5));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> c{z(rng), z(rng), z(rng)};
    CHECK(local_concavity(PenaltySpec::scad(0.5, 2.5), c) >= 0.0);
    CHECK(local_concavity(PenaltySpec::mcp(0.5, 1.5), c) >= 0.0);
  }
}

TEST_CASE("diagnostics") {
  const auto s = diagnose(PenaltySpec::scad(0.1, 3.7), 1.0, 15, 300);
  CHECK(s.rho_prime_at_d == 0.0);
  CHECK(s.satisfies_A4a_hint);
  CHECK(s.d_over_lambda == Approx(10.0));
  const auto l = diagnose(PenaltySpec::lasso(0.2), 0.7, 15, 300);
  CHECK(l.rho_prime_at_d == 1.0);
  CHECK(l.kappa_sup == 0.0);
  const auto m = diagnose(PenaltySpec::mcp(0.2, 1.5), 0.1, 15, 300);
  CHECK(m.rho_prime_at_d == Approx(0.2 / 0.3).epsilon(1e-12));
  CHECK(m.lambda_rho_prime_at_d == Approx(0.2 * 0.2 / 0.3).epsilon(1e-12));
  CHECK(m.kappa_sup == Approx(1.0 / 0.3).epsilon(1e-12));
}

}
