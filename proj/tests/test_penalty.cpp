#include <doctest.h>

#include <cmath>

#include "cards/penalty.hpp"
#include "support/test_utils.hpp"

using namespace cards;

TEST_CASE("penalty values at reference points") {
  const PenaltySpec scad = PenaltySpec::scad(1.0, 3.7);
  CHECK(penalty_value(scad, 0.0) == 0.0);

  // Beyond a*lambda the value must equal the integral of the derivative over
  // [0, a*lambda] and stay flat.
  const double tail = testutil::integrate([&](double t) { return penalty_derivative(scad, t); },
                                          0.0, scad.a * scad.lambda);
  CHECK(penalty_value(scad, 5.0) == doctest::Approx(tail).epsilon(1e-8));
  CHECK(penalty_value(scad, 5.0) == doctest::Approx(2.35).epsilon(1e-12));
  CHECK(penalty_value(scad, 5.0) == penalty_value(scad, scad.a * scad.lambda));

  CHECK(penalty_value(PenaltySpec::l1(2.0), -3.0) == doctest::Approx(6.0));
}

TEST_CASE("penalty derivative at reference points") {
  const PenaltySpec scad = PenaltySpec::scad(1.0, 3.7);
  CHECK(penalty_derivative(scad, 0.0) == doctest::Approx(1.0));  // p'(0+) = lambda
  const double fd = testutil::fdiff([&](double t) { return penalty_value(scad, t); }, 2.0);
  CHECK(penalty_derivative(scad, 2.0) == doctest::Approx(fd).epsilon(1e-6));
  CHECK(penalty_derivative(scad, 2.0) == doctest::Approx((3.7 - 2.0) / 2.7).epsilon(1e-12));
  CHECK(penalty_derivative(scad, 4.0) == 0.0);
}

TEST_CASE("rho derivative is the lambda-normalized derivative") {
  for (const PenaltySpec& spec :
       {PenaltySpec::scad(0.7), PenaltySpec::mcp(1.3), PenaltySpec::l1(2.5)}) {
    CHECK(rho_derivative(spec, 0.0) == doctest::Approx(1.0));
  }
  CHECK(rho_derivative(PenaltySpec::scad(1.0, 3.7), 2.0) ==
        doctest::Approx(penalty_derivative(PenaltySpec::scad(1.0, 3.7), 2.0)));
  CHECK(rho_derivative(PenaltySpec::mcp(0.5, 3.0), 2.0) == 0.0);  // t >= a*lambda = 1.5

  try {
    rho_derivative(PenaltySpec::scad(0.0), 1.0);
    FAIL("expected LambdaZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LambdaZero);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(PenaltySpec::scad(1.0, 2.0), Error);
  CHECK_THROWS_AS(PenaltySpec::mcp(1.0, 1.0), Error);
  CHECK_THROWS_AS(PenaltySpec::scad(-1.0), Error);
  CHECK_THROWS_AS(penalty_value(PenaltySpec{PenaltySpec::Kind::Scad, 1.0, 1.5}, 1.0), Error);
}

TEST_CASE("value equals the running integral of the derivative") {
  for (const PenaltySpec& spec : {PenaltySpec::scad(0.8, 3.7), PenaltySpec::mcp(1.2, 3.0)}) {
    const double hi = 2.0 * spec.a * spec.lambda;
    const int grid = 200;
    for (int i = 1; i <= grid; ++i) {
      const double t = hi * i / grid;
      const double integral = testutil::integrate(
          [&](double s) { return penalty_derivative(spec, s); }, 0.0, t, 4000);
      CHECK(std::abs(penalty_value(spec, t) - integral) <= 1e-6 * std::max(1.0, integral));
    }
  }
}

TEST_CASE("derivative is nonincreasing and the flat tail starts exactly at a*lambda") {
  for (const PenaltySpec& spec : {PenaltySpec::scad(0.8, 3.7), PenaltySpec::mcp(1.2, 3.0)}) {
    const double knot = spec.a * spec.lambda;
    double prev = penalty_derivative(spec, 0.0);
    for (int i = 1; i <= 500; ++i) {
      const double t = 2.0 * knot * i / 500;
      const double d = penalty_derivative(spec, t);
      CHECK(d <= prev + 1e-15);
      CHECK((d == 0.0) == (t >= knot));
      prev = d;
    }
    CHECK(penalty_derivative(spec, knot) == 0.0);
    CHECK(penalty_derivative(spec, std::nextafter(knot, 0.0)) > 0.0);
  }
}

TEST_CASE("penalty is symmetric in t") {
  auto eng = testutil::rng(5);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  for (const PenaltySpec& spec :
       {PenaltySpec::scad(0.8), PenaltySpec::mcp(1.2), PenaltySpec::l1(0.4)}) {
    for (int i = 0; i < 100; ++i) {
      const double t = unif(eng);
      CHECK(penalty_value(spec, t) == penalty_value(spec, -t));
    }
  }
}
