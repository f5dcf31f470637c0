#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace cuspsheet;

TEST_CASE("bump peak, half-width value and support") {
  const auto p = make_bump(0.0, 1.0, 1.0);
  CHECK(p(0.0) == cplx(1.0, 0.0));
  // exp(1 - 1/(1 - 1/4)) = exp(-1/3)
  CHECK(std::abs(p(0.5) - 0.71653131057378925) < 1e-15);
  CHECK(p(1.0) == cplx(0.0, 0.0));
  CHECK(p(1.5) == cplx(0.0, 0.0));
  CHECK(p(-7.0) == cplx(0.0, 0.0));
}

TEST_CASE("shifted complex bump") {
  const auto p = make_bump(3.0, 0.5, cplx(0.0, 1.0));
  CHECK(p(3.0) == cplx(0.0, 1.0));
  CHECK(p(2.4) == cplx(0.0, 0.0));
  CHECK(p(3.5) == cplx(0.0, 0.0));
  CHECK(std::abs(p(3.25) - cplx(0.0, std::exp(-1.0 / 3.0))) < 1e-15);
}

TEST_CASE("zero amplitude and empty profile vanish identically") {
  const auto z = make_bump(0.0, 1.0, 0.0);
  const ChiralProfile e;
  for (double x = -2.0; x <= 2.0; x += 0.01) {
    CHECK(z(x) == cplx(0.0, 0.0));
    CHECK(e(x) == cplx(0.0, 0.0));
  }
  CHECK(e.empty());
  CHECK(e.support_hull() == std::pair<double, double>{0.0, 0.0});
}

TEST_CASE("invalid bump parameters are rejected") {
  CHECK_THROWS_AS(make_bump(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_bump(0.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_bump(NAN, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_bump(0.0, 1.0, cplx(INFINITY, 0.0)), std::invalid_argument);
}

TEST_CASE("sum of bumps is linear and smooth at the support edge") {
  const auto a = make_bump(0.2, 0.7, cplx(1.0, -0.5));
  const auto b = make_bump(-0.3, 1.1, cplx(-0.4, 2.0));
  const auto s = a + b;
  for (double x = -2.0; x <= 2.0; x += 0.037) CHECK(std::abs(s(x) - a(x) - b(x)) < 1e-15);
  CHECK(s.magnitude_bound() == doctest::Approx(std::abs(cplx(1.0, -0.5)) + std::abs(cplx(-0.4, 2.0))));
  CHECK(s.support_hull().first == doctest::Approx(-1.4));
  CHECK(s.support_hull().second == doctest::Approx(0.9));
  // all derivatives vanish at the edge: value decays faster than any power
  const double eps = 1e-3;
  CHECK(std::abs(a(0.9 - eps)) < 1e-20);
  CHECK(!s.is_real());
  CHECK(make_bump(0.0, 1.0, 2.0).is_real());
}

TEST_CASE("gapped pair vanishes on the gap and nowhere else nearby") {
  for (double b : {0.5, 1.0, 2.0}) {
    const auto pair = make_gapped_pair(b, cplx(1.0, 0.0));
    for (double x = -b; x <= b; x += b / 500.0) {
      CHECK(pair.plus(x) == cplx(0.0, 0.0));
      CHECK(pair.minus(x) == cplx(0.0, 0.0));
    }
    CHECK(std::abs(pair.plus(1.5 * b)) > 0.5);
    CHECK(std::abs(pair.plus(-1.5 * b)) > 0.5);
    CHECK(std::abs(pair.minus(b * 1.01)) > 0.0);
    CHECK(pair.plus(2.0 * b + 1e-9) == cplx(0.0, 0.0));
    auto hull = pair.plus.support_hull();
    CHECK(hull.first == doctest::Approx(-2.0 * b));
    CHECK(hull.second == doctest::Approx(2.0 * b));
  }
  CHECK_THROWS_AS(make_gapped_pair(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gapped_pair(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gapped_pair(1.0, 1.0, 0.6), std::invalid_argument);
}

TEST_CASE("evaluate and as_function agree with operator()") {
  const auto p = make_bump(0.1, 0.4, cplx(0.3, 0.7));
  const auto f = as_function(p);
  for (double x = -1.0; x <= 1.0; x += 0.05) {
    CHECK(evaluate(p, x) == p(x));
    CHECK(f(x) == p(x));
  }
}
