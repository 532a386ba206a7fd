#include "doctest.h"
#include "indiga/rational.hpp"

using indiga::Rational;

TEST_CASE("rationals normalize and compare exactly") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(0, 5).is_zero());
  CHECK(Rational(7, 7).is_one());
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-5) < Rational(-4));
}

TEST_CASE("field operations stay exact") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(-a == Rational(-1, 3));
  CHECK(a.inverse() == Rational(3));
  CHECK(Rational(2, 3).pow(3) == Rational(8, 27));
  CHECK(Rational(2, 3).pow(0).is_one());
  CHECK_THROWS_AS(Rational(0).inverse(), indiga::Error);
  CHECK_THROWS_AS(a / Rational(0), indiga::Error);
  CHECK_THROWS_AS(Rational(1, 0), indiga::Error);
}

TEST_CASE("string round trips") {
  CHECK(Rational::from_string("3/4").str() == "3/4");
  CHECK(Rational::from_string("-3").str() == "-3");
  CHECK(Rational::from_string("6/4").str() == "3/2");
  CHECK(Rational(5).str() == "5");
  CHECK(Rational(-1, 2).str() == "-1/2");
}

TEST_CASE("integrality probes") {
  CHECK(Rational(6, 3).is_integer());
  CHECK(Rational(6, 3).to_long() == 2);
  CHECK_FALSE(Rational(1, 2).is_integer());
  CHECK_THROWS_AS(Rational(1, 2).to_long(), indiga::Error);
}

TEST_CASE("factorials and binomials") {
  CHECK(Rational::factorial(0).is_one());
  CHECK(Rational::factorial(5) == Rational(120));
  CHECK(Rational::binomial(8, 3) == Rational(56));
  CHECK(Rational::binomial(5, 0).is_one());
  CHECK(Rational::binomial(5, 5).is_one());
  // Pascal identity on a grid.
  for (unsigned long n = 1; n <= 10; ++n) {
    for (unsigned long k = 1; k <= n; ++k) {
      CHECK(Rational::binomial(n, k) ==
            Rational::binomial(n - 1, k - 1) + Rational::binomial(n - 1, k));
    }
  }
}
