#include <cmath>

#include "doctest.h"
#include "lcktk/exact.hpp"

using namespace lcktk;

TEST_CASE("rational arithmetic is exact") {
  Exact a = Exact::parse("1/3");
  Exact b = Exact::parse("2/3");
  CHECK(a + b == Exact(1));
  CHECK((a - b).str() == "-1/3");
  CHECK(a * Rational(3) == Exact(1));
  CHECK((Exact(1) / Rational(7)).str() == "1/7");
}

TEST_CASE("logarithms expand over primes") {
  Exact l10 = Exact::log(10);
  CHECK(l10 == Exact::log(2) + Exact::log(5));
  CHECK(Exact::log(Rational(1, 4)) == Exact::log(2) * Rational(-2));
  CHECK(Exact::log(1).is_zero());
  CHECK(l10.log_coefficient(2) == 1);
  CHECK(l10.log_coefficient(3) == 0);
  CHECK(!l10.is_rational());
  CHECK(std::abs(l10.to_double() - std::log(10.0)) < 1e-14);
}

TEST_CASE("parse round-trips through str") {
  for (const char* s : {"0", "1/3", "-5/2", "log(2)", "2/3*log(2)-1", "1+log(3)-log(2)"}) {
    Exact v = Exact::parse(s);
    CHECK(Exact::parse(v.str()) == v);
  }
  CHECK(Exact::parse("0.25") == Exact(Rational(1, 4)));
  CHECK(Exact::parse("-1.5e1") == Exact(-15));
  CHECK(Exact::parse("log(e)") == Exact(1));
  CHECK(Exact::parse("2/3*log(2) - 1") == Exact::log(2) * Rational(2, 3) - Exact(1));
  CHECK_THROWS(Exact::parse("log(-1)"));
  CHECK_THROWS(Exact::parse("abc"));
}

TEST_CASE("float traits compare with tolerance") {
  CHECK(ScalarTraits<double>::equal(1.0, 1.0 + 1e-14));
  CHECK(!ScalarTraits<double>::equal(1.0, 1.0 + 1e-9));
  CHECK(ScalarTraits<std::complex<double>>::equal({1, 2}, {1, 2 + 1e-14}));
}
