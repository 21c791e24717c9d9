#include "mbkdv/numeric.hpp"

#include <doctest.h>

#include <cmath>

using namespace mbkdv;

TEST_CASE("rational parsing round-trips") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational(" -7 ") == Rational(-7));
  CHECK(to_string(Rational(-12, 7)) == "-12/7");
  CHECK_THROWS_AS(parse_rational("0.5"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("floor, ceil and banker's rounding") {
  CHECK(floor_q(Rational(-5, 2)) == -3);
  CHECK(ceil_q(Rational(-5, 2)) == -2);
  CHECK(round_half_even(Rational(5, 2)) == 2);
  CHECK(round_half_even(Rational(7, 2)) == 4);
  CHECK(round_half_even(Rational(-5, 2)) == -2);
  CHECK(round_half_even(Rational(21, 10)) == 2);
  CHECK(round_half_even(BigFloat("2.9")) == 3);
}

TEST_CASE("exact square roots") {
  CHECK(exact_sqrt(Rational(9, 4)) == Rational(3, 2));
  CHECK_FALSE(exact_sqrt(Rational(2)).has_value());
}

TEST_CASE("real expressions keep exactness where possible") {
  auto a = parse_real("2/3 + 7");
  REQUIRE(a.is_exact());
  CHECK(*a.exact == Rational(23, 3));
  auto b = parse_real("sqrt(9/4)");
  CHECK(b.is_exact());
  auto c = parse_real("(1+sqrt(5))/2");
  CHECK_FALSE(c.is_exact());
  CHECK(c.to_double() == doctest::Approx(1.6180339887498949).epsilon(1e-15));
  auto d = parse_real("pi");
  CHECK(d.to_double() == doctest::Approx(3.141592653589793).epsilon(1e-15));
  CHECK_FALSE(parse_real("0.5").is_exact());
  CHECK_THROWS_AS(parse_real("2 +"), Error);
}

TEST_CASE("error kinds map to exit codes") {
  CHECK(Error(ErrorKind::Usage, "").exit_code() == 1);
  CHECK(Error(ErrorKind::Domain, "").exit_code() == 2);
  CHECK(Error(ErrorKind::Fit, "").exit_code() == 3);
  CHECK(Error(ErrorKind::BlowUp, "").exit_code() == 3);
}

TEST_CASE("g17 formatting is round-trip") {
  double x = 0.1 + 0.2;
  CHECK(std::stod(format_g17(x)) == x);
}

TEST_CASE("parallel_for covers the range once") {
  std::vector<int> hits(1000, 0);
  parallel_for(0, 1000, [&](std::int64_t lo, std::int64_t hi) {
    for (auto i = lo; i < hi; ++i) hits[i]++;
  });
  for (int h : hits) CHECK(h == 1);
}
