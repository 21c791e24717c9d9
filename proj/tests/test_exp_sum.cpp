#include "mbkdv/exp_sum.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mbkdv;
using namespace std::complex_literals;

namespace {
void check_close(cplx a, cplx b, double tol) { CHECK(std::abs(a - b) <= tol * std::max(1.0, std::abs(b))); }
}  // namespace

TEST_CASE("integral of a constant is t") {
  auto F = exp_sum_integrate(ExponentialSum::constant(1.0));
  for (double t : {0.0, 0.3, 2.5}) check_close(F(t), t, 1e-15);
  CHECK(F.has_secular());
}

TEST_CASE("integral of a pure oscillation") {
  auto F = exp_sum_integrate(ExponentialSum::term(1.0, 0, Rational(3)));
  for (double t : {0.3, 1.0}) check_close(F(t), (std::exp(3.0i * t) - 1.0) / 3.0i, 1e-14);
  CHECK_FALSE(F.has_secular());
}

TEST_CASE("integral of t e^{it} matches quadrature") {
  auto f = ExponentialSum::term(1.0, 1, Rational(1));
  auto F = exp_sum_integrate(f);
  for (double t : {0.3, 1.0}) {
    cplx q = oracle::integrate([&](double s) { return f(s); }, 0.0, t);
    check_close(F(t), q, 1e-12);
    check_close(F(t), -1.0i * t * std::exp(1.0i * t) + std::exp(1.0i * t) - 1.0, 1e-14);
  }
}

TEST_CASE("duhamel examples") {
  auto a = duhamel(Rational(0), ExponentialSum::constant(1.0));
  check_close(a(0.7), 0.7, 1e-15);
  auto b = duhamel(Rational(5), ExponentialSum::term(1.0, 0, Rational(5)));
  check_close(b(0.7), 0.7 * std::exp(5.0i * 0.7), 1e-14);
  CHECK(b.has_secular() == false);  // t e^{5it}: the secular factor rides on a nonzero frequency
  CHECK(b.max_power() == 1);
  auto c = duhamel(Rational(2), ExponentialSum::constant(1.0));
  for (double t : {0.2, 1.3}) {
    cplx q = oracle::integrate([&](double s) { return std::exp(2.0i * (t - s)); }, 0.0, t);
    check_close(c(t), q, 1e-12);
    check_close(c(t), (std::exp(2.0i * t) - 1.0) / 2.0i, 1e-14);
  }
}

TEST_CASE("resonance detection is exact") {
  // Frequencies 1/3 - 1/3 cancel exactly although 1/3 has no finite binary form.
  auto f = ExponentialSum::term(1.0, 0, Rational(1, 3)) * ExponentialSum::term(1.0, 0, Rational(-1, 3));
  CHECK(exp_sum_integrate(f).has_secular());
  auto g = ExponentialSum::term(1.0, 0, Rational(1, 1000000000)) * ExponentialSum::term(1.0, 0, Rational(0));
  CHECK_FALSE(exp_sum_integrate(g).has_secular());
}

TEST_CASE("algebra") {
  auto a = ExponentialSum::term(2.0, 0, Rational(1)) + ExponentialSum::term(1.0i, 1, Rational(-2));
  auto b = a - a;
  for (double t : {0.0, 1.0}) CHECK(std::abs(b(t)) == 0.0);
  auto c = a.conj();
  check_close(c(0.4), std::conj(a(0.4)), 1e-15);
  auto d = a.shifted(Rational(3));
  check_close(d(0.4), a(0.4) * std::exp(3.0i * 0.4), 1e-14);
  auto e = a * a;
  check_close(e(0.9), a(0.9) * a(0.9), 1e-14);
}
