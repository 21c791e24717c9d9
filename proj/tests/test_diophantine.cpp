#include "mbkdv/diophantine.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mbkdv;

TEST_CASE("biased distance on exact inputs") {
  auto d0 = biased_distance(Rational(0), Rational(1), 1, 1);
  CHECK(*d0.exact == 0);
  auto d1 = biased_distance(Rational(2, 3), Rational(1, 3), 1, 1);
  CHECK(*d1.exact == 0);
  auto d2 = biased_distance(Rational(2, 3), Rational(1, 3), 7, 3);
  CHECK(*d2.exact == Rational(44, 27));
  CHECK_THROWS_AS(biased_distance(Rational(1), Rational(1), 1, 0), Error);
}

TEST_CASE("best biased approximation") {
  auto r = best_biased_approx(Rational(1, 2), Rational(0), 2);
  CHECK(r.m == 1);
  CHECK(r.distance == 0);
  auto z = best_biased_approx(Rational(2, 3), Rational(1, 3), 1);
  CHECK(z.m == 1);
  CHECK(*z.distance_exact == 0);
  auto s = best_biased_approx(parse_real("sqrt(2)"), Rational(0), 5);
  CHECK(s.m == 7);
  CHECK(s.distance == doctest::Approx(0.0142135623730950488).epsilon(1e-14));
}

TEST_CASE("best approximation matches an exhaustive oracle") {
  const Rational rhos[] = {Rational(2, 3), Rational(-17, 11), Rational(355, 113), Rational(5, 1)};
  const Rational gammas[] = {Rational(1, 3), Rational(-2, 7), Rational(9, 2)};
  for (const auto& rho : rhos)
    for (const auto& g : gammas)
      for (std::int64_t n = 1; n <= 60; ++n) {
        auto want = oracle::best_approx(rho, g, n);
        auto got = best_biased_approx(rho, g, n);
        REQUIRE(got.distance_exact.has_value());
        CHECK(*got.distance_exact == want.distance);
      }
}

TEST_CASE("zero pairs") {
  auto z = find_zero_pairs(Rational(2, 3), Rational(1, 3), 100);
  REQUIRE(z.size() == 2);
  CHECK(std::find(z.begin(), z.end(), ZeroPair{1, 1}) != z.end());
  CHECK(std::find(z.begin(), z.end(), ZeroPair{-1, -1}) != z.end());
  CHECK(find_zero_pairs(Rational(1, 2), Rational(1), 100).empty());
  try {
    find_zero_pairs(Rational(0), Rational(0), 10);
    FAIL("expected degenerate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  CHECK_THROWS_AS(find_zero_pairs(parse_real("sqrt(2)"), Rational(1), 10), Error);
}

TEST_CASE("index estimates") {
  auto e = estimate_indices(Rational(2, 3), Rational(1, 3), 5000);
  CHECK(e.nu_hat >= 0);
  CHECK(e.nu_hat <= 0.15);
  CHECK(e.nu_hat == doctest::Approx(0.12976).epsilon(1e-4));
  CHECK(e.min_scaled_distance == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  auto t = estimate_indices(Rational(23, 3), Rational(1, 3), 5000);
  CHECK(std::abs(t.nu_hat - e.nu_hat) < 1e-6);
  auto g = estimate_indices(parse_real("(1+sqrt(5))/2"), Rational(1, 2), 100000);
  CHECK(g.mu_hat >= 2.0);
  CHECK(g.mu_hat <= 2.1);
  CHECK_THROWS_AS(estimate_indices(Rational(1, 2), Rational(0), 100), Error);
}

TEST_CASE("critical index branches") {
  auto r = critical_index(Rational(4), Rational(12));
  CHECK(r.branch == CriticalBranch::Alpha4Resonant);
  CHECK(r.s_star == 1.0);
  CHECK(r.resonant_n == 2);
  auto nr = critical_index(Rational(4), Rational(5));
  CHECK(nr.branch == CriticalBranch::Alpha4Nonresonant);
  CHECK(nr.s_star == 0.5);
  auto q = critical_index(Rational(3), Rational(1));
  CHECK(q.branch == CriticalBranch::RalphaRational);
  CHECK(q.s_star == 0.5);
  CHECK(*q.R_alpha == 1);
  CHECK_THROWS_AS(critical_index(Rational(1), Rational(1)), Error);
  CHECK_THROWS_AS(critical_index(Rational(5), Rational(1)), Error);
  CHECK_THROWS_AS(critical_index(Rational(0), Rational(1)), Error);
}
