#include "mbkdv/resonance.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mbkdv;

TEST_CASE("dispersion phases") {
  auto p = DispersionParams::make(Rational(3), Rational(1));
  CHECK(dispersion_phase(p, Rational(-4), Equation::V) == -188);
  CHECK(dispersion_phase(p, Rational(0), Equation::U) == 0);
  CHECK(dispersion_phase(p, Rational(0), Equation::V) == 0);
  auto q = DispersionParams::make(Rational(4), Rational(0));
  CHECK(dispersion_phase(q, Rational(2), Equation::V) == 32);
}

TEST_CASE("resonance function") {
  auto p = DispersionParams::make(Rational(2), Rational(1));
  CHECK(resonance_H(p, Rational(10), Rational(7)) == 270);
  CHECK(resonance_H(p, Rational(0), Rational(13)) == 0);
  auto r = DispersionParams::make(Rational(4), Rational(3));
  CHECK(resonance_H(r, Rational(3), Rational(2)) == 0);
}

TEST_CASE("resonance function agrees with oracle and factored form") {
  const Rational alphas[] = {Rational(2), Rational(3), Rational(4), Rational(12, 7)};
  const Rational betas[] = {Rational(0), Rational(3), Rational(-5, 2)};
  const Rational sigmas[] = {Rational(1), Rational(3)};
  for (const auto& a : alphas)
    for (const auto& b : betas)
      for (const auto& s : sigmas) {
        auto p = DispersionParams::make(a, b, s);
        for (int x = -9; x <= 9; x += 2)
          for (int y = -7; y <= 7; ++y) {
            Rational xi = Rational(x) / s, xi1 = Rational(y) / s;
            Rational want = oracle::H(a, b, s, xi, xi1);
            CHECK(resonance_H(p, xi, xi1) == want);
            CHECK(resonance_H_factored(p, xi, xi1) == want);
          }
      }
}

TEST_CASE("H tilde") {
  auto p = DispersionParams::make(Rational(3), Rational(0));
  CHECK(resonance_H_tilde(p, Rational(0), Rational(5)) == 0);
  CHECK(resonance_H_tilde(p, Rational(3), Rational(2)) == 0);
  auto q = DispersionParams::make(Rational(2), Rational(1));
  CHECK(resonance_H_tilde(q, Rational(5), Rational(1)) == 0);
}

TEST_CASE("root decomposition") {
  auto p = DispersionParams::make(Rational(3), Rational(3));
  auto d = decompose_roots(p, Rational(6));
  CHECK(d.expansion_valid);
  CHECK(d.x1 == doctest::Approx(3.0 + 2.0 * std::sqrt(3.0) / 3.0).epsilon(1e-14));
  CHECK(std::abs(d.q1) <= 12.0 / 216.0);
  CHECK(std::abs(d.q1) <= d.q1_bound);
  CHECK_FALSE(decompose_roots(p, Rational(2)).expansion_valid);
  auto z = DispersionParams::make(Rational(2), Rational(0));
  auto e = decompose_roots(z, Rational(10));
  CHECK(e.x1 == doctest::Approx(z.c1_d() * 10).epsilon(1e-15));
  CHECK(e.q1_bound == 0);
  CHECK(e.q2_bound == 0);
}

TEST_CASE("nearest integer distance") {
  CHECK(nearest_integer_distance(0.5) == 0.5);
  CHECK(nearest_integer_distance(std::sqrt(2.0 / 3.0)) == doctest::Approx(0.18350341907227397).epsilon(1e-14));
  CHECK(nearest_integer_distance(3.0) == 0.0);
  CHECK(nearest_integer_distance(Rational(-7, 3)) == Rational(1, 3));
}

TEST_CASE("certified lower bounds") {
  auto p = DispersionParams::make(Rational(4), Rational(2));
  CHECK(certified_lower_bound(p, Rational(5), Rational(2)) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(abs(resonance_H(p, Rational(5), Rational(2))) == 5);
  CHECK(certified_lower_bound(p, Rational(0), Rational(3)) == 0.0);
  auto q = DispersionParams::make(Rational(4), Rational(-3));
  CHECK(certified_lower_bound(q, Rational(7), Rational(4)) == doctest::Approx(42.0).epsilon(1e-14));
  CHECK(abs(resonance_H(q, Rational(7), Rational(4))) == 42);
  auto irr = DispersionParams::make(Rational(2), Rational(1));
  CHECK_THROWS_AS(certified_lower_bound(irr, Rational(5), Rational(2)), Error);
}

TEST_CASE("level-set counts") {
  auto p = DispersionParams::make(Rational(4), Rational(2));
  CHECK(count_level_set(p, Rational(5), Rational(4)).count == 2);
  auto big = count_level_set(p, Rational(5), Rational(1000000));
  CHECK(big.count <= 4 * 1000);
  CHECK(big.count == oracle::count(Rational(4), Rational(2), Rational(1), Rational(5), Rational(1000000), 3000));
  auto q = DispersionParams::make(Rational(4), Rational(-3));
  CHECK(count_level_set(q, Rational(1), Rational(1)).count ==
        oracle::count(Rational(4), Rational(-3), Rational(1), Rational(1), Rational(1), 200));
}

TEST_CASE("frozen dyadic counts at xi = 101") {
  auto p = DispersionParams::make(Rational(4), Rational(2));
  const std::int64_t want[] = {0, 2, 2, 2, 2, 4, 6, 10, 12, 16, 26};
  for (int e = 10; e <= 20; ++e) {
    Rational M = Rational(BigInt(1) << e);
    auto c = count_level_set(p, Rational(101), M);
    CHECK(c.count == want[e - 10]);
    CHECK(c.count == oracle::count(Rational(4), Rational(2), Rational(1), Rational(101), M, 2000));
  }
}

TEST_CASE("minimum resonance scans") {
  auto p = DispersionParams::make(Rational(4), Rational(2));
  auto scan = scan_min_resonance(p, Rational(100));
  double best = 1e300;
  for (const auto& row : scan.rows) {
    CHECK(row.valid);
    auto xi = numerator(row.xi);
    if (xi != 0 && xi % 2 != 0) best = std::min(best, to_double(row.H_min / abs(row.xi)));
  }
  CHECK(best == doctest::Approx(1.0));
  auto r = DispersionParams::make(Rational(4), Rational(3));
  for (const auto& row : scan_min_resonance(r, Rational(100)).rows)
    if (numerator(row.xi) % 2 != 0) CHECK(row.H_min == 0);
  auto q = DispersionParams::make(Rational(3), Rational(1));
  CHECK(scan_min_resonance(q, Rational(200)).fitted_exponent >= 0.9);
}

TEST_CASE("threshold E") {
  auto p = DispersionParams::make(Rational(3), Rational(1));
  CHECK(threshold_E(p, 0.5).E == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
  auto q = DispersionParams::make(Rational(2), Rational(0));
  const double R = std::sqrt(3.0);
  CHECK(threshold_E(q, 0.5).E == doctest::Approx(std::max(4.0 / R, 6.0 / (3.0 - R))).epsilon(1e-12));
  CHECK_THROWS_AS(threshold_E(DispersionParams::make(Rational(1), Rational(1)), 0.5), Error);
}

TEST_CASE("lattice kernel and index") {
  auto p = DispersionParams::make(Rational(12, 7), Rational(-5, 2), Rational(3));
  auto K = LatticeKernel::make(p);
  for (int a = -20; a <= 20; ++a)
    for (int b = -20; b <= 20; b += 3) {
      Rational h = resonance_H(p, Rational(a) / 3, Rational(b) / 3);
      CHECK(Rational(static_cast<long long>(K(a, b))) / K.scale == h);
    }
  CHECK(lattice_index(p, Rational(5, 3)) == 5);
  CHECK_THROWS_AS(lattice_index(p, Rational(1, 2)), Error);
}
