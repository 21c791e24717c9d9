#pragma once

#include "mbkdv/numeric.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mbkdv {

struct ZeroPair {
  BigInt m;
  std::int64_t n;
  bool operator==(const ZeroPair&) const = default;
};

struct BiasedApproxRecord {
  double rho = 0;
  double gamma = 0;
  BigInt m;
  std::int64_t n = 1;
  double distance = 0;                      // |rho - m/n + gamma/n^2|
  std::optional<Rational> distance_exact;   // set on the rational path
  bool exact = false;
};

struct TypeIndexEstimate {
  RealNumber rho;
  RealNumber gamma;
  std::int64_t n_max = 0;
  double mu_hat = 2;
  double nu_hat = 0;
  double witness_K = 0;
  std::int64_t witness_N = 1;
  std::vector<ZeroPair> zero_pairs;
  std::vector<BiasedApproxRecord> best_table;  // n = 1 .. n_max
  bool exact = false;

  // Truncation report. The exponent is read off the window
  // [window_start, n_max]; full_range_mu is the max over [witness_N, n_max].
  std::int64_t window_start = 1;
  double window_fraction = 0;
  double full_range_mu = 2;
  double min_scaled_distance = 0;  // min of n^2 * distance over [witness_N, n_max]
};

enum class CriticalBranch {
  Alpha4Resonant,
  Alpha4Nonresonant,
  RalphaRational,
  IrrationalHighIndex,
  IrrationalLowIndex,
};
const char* branch_name(CriticalBranch b);

struct CriticalIndexReport {
  Rational alpha;
  Rational beta;
  double s_star = 0.5;
  std::optional<Rational> s_star_exact;
  CriticalBranch branch = CriticalBranch::Alpha4Nonresonant;
  double s_alpha_beta = 0;
  double nu_c1 = 0;
  double nu_c2 = 0;
  bool empirical = false;
  std::optional<std::int64_t> resonant_n;  // beta = 3 n^2 (alpha = 4)
  std::optional<Rational> R_alpha;         // when rational
  std::string convention;                  // naturals include 0
  std::int64_t n_max = 0;
};

inline constexpr double kDefaultWindowFraction = 0.05;

RealNumber biased_distance(const RealNumber& rho, const RealNumber& gamma, const BigInt& m,
                           std::int64_t n);

BiasedApproxRecord best_biased_approx(const RealNumber& rho, const RealNumber& gamma,
                                      std::int64_t n);

std::vector<ZeroPair> find_zero_pairs(const RealNumber& rho, const RealNumber& gamma,
                                      std::int64_t n_max);

TypeIndexEstimate estimate_indices(const RealNumber& rho, const RealNumber& gamma,
                                   std::int64_t n_max,
                                   double window_fraction = kDefaultWindowFraction);

CriticalIndexReport critical_index(const Rational& alpha, const Rational& beta,
                                   std::int64_t n_max = 20000);

}  // namespace mbkdv
