#include "mbkdv/diophantine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mbkdv {

const char* branch_name(CriticalBranch b) {
  switch (b) {
    case CriticalBranch::Alpha4Resonant: return "Alpha4Resonant";
    case CriticalBranch::Alpha4Nonresonant: return "Alpha4Nonresonant";
    case CriticalBranch::RalphaRational: return "RalphaRational";
    case CriticalBranch::IrrationalHighIndex: return "IrrationalHighIndex";
    case CriticalBranch::IrrationalLowIndex: return "IrrationalLowIndex";
  }
  return "unknown";
}

namespace {

void require_nonzero(std::int64_t n) {
  if (n == 0) fail(ErrorKind::Domain, "n must be nonzero");
}

bool both_exact(const RealNumber& a, const RealNumber& b) { return a.is_exact() && b.is_exact(); }

// Per-n kernel on the exact path. Returns m and the exact distance.
std::pair<BigInt, Rational> best_exact(const Rational& rho, const Rational& gamma, std::int64_t n) {
  Rational nn(n);
  Rational target = nn * rho + gamma / nn;  // m/n closest to rho + gamma/n^2
  BigInt lo = floor_q(target);
  Rational d_lo = abs(rho - Rational(lo) / nn + gamma / (nn * nn));
  Rational d_hi = abs(rho - Rational(lo + 1) / nn + gamma / (nn * nn));
  if (d_hi < d_lo) return {lo + 1, d_hi};
  return {lo, d_lo};  // ties resolve to the smaller m
}

std::pair<BigInt, BigFloat> best_float(const BigFloat& rho, const BigFloat& gamma, std::int64_t n) {
  BigFloat nn(n);
  BigFloat target = nn * rho + gamma / nn;
  BigFloat fl = floor(target);
  BigInt lo;
  mpfr_get_z(lo.backend().data(), fl.backend().data(), MPFR_RNDD);
  BigFloat d_lo = abs(rho - fl / nn + gamma / (nn * nn));
  BigFloat d_hi = abs(rho - (fl + 1) / nn + gamma / (nn * nn));
  if (d_hi < d_lo) return {lo + 1, d_hi};
  return {lo, d_lo};
}

}  // namespace

RealNumber biased_distance(const RealNumber& rho, const RealNumber& gamma, const BigInt& m,
                           std::int64_t n) {
  require_nonzero(n);
  if (both_exact(rho, gamma)) {
    Rational nn(n);
    return RealNumber(Rational(abs(*rho.exact - Rational(m) / nn + *gamma.exact / (nn * nn))));
  }
  BigFloat nn(n), mm;
  mpfr_set_z(mm.backend().data(), m.backend().data(), MPFR_RNDN);
  return RealNumber::approx(abs(rho.value - mm / nn + gamma.value / (nn * nn)));
}

BiasedApproxRecord best_biased_approx(const RealNumber& rho, const RealNumber& gamma,
                                      std::int64_t n) {
  require_nonzero(n);
  BiasedApproxRecord rec;
  rec.rho = rho.to_double();
  rec.gamma = gamma.to_double();
  rec.n = n;
  if (both_exact(rho, gamma)) {
    auto [m, d] = best_exact(*rho.exact, *gamma.exact, n);
    rec.m = m;
    rec.distance = to_double(d);
    rec.distance_exact = d;
    rec.exact = true;
  } else {
    auto [m, d] = best_float(rho.value, gamma.value, n);
    rec.m = m;
    rec.distance = d.convert_to<double>();
  }
  return rec;
}

std::vector<ZeroPair> find_zero_pairs(const RealNumber& rho, const RealNumber& gamma,
                                      std::int64_t n_max) {
  if (!both_exact(rho, gamma))
    fail(ErrorKind::Unsupported, "find_zero_pairs needs exact rational rho and gamma");
  if (n_max < 1) fail(ErrorKind::Domain, "n_max must be positive");
  const Rational& r = *rho.exact;
  const Rational& g = *gamma.exact;
  if (g == 0) fail(ErrorKind::Degenerate, "gamma = 0 with rational rho: every multiple of the reduced fraction is a zero");
  // rho n^2 - m n + gamma = 0 forces m = rho n + gamma / n to be an integer.
  std::vector<ZeroPair> out;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    Rational m = Rational(n) * r + g / Rational(n);
    if (is_integer(m)) {
      out.push_back({numerator(m), n});
      out.push_back({BigInt(-numerator(m)), -n});
    }
  }
  return out;
}

TypeIndexEstimate estimate_indices(const RealNumber& rho, const RealNumber& gamma,
                                   std::int64_t n_max, double window_fraction) {
  if (n_max < 100) fail(ErrorKind::Domain, "estimate_indices needs n_max >= 100");
  if (!(window_fraction > 0 && window_fraction <= 1))
    fail(ErrorKind::Domain, "window fraction must lie in (0, 1]");
  TypeIndexEstimate est;
  est.rho = rho;
  est.gamma = gamma;
  est.n_max = n_max;
  est.exact = both_exact(rho, gamma);
  est.window_fraction = window_fraction;

  if (est.exact) {
    if (*gamma.exact == 0) fail(ErrorKind::Degenerate, "gamma = 0 with rational rho is degenerate");
    est.zero_pairs = find_zero_pairs(rho, gamma, n_max);
  }

  est.best_table.resize(static_cast<std::size_t>(n_max));
  parallel_for(1, n_max + 1, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t n = lo; n < hi; ++n)
      est.best_table[static_cast<std::size_t>(n - 1)] = best_biased_approx(rho, gamma, n);
  });

  std::int64_t max_zero = 0;
  for (const auto& z : est.zero_pairs) max_zero = std::max(max_zero, std::abs(z.n));
  est.witness_N = max_zero + 1;
  if (est.witness_N > n_max) fail(ErrorKind::Degenerate, "every n up to n_max is an exact zero");

  auto window_lo = static_cast<std::int64_t>(std::ceil((1.0 - window_fraction) * static_cast<double>(n_max)));
  est.window_start = std::max({est.witness_N, window_lo, std::int64_t{2}});

  double mu = 2.0, full_mu = 2.0;
  double min_scaled = std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  for (std::int64_t n = est.witness_N; n <= n_max; ++n) {
    const auto& rec = est.best_table[static_cast<std::size_t>(n - 1)];
    if (rec.distance == 0) continue;
    any_nonzero = true;
    double scaled = static_cast<double>(n) * static_cast<double>(n) * rec.distance;
    min_scaled = std::min(min_scaled, scaled);
    if (n < 2) continue;
    double e = -std::log(rec.distance) / std::log(static_cast<double>(n));
    full_mu = std::max(full_mu, e);
    if (n >= est.window_start) mu = std::max(mu, e);
  }
  if (!any_nonzero) fail(ErrorKind::Degenerate, "all distances vanish");
  est.mu_hat = mu;
  est.nu_hat = mu - 2.0;
  est.full_range_mu = full_mu;
  est.min_scaled_distance = min_scaled;

  double K = std::numeric_limits<double>::infinity();
  for (std::int64_t n = est.window_start; n <= n_max; ++n) {
    const auto& rec = est.best_table[static_cast<std::size_t>(n - 1)];
    K = std::min(K, rec.distance * std::pow(static_cast<double>(n), est.mu_hat));
  }
  est.witness_K = K;
  return est;
}

CriticalIndexReport critical_index(const Rational& alpha, const Rational& beta, std::int64_t n_max) {
  if (alpha <= 0 || alpha > 4 || alpha == 1)
    fail(ErrorKind::OutOfScope, fmt::format("alpha = {} is outside (0,4] \\ {{1}}", to_string(alpha)));
  CriticalIndexReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.n_max = n_max;
  rep.convention = "beta = 3 n^2 with n >= 0 (beta = 0 is resonant)";

  if (alpha == 4) {
    Rational third = beta / 3;
    std::optional<Rational> root = exact_sqrt(third);
    if (root && is_integer(*root)) {
      rep.branch = CriticalBranch::Alpha4Resonant;
      rep.s_star = 1.0;
      rep.s_star_exact = Rational(1);
      rep.resonant_n = numerator(*root).convert_to<std::int64_t>();
    } else {
      rep.branch = CriticalBranch::Alpha4Nonresonant;
      rep.s_star = 0.5;
      rep.s_star_exact = Rational(1, 2);
    }
    rep.s_alpha_beta = std::numeric_limits<double>::quiet_NaN();
    rep.nu_c1 = rep.nu_c2 = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }

  if (beta == 0) fail(ErrorKind::Domain, "beta must be nonzero for alpha in (0,4) \\ {1}");
  Rational R2 = Rational(12) / alpha - 3;
  if (auto R = exact_sqrt(R2)) {
    // Rational c1, c2 with gamma != 0: the biased index vanishes.
    rep.branch = CriticalBranch::RalphaRational;
    rep.R_alpha = *R;
    rep.s_star = 0.5;
    rep.s_star_exact = Rational(1, 2);
    rep.s_alpha_beta = rep.nu_c1 = rep.nu_c2 = 0.0;
    return rep;
  }

  BigFloat R = sqrt(to_bigfloat(R2));
  BigFloat c1 = BigFloat(0.5) + R / 6;
  BigFloat c2 = BigFloat(0.5) - R / 6;
  BigFloat lambda = to_bigfloat(beta) / (to_bigfloat(alpha) * R);
  auto lam = RealNumber::approx(lambda, "lambda");
  auto e1 = estimate_indices(RealNumber::approx(c1, "c1"), lam, n_max);
  auto e2 = estimate_indices(RealNumber::approx(c2, "c2"), lam, n_max);
  rep.nu_c1 = e1.nu_hat;
  rep.nu_c2 = e2.nu_hat;
  rep.s_alpha_beta = std::max(rep.nu_c1, rep.nu_c2);
  rep.empirical = true;
  if (rep.s_alpha_beta >= 1.0) {
    rep.branch = CriticalBranch::IrrationalHighIndex;
    rep.s_star = 1.0;
  } else {
    rep.branch = CriticalBranch::IrrationalLowIndex;
    rep.s_star = 0.5 * (1.0 + rep.s_alpha_beta);
  }
  return rep;
}

}  // namespace mbkdv
