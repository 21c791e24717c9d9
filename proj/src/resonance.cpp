#include "mbkdv/resonance.hpp"

#include "mbkdv/diophantine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace mbkdv {

namespace {

Rational rabs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

int sgn(const Rational& q) { return q > 0 ? 1 : (q < 0 ? -1 : 0); }

void require_middle_alpha(const DispersionParams& p, const char* op) {
  if (!p.has_roots || p.alpha == 4 || p.alpha == 1)
    fail(ErrorKind::Domain, fmt::format("{} needs alpha in (0,4) \\ {{1}}, got {}", op, to_string(p.alpha)));
}

__int128 to_i128(const BigInt& z) {
  if (abs(z) > BigInt("85070591730234615865843651857942052864"))  // 2^126
    fail(ErrorKind::Domain, "lattice value exceeds the 128-bit fast path");
  bool neg = z < 0;
  BigInt a = neg ? BigInt(-z) : z;
  __int128 r = 0;
  BigInt base = BigInt(1) << 62;
  std::vector<std::uint64_t> limbs;
  while (a > 0) {
    limbs.push_back(static_cast<std::uint64_t>((a % base).convert_to<unsigned long long>()));
    a /= base;
  }
  for (auto it = limbs.rbegin(); it != limbs.rend(); ++it) r = (r << 62) + static_cast<__int128>(*it);
  return neg ? -r : r;
}

__int128 i128_abs(__int128 v) { return v < 0 ? -v : v; }

}  // namespace

DispersionParams DispersionParams::make(const Rational& alpha, const Rational& beta, const Rational& sigma) {
  if (alpha == 0) fail(ErrorKind::Domain, "alpha must be nonzero");
  if (sigma < 1) fail(ErrorKind::Domain, fmt::format("sigma must be >= 1, got {}", to_string(sigma)));
  DispersionParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.sigma = sigma;
  p.beta_sigma = beta / (sigma * sigma);
  if (alpha > 0 && alpha <= 4) {
    p.has_roots = true;
    p.R_squared = Rational(12) / alpha - 3;
    p.R_exact = exact_sqrt(p.R_squared);
    p.R = p.R_exact ? to_bigfloat(*p.R_exact) : BigFloat(sqrt(to_bigfloat(p.R_squared)));
    p.c1 = BigFloat(0.5) + p.R / 6;
    p.c2 = BigFloat(0.5) - p.R / 6;
    if (p.R_exact) {
      p.c1_exact = Rational(1, 2) + *p.R_exact / 6;
      p.c2_exact = Rational(1, 2) - *p.R_exact / 6;
    }
    p.lambda = (p.R == 0) ? BigFloat(0) : BigFloat(to_bigfloat(beta) / (to_bigfloat(alpha) * p.R));
  }
  return p;
}

bool on_lattice(const DispersionParams& p, const Rational& x) { return is_integer(x * p.sigma); }

std::int64_t lattice_index(const DispersionParams& p, const Rational& x) {
  Rational a = x * p.sigma;
  if (!is_integer(a)) fail(ErrorKind::Domain, fmt::format("{} is not on the lattice Z/{}", to_string(x), to_string(p.sigma)));
  return numerator(a).convert_to<std::int64_t>();
}

FrequencyTriple FrequencyTriple::make(const DispersionParams& p, const Rational& xi, const Rational& xi1) {
  lattice_index(p, xi);
  lattice_index(p, xi1);
  return {xi, xi1, xi - xi1};
}

Rational dispersion_phase(const DispersionParams& p, const Rational& eta, Equation which) {
  Rational e3 = eta * eta * eta;
  if (which == Equation::U) return e3;
  return p.alpha * e3 - p.beta_sigma * eta;
}

Rational resonance_H(const DispersionParams& p, const Rational& xi, const Rational& xi1) {
  Rational xi2 = xi - xi1;
  return xi * xi * xi - p.alpha * (xi1 * xi1 * xi1 + xi2 * xi2 * xi2) + p.beta_sigma * (xi1 + xi2);
}

Rational resonance_H_factored(const DispersionParams& p, const Rational& xi, const Rational& xi1) {
  // x1 + x2 = xi, x1 x2 = (alpha-1) xi^2/(3 alpha) - beta/(3 alpha sigma^2)
  Rational prod = (p.alpha - 1) * xi * xi / (3 * p.alpha) - p.beta_sigma / (3 * p.alpha);
  return -3 * p.alpha * xi * (xi1 * xi1 - xi * xi1 + prod);
}

Rational resonance_H_tilde(const DispersionParams& p, const Rational& xi1, const Rational& xi) {
  // (xi - c1 xi1)(xi - c2 xi1) = xi^2 - xi xi1 + c1 c2 xi1^2, c1 c2 = (alpha-1)/(3 alpha)
  Rational quad = xi * xi - xi * xi1 + (p.alpha - 1) / (3 * p.alpha) * xi1 * xi1;
  return 3 * p.alpha * xi1 * (quad - p.beta_sigma / (3 * p.alpha));
}

ResonanceDecomposition decompose_roots(const DispersionParams& p, const Rational& xi) {
  require_middle_alpha(p, "decompose_roots");
  if (xi == 0) fail(ErrorKind::Domain, "decompose_roots needs xi != 0");
  ResonanceDecomposition d;
  d.xi = xi;
  const Rational s2 = p.sigma * p.sigma;
  const Rational D = Rational(12) * p.beta / (p.alpha * s2);
  const Rational disc = p.R_squared * xi * xi + D;
  const Rational large = Rational(24) * rabs(p.beta) / ((Rational(12) - 3 * p.alpha) * s2);
  BigFloat X = to_bigfloat(xi);
  BigFloat Xabs = abs(X);
  int sg = sgn(xi);
  if (disc < 0) {
    d.complex_roots = true;
    d.expansion_valid = false;
    d.x1 = d.x2 = to_double(xi / 2);
    d.q1 = d.q2 = std::numeric_limits<double>::quiet_NaN();
    d.x1_hp = X / 2;
  } else {
    BigFloat Dh = to_bigfloat(D);
    BigFloat S = sqrt(to_bigfloat(disc));
    BigFloat denom = S + p.R * Xabs;
    BigFloat off = sg * Dh / (6 * denom);
    d.x1_hp = p.c1 * X + off;
    d.q1_hp = -sg * Dh * Dh / (12 * p.R * Xabs * denom * denom);
    d.x1 = d.x1_hp.convert_to<double>();
    d.x2 = BigFloat(X - d.x1_hp).convert_to<double>();
    d.q1 = d.q1_hp.convert_to<double>();
    d.q2 = -d.q1;
    d.expansion_valid = xi * xi >= large;
  }
  BigFloat s4 = to_bigfloat(s2 * s2);
  d.q_bound_hp = 12 * p.lambda * p.lambda / (p.R * s4 * Xabs * Xabs * Xabs);
  d.q1_bound = d.q2_bound = d.q_bound_hp.convert_to<double>();
  return d;
}

double nearest_integer_distance(double x) { return std::abs(x - std::nearbyint(x)); }

Rational nearest_integer_distance(const Rational& x) {
  Rational f = x - Rational(floor_q(x));
  return std::min(f, Rational(1 - f));
}

CertificateClass certificate_class(const DispersionParams& p) {
  if (p.alpha == 4) {
    if (p.beta < 0) return CertificateClass::Alpha4NegativeBeta;
    auto r = exact_sqrt(p.beta / 3);
    if (r && is_integer(*r))
      fail(ErrorKind::Unsupported, fmt::format("beta = {} = 3 n^2 is resonant; no positive lower bound exists", to_string(p.beta)));
    return CertificateClass::Alpha4Nonresonant;
  }
  if (p.has_roots && p.alpha != 1 && p.R_rational()) {
    if (p.beta == 0) fail(ErrorKind::Unsupported, "beta = 0 leaves exact resonances on the rational branch");
    return CertificateClass::RationalR;
  }
  fail(ErrorKind::Unsupported,
       fmt::format("no certificate for alpha = {}: use scan_min_resonance", to_string(p.alpha)));
}

namespace {

std::optional<Rational> certified_E_exact(const DispersionParams& p) {
  if (!p.R_exact || !p.c1_exact || p.alpha == 4) return std::nullopt;
  const Rational& R = *p.R_exact;
  Rational ab = rabs(p.beta);
  Rational e1 = Rational(4) / R * (1 + ab / p.alpha);
  Rational e2 = Rational(6) / rabs(Rational(3) - R);
  Rational pden(denominator(*p.c1_exact));
  Rational e3 = 2 * pden * ab / (p.alpha * R);
  return std::max({e1, e2, e3});
}

// Rational bracket r_lo <= sqrt(x) <= r_hi with width 2^-64.
std::pair<Rational, Rational> sqrt_bracket(const Rational& x) {
  BigInt scale = BigInt(1) << 128;
  BigInt f = floor_q(x * Rational(scale));
  BigInt r = sqrt(f);
  Rational unit(BigInt(1), BigInt(1) << 64);
  return {Rational(r) * unit, Rational(r + 1) * unit};
}

}  // namespace

double certified_lower_bound(const DispersionParams& p, const Rational& xi, const Rational& xi1) {
  if (xi == 0) return 0.0;
  lattice_index(p, xi);
  lattice_index(p, xi1);
  const CertificateClass cls = certificate_class(p);
  const Rational s2 = p.sigma * p.sigma;
  const Rational pref = 3 * rabs(xi) / s2;
  switch (cls) {
    case CertificateClass::Alpha4NegativeBeta: {
      // |H| = (3|xi|/sigma^2)(K^2 + |beta|/3), K = sigma (2 xi1 - xi)
      Rational K = p.sigma * (2 * xi1 - xi);
      return to_double(Rational(pref * (K * K + rabs(p.beta) / 3)));
    }
    case CertificateClass::Alpha4Nonresonant: {
      Rational r2 = p.beta / 3;
      BigInt k0 = sqrt(floor_q(r2));
      Rational m = std::min(rabs(Rational(k0 * k0) - r2), rabs(Rational((k0 + 1) * (k0 + 1)) - r2));
      Rational K = rabs(p.sigma * (2 * xi1 - xi));
      auto [r_lo, r_hi] = sqrt_bracket(r2);
      Rational g(0);
      if (K >= r_hi) g = (K - r_hi) * (K - r_hi);
      else if (K <= r_lo) g = (r_lo - K) * (r_lo - K);
      return to_double(Rational(pref * std::max(m, g)));
    }
    case CertificateClass::RationalR: {
      Rational E = *certified_E_exact(p);
      if (rabs(xi) <= E) return 0.0;
      return to_double(Rational(rabs(p.beta) * rabs(xi) / (8 * s2)));
    }
  }
  return 0.0;
}

LatticeKernel LatticeKernel::make(const DispersionParams& p) {
  BigInt L = lcm(denominator(p.alpha), denominator(p.beta));
  LatticeKernel k;
  k.A = to_i128(L);
  k.B = to_i128(numerator(Rational(p.alpha * Rational(L))));
  k.C = to_i128(numerator(Rational(p.beta * Rational(L))));
  k.scale = Rational(L) * p.sigma * p.sigma * p.sigma;
  return k;
}

CountingScan count_level_set(const DispersionParams& p, const Rational& xi, const Rational& M) {
  if (M < 1) fail(ErrorKind::Domain, "count_level_set needs M >= 1");
  if (xi == 0) fail(ErrorKind::Domain, "count_level_set needs xi != 0");
  std::int64_t a = lattice_index(p, xi);
  const LatticeKernel ker = LatticeKernel::make(p);

  // H = H(xi/2) - 3 alpha xi (xi1 - xi/2)^2, so |H| < 2M confines xi1.
  Rational Hv = resonance_H(p, xi, xi / 2);
  double w = std::sqrt(to_double(Rational((2 * M + rabs(Hv)) / (3 * rabs(p.alpha) * rabs(xi))))) ;
  Rational center = xi / 2;
  Rational step = Rational(1) / p.sigma;
  Rational wq = Rational(static_cast<long long>(std::ceil(w * 1024.0)), 1024) + step;
  CountingScan out;
  out.xi = xi;
  out.M = M;
  out.window_lo = center - wq;
  out.window_hi = center + wq;
  std::int64_t b_lo = floor_q(out.window_lo * p.sigma).convert_to<std::int64_t>();
  std::int64_t b_hi = ceil_q(out.window_hi * p.sigma).convert_to<std::int64_t>();

  __int128 lo = to_i128(ceil_q(M * ker.scale));
  __int128 hi = to_i128(ceil_q(2 * M * ker.scale));
  std::int64_t count = 0;
  for (std::int64_t b = b_lo; b <= b_hi; ++b) {
    __int128 v = i128_abs(ker(a, b));
    if (v >= lo && v < hi) ++count;
  }
  out.count = count;
  out.scanned = b_hi - b_lo + 1;
  return out;
}

MinResonanceScan scan_min_resonance(const DispersionParams& p, const Rational& xi_max) {
  if (xi_max < 10) fail(ErrorKind::Domain, "scan_min_resonance needs xi_max >= 10");
  const LatticeKernel ker = LatticeKernel::make(p);
  const std::int64_t a_max = floor_q(xi_max * p.sigma).convert_to<std::int64_t>();
  const double sig = p.sigma_d();
  bool certifiable = true;
  try {
    certificate_class(p);
  } catch (const Error&) {
    certifiable = false;
  }

  MinResonanceScan scan;
  scan.rows.resize(static_cast<std::size_t>(a_max));
  parallel_for(1, a_max + 1, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t a = lo; a < hi; ++a) {
      const double xi = static_cast<double>(a) / sig;
      std::set<std::int64_t> centers;
      auto add = [&](double x) {
        if (std::isfinite(x)) centers.insert(static_cast<std::int64_t>(std::llround(x * sig)));
      };
      add(xi / 2);
      if (p.has_roots) {
        add(p.c1_d() * xi);
        add(p.c2_d() * xi);
        if (p.alpha != 4 && p.alpha != 1) {
          auto d = decompose_roots(p, Rational(a) / p.sigma);
          add(d.x1);
          add(d.x2);
        }
      }
      std::set<std::int64_t> window;
      for (auto c : centers)
        for (std::int64_t k = -2; k <= 2; ++k) window.insert(c + k);
      __int128 best = -1;
      std::int64_t best_b = 0;
      for (auto b : window) {
        __int128 v = i128_abs(ker(a, b));
        if (best < 0 || v < best) {
          best = v;
          best_b = b;
        }
      }
      MinResonanceRow row;
      row.xi = Rational(a) / p.sigma;
      row.xi1_min = Rational(best_b) / p.sigma;
      row.H_min = abs(resonance_H(p, row.xi, row.xi1_min));
      if (certifiable) {
        row.bound = certified_lower_bound(p, row.xi, row.xi1_min);
        row.valid = *row.bound <= to_double(row.H_min);
      }
      scan.rows[static_cast<std::size_t>(a - 1)] = std::move(row);
    }
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::int64_t n = 0;
  for (const auto& r : scan.rows) {
    if (r.H_min == 0) continue;
    double x = std::log(to_double(r.xi)), y = std::log(to_double(r.H_min));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  scan.fitted_points = n;
  scan.fitted_exponent = (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx)
                                  : std::numeric_limits<double>::quiet_NaN();
  return scan;
}

const char* constraint_name(EConstraint c) {
  switch (c) {
    case EConstraint::ResonanceGap: return "ResonanceGap";
    case EConstraint::C2Nonvanish: return "C2Nonvanish";
    case EConstraint::RationalDenominator: return "RationalDenominator";
    case EConstraint::DiophantineCutoff: return "DiophantineCutoff";
    case EConstraint::RemainderDomination: return "RemainderDomination";
  }
  return "unknown";
}

ThresholdReport threshold_E(const DispersionParams& p, double s, std::int64_t n_max) {
  require_middle_alpha(p, "threshold_E");
  ThresholdReport rep;
  rep.s = s;
  const double R = p.R_d(), a = p.alpha_d(), b = std::abs(p.beta_d());
  auto push = [&](EConstraint k, double v, bool cert) {
    rep.terms.push_back({k, v, cert});
    if (cert) {
      rep.constraints_applied.push_back(k);
      rep.E = std::max(rep.E, v);
    }
  };
  push(EConstraint::ResonanceGap, 4.0 / R * (1.0 + b / a), true);
  push(EConstraint::C2Nonvanish, 6.0 / std::abs(3.0 - R), true);
  if (p.c1_exact) {
    double pden = to_double(Rational(denominator(*p.c1_exact)));
    push(EConstraint::RationalDenominator, 2.0 * pden * b / (a * R), true);
    if (auto Eq = certified_E_exact(p)) rep.E = to_double(*Eq);
  } else if (n_max > 0 && p.beta != 0) {
    auto lam = RealNumber::approx(p.lambda, "lambda");
    auto e1 = estimate_indices(RealNumber::approx(p.c1, "c1"), lam, n_max);
    auto e2 = estimate_indices(RealNumber::approx(p.c2, "c2"), lam, n_max);
    double N = static_cast<double>(std::max(e1.witness_N, e2.witness_N));
    double K1 = std::min(e1.witness_K, e2.witness_K);
    double lam_d = p.lambda_d();
    push(EConstraint::DiophantineCutoff, N + 1.0, false);
    push(EConstraint::RemainderDomination, 24.0 * lam_d * lam_d / (R * K1), false);
  }
  return rep;
}

}  // namespace mbkdv
