#pragma once

#include "mbkdv/numeric.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mbkdv {

// alpha, beta, sigma are exact rationals; the root data (R, c1, c2, lambda)
// is carried exactly when R is rational and at 265 bits otherwise.
struct DispersionParams {
  Rational alpha;
  Rational beta;
  Rational sigma;
  Rational beta_sigma;  // beta / sigma^2

  bool has_roots = false;  // alpha in (0, 4]
  Rational R_squared;      // 12/alpha - 3
  std::optional<Rational> R_exact;
  BigFloat R;
  BigFloat c1;
  BigFloat c2;
  BigFloat lambda;  // beta / (alpha R); zero when R = 0
  std::optional<Rational> c1_exact;
  std::optional<Rational> c2_exact;

  static DispersionParams make(const Rational& alpha, const Rational& beta,
                               const Rational& sigma = Rational(1));

  double alpha_d() const { return to_double(alpha); }
  double beta_d() const { return to_double(beta); }
  double sigma_d() const { return to_double(sigma); }
  double R_d() const { return R.convert_to<double>(); }
  double c1_d() const { return c1.convert_to<double>(); }
  double c2_d() const { return c2.convert_to<double>(); }
  double lambda_d() const { return lambda.convert_to<double>(); }
  bool R_rational() const { return R_exact.has_value(); }
};

struct FrequencyTriple {
  Rational xi;
  Rational xi1;
  Rational xi2;
  static FrequencyTriple make(const DispersionParams& p, const Rational& xi, const Rational& xi1);
};

bool on_lattice(const DispersionParams& p, const Rational& x);

enum class Equation { U, V };

// P_{1,0}(eta) = eta^3 for U, P_{alpha,beta_sigma}(eta) = alpha eta^3 - beta_sigma eta for V.
Rational dispersion_phase(const DispersionParams& p, const Rational& eta, Equation which);

Rational resonance_H(const DispersionParams& p, const Rational& xi, const Rational& xi1);

// -3 alpha xi (xi1 - x1)(xi1 - x2), expanded with the exact root sum and product.
Rational resonance_H_factored(const DispersionParams& p, const Rational& xi, const Rational& xi1);

Rational resonance_H_tilde(const DispersionParams& p, const Rational& xi1, const Rational& xi);

struct ResonanceDecomposition {
  Rational xi;
  bool complex_roots = false;
  bool expansion_valid = false;
  double x1 = 0;
  double x2 = 0;
  double q1 = 0;  // x1 - (c1 xi + lambda/(sigma^2 xi))
  double q2 = 0;  // x2 - (c2 xi - lambda/(sigma^2 xi))
  double q1_bound = 0;
  double q2_bound = 0;
  BigFloat x1_hp;
  BigFloat q1_hp;
  BigFloat q_bound_hp;
};

// x1 is the root near c1 xi for either sign of xi.
ResonanceDecomposition decompose_roots(const DispersionParams& p, const Rational& xi);

double nearest_integer_distance(double x);
Rational nearest_integer_distance(const Rational& x);

enum class CertificateClass { Alpha4NegativeBeta, Alpha4Nonresonant, RationalR };
CertificateClass certificate_class(const DispersionParams& p);

// B <= |H(xi, xi1)|.
double certified_lower_bound(const DispersionParams& p, const Rational& xi, const Rational& xi1);

struct CountingScan {
  Rational xi;
  Rational M;
  std::int64_t count = 0;
  Rational window_lo;  // scanned xi1 range
  Rational window_hi;
  std::int64_t scanned = 0;
};

CountingScan count_level_set(const DispersionParams& p, const Rational& xi, const Rational& M);

struct MinResonanceRow {
  Rational xi;
  Rational xi1_min;
  Rational H_min;  // min |H| over the window
  std::optional<double> bound;
  bool valid = true;  // bound <= H_min when a bound exists
};

struct MinResonanceScan {
  std::vector<MinResonanceRow> rows;
  double fitted_exponent = 0;
  std::int64_t fitted_points = 0;
};

MinResonanceScan scan_min_resonance(const DispersionParams& p, const Rational& xi_max);

enum class EConstraint { ResonanceGap, C2Nonvanish, RationalDenominator, DiophantineCutoff, RemainderDomination };
const char* constraint_name(EConstraint c);

struct ThresholdTerm {
  EConstraint kind;
  double value;
  bool certified;
};

struct ThresholdReport {
  double s = 0;
  double E = 0;
  std::vector<EConstraint> constraints_applied;
  std::vector<ThresholdTerm> terms;  // including estimate-only entries
};

// n_max > 0 adds the estimate-only Diophantine terms on the irrational branch.
ThresholdReport threshold_E(const DispersionParams& p, double s, std::int64_t n_max = 0);

// Integer kernel on the lattice: sigma^3 H = a^3 - alpha (b^3 + c^3) + beta a
// with xi = a/sigma, xi1 = b/sigma, c = a - b, scaled by the common
// denominator of alpha and beta so that it is integral.
struct LatticeKernel {
  __int128 A = 1, B = 0, C = 0;  // L, L*alpha, L*beta
  Rational scale;                // H = value / scale, scale = L * sigma^3
  static LatticeKernel make(const DispersionParams& p);
  __int128 operator()(__int128 a, __int128 b) const {
    __int128 c = a - b;
    return A * a * a * a - B * (b * b * b + c * c * c) + C * a;
  }
};

// a = sigma * x, requiring x in Z/sigma.
std::int64_t lattice_index(const DispersionParams& p, const Rational& x);

}  // namespace mbkdv
