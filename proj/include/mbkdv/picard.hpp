#pragma once

#include "mbkdv/exp_sum.hpp"
#include "mbkdv/resonance.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mbkdv {

// Fourier coefficients f^(xi) = integral over [0, 2 pi sigma) of e^{-i x xi} f(x) dx.
struct SparseSpectrum {
  std::map<Rational, cplx> entries;
  bool real_field = true;

  void set(const Rational& xi, cplx c);
  // Adds a*cos(k x) with the given measure convention: f^(+-k) = pi sigma a.
  void add_cosine(const DispersionParams& p, const Rational& k, double amplitude);
  bool hermitian(double tol = 0.0) const;
};

struct TimeSpectrum {
  std::map<Rational, ExponentialSum> entries;

  const ExponentialSum* at(const Rational& xi) const;
  std::map<Rational, cplx> evaluate(double t) const;
  bool hermitian_at(double t, double tol) const;
};

struct PicardIterates {
  std::vector<TimeSpectrum> phi;  // phi[k-1] = phi_k
  std::vector<TimeSpectrum> psi;
};

// Order 1..3. Fourier measure: integral over Z/sigma is (1/(2 pi sigma)) sum.
PicardIterates picard_iterates(const DispersionParams& p, const SparseSpectrum& phi0,
                               const SparseSpectrum& psi0, int order);

// P_{alpha,beta_sigma}(eta1) + P_{alpha,beta_sigma}(eta2) + P_{1,0}(eta3) on a zero-sum triple.
Rational gamma3_G(const DispersionParams& p, const Rational& eta1, const Rational& eta2,
                  const Rational& eta3);

// ((1/(2 pi sigma)) sum <xi>^{2s} |f^(xi)|^2)^{1/2}
double hs_norm(const DispersionParams& p, const std::map<Rational, cplx>& spectrum, double s);

enum class WitnessCase { Alpha4Resonant, Alpha4Nonresonant, RationalRalpha, BiasedIrrational, HighIndexIrrational };
const char* witness_case_name(WitnessCase c);
WitnessCase parse_witness_case(const std::string& name);

struct WitnessFamily {
  WitnessCase case_id = WitnessCase::Alpha4Nonresonant;
  std::int64_t N = 0;
  std::int64_t n = 0;   // resonant case only
  std::int64_t N1 = 0;
  std::int64_t N2 = 0;
  double s = 0;
  DispersionParams params;
  bool asymptotic_cutoff_met = true;  // resonant case: N >= 10|n| + 10
  double epsilon = 0.05;         // high-index probe time t_N = N^{-2 eps} T

  SparseSpectrum psi0() const;
  Rational probe_xi() const;
  bool probes_phi2() const;
  double probe_time(double T) const;
};

// [[y]] on exact and high-precision inputs.
BigInt bracket_round(const Rational& y);
BigInt bracket_round(const BigFloat& y);

WitnessFamily build_witness(WitnessCase c, std::int64_t N, double s, const DispersionParams& p,
                            std::int64_t n = 1);

using FreqPair = std::pair<Rational, Rational>;

struct WitnessEvaluation {
  WitnessFamily family;
  double T = 0;
  double probe_time = 0;
  Rational probe_xi;
  std::vector<FreqPair> support_pairs;
  std::vector<FreqPair> d1_pairs;
  std::vector<FreqPair> d2_pairs;
  std::map<FreqPair, Rational> G_values;  // inner phase G(xi2, xi1 - xi2, -xi1)
  std::map<FreqPair, Rational> F_values;  // xi1 / G where G != 0
  cplx I1{0, 0};
  cplx I2{0, 0};
  cplx target_mode_amplitude{0, 0};
  double formula_amplitude = 0;  // prefactor * |I1 + I2|
  double hs_norm = 0;            // H^s norm of the probed iterate at probe_time
  double weighted_amplitude = 0; // <probe>^s |target|
};

WitnessEvaluation evaluate_witness(const WitnessFamily& family, double T);

enum class GrowthMetric { ProbeWeighted, FullNorm };

struct GrowthFit {
  std::vector<std::int64_t> N;
  std::vector<double> log_amplitude;  // log of the metric
  std::vector<double> hs_norm;
  std::vector<double> amplitude;
  double slope = 0;
  double expected = 0;
};

GrowthFit growth_exponent(WitnessCase c, const DispersionParams& p, double s,
                          const std::vector<std::int64_t>& N_list, double T,
                          GrowthMetric metric = GrowthMetric::ProbeWeighted, std::int64_t n = 1);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mbkdv
