#include "mbkdv/picard.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace mbkdv {

const char* witness_case_name(WitnessCase c) {
  switch (c) {
    case WitnessCase::Alpha4Resonant: return "alpha4-resonant";
    case WitnessCase::Alpha4Nonresonant: return "alpha4-nonresonant";
    case WitnessCase::RationalRalpha: return "rational-ralpha";
    case WitnessCase::BiasedIrrational: return "biased-irrational";
    case WitnessCase::HighIndexIrrational: return "high-index-irrational";
  }
  return "unknown";
}

WitnessCase parse_witness_case(const std::string& name) {
  for (auto c : {WitnessCase::Alpha4Resonant, WitnessCase::Alpha4Nonresonant, WitnessCase::RationalRalpha,
                 WitnessCase::BiasedIrrational, WitnessCase::HighIndexIrrational})
    if (name == witness_case_name(c)) return c;
  fail(ErrorKind::Usage, fmt::format("unknown witness case '{}'", name));
}

BigInt bracket_round(const Rational& y) { return round_half_even(y); }
BigInt bracket_round(const BigFloat& y) { return round_half_even(y); }

namespace {

bool beta_is_3n2(const Rational& beta, std::int64_t* n_out = nullptr) {
  auto r = exact_sqrt(beta / 3);
  if (!r || !is_integer(*r)) return false;
  if (n_out) *n_out = numerator(*r).convert_to<std::int64_t>();
  return true;
}

[[noreturn]] void inadmissible(const std::string& what) { fail(ErrorKind::Admissibility, what); }

std::int64_t to_i64(const BigInt& z) { return z.convert_to<std::int64_t>(); }

}  // namespace

SparseSpectrum WitnessFamily::psi0() const {
  SparseSpectrum s;
  const double amp = 1.0 / (std::numbers::pi * std::pow(static_cast<double>(N), this->s));
  switch (case_id) {
    case WitnessCase::Alpha4Resonant:
      s.add_cosine(params, Rational((N + n) / 2), amp);
      s.add_cosine(params, Rational((N - n) / 2), amp);
      break;
    case WitnessCase::Alpha4Nonresonant:
      s.add_cosine(params, Rational(N), amp);
      break;
    default:
      s.add_cosine(params, Rational(std::abs(N1)), amp);
      s.add_cosine(params, Rational(std::abs(N2)), amp);
      break;
  }
  return s;
}

bool WitnessFamily::probes_phi2() const {
  return case_id == WitnessCase::Alpha4Resonant || case_id == WitnessCase::HighIndexIrrational;
}

Rational WitnessFamily::probe_xi() const {
  switch (case_id) {
    case WitnessCase::Alpha4Resonant:
    case WitnessCase::Alpha4Nonresonant:
    case WitnessCase::HighIndexIrrational:
      return Rational(N);
    default:
      return Rational(N1);
  }
}

double WitnessFamily::probe_time(double T) const {
  if (case_id == WitnessCase::HighIndexIrrational) return std::pow(static_cast<double>(N), -2.0 * epsilon) * T;
  return T;
}

WitnessFamily build_witness(WitnessCase c, std::int64_t N, double s, const DispersionParams& p, std::int64_t n) {
  if (N <= 0) inadmissible("N must be a positive integer");
  if (p.sigma != 1) inadmissible("witness families live on the unit torus (sigma = 1)");
  WitnessFamily f;
  f.case_id = c;
  f.N = N;
  f.s = s;
  f.params = p;
  switch (c) {
    case WitnessCase::Alpha4Resonant: {
      if (p.alpha != 4) inadmissible("alpha4-resonant needs alpha = 4");
      if (n < 1) inadmissible("alpha4-resonant needs n >= 1");
      if (p.beta != Rational(3 * n * n))
        inadmissible(fmt::format("alpha4-resonant needs beta = 3 n^2 = {}", 3 * n * n));
      if (N <= n) inadmissible("alpha4-resonant needs N > n so that both modes are positive");
      if ((N + n) % 2 != 0) inadmissible("alpha4-resonant needs N and n of equal parity");
      f.n = n;
      f.N1 = (N + n) / 2;
      f.N2 = (N - n) / 2;
      f.asymptotic_cutoff_met = N >= 10 * n + 10;
      break;
    }
    case WitnessCase::Alpha4Nonresonant: {
      if (p.alpha != 4) inadmissible("alpha4-nonresonant needs alpha = 4");
      if (p.beta >= 0 && beta_is_3n2(p.beta)) inadmissible("alpha4-nonresonant needs beta != 3 n^2");
      f.N1 = N;
      f.N2 = 0;
      break;
    }
    case WitnessCase::RationalRalpha: {
      if (!p.has_roots || p.alpha == 4 || p.alpha == 1) inadmissible("rational-ralpha needs alpha in (0,4) \\ {1}");
      if (!p.R_rational()) inadmissible("rational-ralpha needs a rational R_alpha");
      if (p.beta == 0) inadmissible("rational-ralpha needs beta != 0");
      Rational n1 = *p.c1_exact * N, n2 = *p.c2_exact * N;
      if (!is_integer(n1) || !is_integer(n2))
        inadmissible(fmt::format("rational-ralpha needs c1 N and c2 N integral (N multiple of {})",
                                 to_string(Rational(denominator(*p.c1_exact)))));
      f.N1 = to_i64(numerator(n1));
      f.N2 = to_i64(numerator(n2));
      break;
    }
    case WitnessCase::BiasedIrrational:
    case WitnessCase::HighIndexIrrational: {
      if (!p.has_roots || p.alpha == 4 || p.alpha == 1) inadmissible("irrational families need alpha in (0,4) \\ {1}");
      if (p.R_rational()) inadmissible("irrational families need an irrational R_alpha");
      if (p.beta == 0) inadmissible("irrational families need beta != 0");
      BigFloat NN(N);
      f.N1 = to_i64(bracket_round(BigFloat(p.c1 * NN + p.lambda / NN)));
      f.N2 = to_i64(bracket_round(BigFloat(p.c2 * NN - p.lambda / NN)));
      if (f.N1 + f.N2 != N) fail(ErrorKind::Domain, "rounding identity N1 + N2 = N failed");
      if (f.N1 == 0 || f.N2 == 0 || std::abs(f.N1) == std::abs(f.N2))
        inadmissible("irrational families need distinct nonzero |N1|, |N2|");
      break;
    }
  }
  return f;
}

namespace {

const cplx kI(0.0, 1.0);

cplx amp_at(const SparseSpectrum& s, const Rational& xi) {
  auto it = s.entries.find(xi);
  return it == s.entries.end() ? cplx(0.0, 0.0) : it->second;
}

void check_cutoff(const WitnessFamily& f, double T) {
  if (!(T > 0)) fail(ErrorKind::Cutoff, "T must be positive");
  const auto& p = f.params;
  const double beta = std::abs(p.beta_d());
  const double N = static_cast<double>(f.N);
  switch (f.case_id) {
    case WitnessCase::Alpha4Resonant:
      break;
    case WitnessCase::Alpha4Nonresonant:
      if (!(N > 2.0 / (beta * T)))
        fail(ErrorKind::Cutoff, fmt::format("alpha4-nonresonant needs N > 2/(|beta| T) = {}", 2.0 / (beta * T)));
      break;
    case WitnessCase::RationalRalpha:
      if (!(N > 4.0 / (beta * T)))
        fail(ErrorKind::Cutoff, fmt::format("rational-ralpha needs N > 4/(|beta| T) = {}", 4.0 / (beta * T)));
      break;
    case WitnessCase::BiasedIrrational: {
      double G = std::abs(to_double(gamma3_G(p, Rational(f.N1), Rational(f.N2), Rational(-f.N))));
      if (!(G * T >= 4.0))
        fail(ErrorKind::Cutoff, fmt::format("biased-irrational needs |G(N1,N2,-N)| T >= 4, got {}", G * T));
      break;
    }
    case WitnessCase::HighIndexIrrational: {
      double G = std::abs(to_double(gamma3_G(p, Rational(f.N1), Rational(f.N2), Rational(-f.N))));
      double x = 0.5 * G * f.probe_time(T);
      if (!(x <= 1.8954))
        fail(ErrorKind::Cutoff,
             fmt::format("high-index-irrational needs |G| t_N / 2 <= 1.8954 (sin x/x >= 1/2), got {}", x));
      break;
    }
  }
}

}  // namespace

WitnessEvaluation evaluate_witness(const WitnessFamily& f, double T) {
  check_cutoff(f, T);
  const auto& p = f.params;
  WitnessEvaluation ev;
  ev.family = f;
  ev.T = T;
  ev.probe_time = f.probe_time(T);
  ev.probe_xi = f.probe_xi();
  const Rational xi = ev.probe_xi;
  const SparseSpectrum psi = f.psi0();
  const double Nd = static_cast<double>(f.N);

  std::set<Rational> supp;
  for (const auto& [k, c] : psi.entries) supp.insert(k);

  if (f.probes_phi2()) {
    const double norm = std::pow(Nd, -2.0 * f.s);
    for (const auto& x1 : supp) {
      Rational x2 = xi - x1;
      if (!supp.count(x2)) continue;
      FreqPair pr{x1, x2};
      ev.support_pairs.push_back(pr);
      ev.d1_pairs.push_back(pr);
      Rational G = gamma3_G(p, x1, x2, Rational(-xi));
      ev.G_values[pr] = G;
      cplx w = amp_at(psi, x1) * amp_at(psi, x2) / norm;
      ev.I1 += w * exp_sum_integrate(ExponentialSum::term(1.0, 0, G))(ev.probe_time);
    }
    ev.formula_amplitude = to_double(xi) / (2.0 * std::numbers::pi) * norm * std::abs(ev.I1 + ev.I2);
  } else {
    const double norm = std::pow(Nd, -3.0 * f.s);
    for (const auto& a : supp) {
      Rational x1 = xi - a;  // psi^(xi - xi1) != 0
      if (x1 == 0) continue;
      for (const auto& x2 : supp) {
        if (!supp.count(x1 - x2)) continue;
        FreqPair pr{x1, x2};
        ev.support_pairs.push_back(pr);
        bool in_d1 = f.case_id == WitnessCase::Alpha4Nonresonant || x1 == Rational(f.N);
        (in_d1 ? ev.d1_pairs : ev.d2_pairs).push_back(pr);
        Rational G2 = gamma3_G(p, x2, x1 - x2, Rational(-x1));
        Rational Ga = gamma3_G(p, Rational(-xi), xi - x1, x1);
        ev.G_values[pr] = G2;
        if (G2 != 0) ev.F_values[pr] = x1 / G2;
        // xi1 * int_0^T e^{i Ga t'} int_0^{t'} e^{i G2 tau} dtau dt'
        ExponentialSum inner = exp_sum_integrate(ExponentialSum::term(1.0, 0, G2));
        ExponentialSum outer = exp_sum_integrate(inner.shifted(Ga));
        cplx w = amp_at(psi, xi - x1) * amp_at(psi, x2) * amp_at(psi, x1 - x2) / norm;
        cplx J = kI * to_double(x1) * w * outer(ev.probe_time);
        (in_d1 ? ev.I1 : ev.I2) += J;
      }
    }
    ev.formula_amplitude =
        3.0 * std::abs(to_double(xi)) / (4.0 * std::numbers::pi * std::numbers::pi) * norm * std::abs(ev.I1 + ev.I2);
  }

  SparseSpectrum phi0;
  phi0.real_field = true;
  PicardIterates it = picard_iterates(p, phi0, psi, f.probes_phi2() ? 2 : 3);
  const TimeSpectrum& iter = f.probes_phi2() ? it.phi[1] : it.psi[2];
  auto values = iter.evaluate(ev.probe_time);
  auto found = values.find(xi);
  ev.target_mode_amplitude = found == values.end() ? cplx(0.0, 0.0) : found->second;
  ev.hs_norm = hs_norm(p, values, f.s);
  double px = to_double(xi);
  ev.weighted_amplitude = std::pow(1.0 + px * px, 0.5 * f.s) * std::abs(ev.target_mode_amplitude);
  return ev;
}

GrowthFit growth_exponent(WitnessCase c, const DispersionParams& p, double s, const std::vector<std::int64_t>& N_list,
                          double T, GrowthMetric metric, std::int64_t n) {
  std::set<std::int64_t> distinct(N_list.begin(), N_list.end());
  if (distinct.size() < 2) fail(ErrorKind::Fit, "growth fit needs at least two distinct N");
  if (N_list.size() < 4) fail(ErrorKind::Domain, "growth_exponent needs at least four N values");
  GrowthFit fit;
  std::vector<double> lx;
  for (auto N : N_list) {
    WitnessFamily fam = build_witness(c, N, s, p, n);
    WitnessEvaluation ev = evaluate_witness(fam, T);
    double v = metric == GrowthMetric::FullNorm ? ev.hs_norm : ev.weighted_amplitude;
    if (!(v > 0) || !std::isfinite(v)) fail(ErrorKind::Fit, fmt::format("nonpositive amplitude at N = {}", N));
    fit.N.push_back(N);
    fit.amplitude.push_back(ev.weighted_amplitude);
    fit.hs_norm.push_back(ev.hs_norm);
    fit.log_amplitude.push_back(std::log(v));
    lx.push_back(std::log(static_cast<double>(N)));
  }
  fit.slope = least_squares_slope(lx, fit.log_amplitude);
  switch (c) {
    case WitnessCase::Alpha4Resonant: fit.expected = 1.0 - s; break;
    case WitnessCase::HighIndexIrrational: fit.expected = 1.0 - s - 2.0 * 0.05; break;
    default: fit.expected = 1.0 - 2.0 * s; break;
  }
  return fit;
}

}  // namespace mbkdv
