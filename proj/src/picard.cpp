#include "mbkdv/picard.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace mbkdv {

void SparseSpectrum::set(const Rational& xi, cplx c) {
  if (c == cplx(0.0, 0.0)) {
    entries.erase(xi);
    return;
  }
  entries[xi] = c;
}

void SparseSpectrum::add_cosine(const DispersionParams& p, const Rational& k, double amplitude) {
  lattice_index(p, k);
  const double weight = std::numbers::pi * p.sigma_d() * amplitude;
  if (k == 0) {
    entries[k] += 2.0 * weight;
    return;
  }
  entries[k] += weight;
  entries[Rational(-k)] += weight;
}

bool SparseSpectrum::hermitian(double tol) const {
  for (const auto& [xi, c] : entries) {
    auto it = entries.find(Rational(-xi));
    cplx partner = it == entries.end() ? cplx(0.0, 0.0) : it->second;
    if (std::abs(partner - std::conj(c)) > tol * (1.0 + std::abs(c))) return false;
  }
  return true;
}

const ExponentialSum* TimeSpectrum::at(const Rational& xi) const {
  auto it = entries.find(xi);
  return it == entries.end() ? nullptr : &it->second;
}

std::map<Rational, cplx> TimeSpectrum::evaluate(double t) const {
  std::map<Rational, cplx> out;
  for (const auto& [xi, f] : entries) out.emplace(xi, f(t));
  return out;
}

bool TimeSpectrum::hermitian_at(double t, double tol) const {
  auto vals = evaluate(t);
  double scale = 0;
  for (const auto& [xi, c] : vals) scale = std::max(scale, std::abs(c));
  for (const auto& [xi, c] : vals) {
    auto it = vals.find(Rational(-xi));
    cplx partner = it == vals.end() ? cplx(0.0, 0.0) : it->second;
    if (std::abs(partner - std::conj(c)) > tol * (1.0 + scale)) return false;
  }
  return true;
}

namespace {

TimeSpectrum linear_flow(const DispersionParams& p, const SparseSpectrum& data, Equation eq) {
  TimeSpectrum out;
  for (const auto& [xi, c] : data.entries) {
    if (c == cplx(0.0, 0.0)) continue;
    out.entries.emplace(xi, ExponentialSum::term(c, 0, dispersion_phase(p, xi, eq)));
  }
  return out;
}

// coef * duhamel_P(xi) of  i xi (1/(2 pi sigma)) sum_{xi1} f(xi1) g(xi - xi1)
void add_nonlinear(const DispersionParams& p, const TimeSpectrum& f, const TimeSpectrum& g, double coef,
                   Equation eq, TimeSpectrum& out) {
  if (f.entries.empty() || g.entries.empty()) return;
  std::map<Rational, ExponentialSum> conv;
  for (const auto& [x1, a] : f.entries)
    for (const auto& [x2, b] : g.entries) {
      Rational xi = x1 + x2;
      if (xi == 0) continue;
      conv[xi] += a * b;
    }
  const double measure = 1.0 / (2.0 * std::numbers::pi * p.sigma_d());
  for (auto& [xi, sum] : conv) {
    if (sum.empty()) continue;
    cplx factor = coef * cplx(0.0, to_double(xi)) * measure;
    ExponentialSum term = duhamel(dispersion_phase(p, xi, eq), sum * factor);
    if (term.empty()) continue;
    out.entries[xi] += term;
  }
}

}  // namespace

PicardIterates picard_iterates(const DispersionParams& p, const SparseSpectrum& phi0,
                               const SparseSpectrum& psi0, int order) {
  if (order < 1 || order > 3) fail(ErrorKind::Domain, "Picard order must be 1, 2 or 3");
  for (const auto& [xi, c] : phi0.entries) lattice_index(p, xi);
  for (const auto& [xi, c] : psi0.entries) lattice_index(p, xi);
  PicardIterates it;
  it.phi.push_back(linear_flow(p, phi0, Equation::U));
  it.psi.push_back(linear_flow(p, psi0, Equation::V));
  if (order >= 2) {
    TimeSpectrum phi2, psi2;
    add_nonlinear(p, it.psi[0], it.psi[0], -1.0, Equation::U, phi2);
    add_nonlinear(p, it.phi[0], it.psi[0], -2.0, Equation::V, psi2);
    it.phi.push_back(std::move(phi2));
    it.psi.push_back(std::move(psi2));
  }
  if (order >= 3) {
    TimeSpectrum phi3, psi3;
    add_nonlinear(p, it.psi[0], it.psi[1], -3.0, Equation::U, phi3);
    add_nonlinear(p, it.phi[0], it.psi[1], -3.0, Equation::V, psi3);
    add_nonlinear(p, it.phi[1], it.psi[0], -3.0, Equation::V, psi3);
    it.phi.push_back(std::move(phi3));
    it.psi.push_back(std::move(psi3));
  }
  return it;
}

Rational gamma3_G(const DispersionParams& p, const Rational& eta1, const Rational& eta2, const Rational& eta3) {
  if (eta1 + eta2 + eta3 != 0) fail(ErrorKind::Domain, "gamma3_G needs eta1 + eta2 + eta3 = 0");
  return dispersion_phase(p, eta1, Equation::V) + dispersion_phase(p, eta2, Equation::V) +
         dispersion_phase(p, eta3, Equation::U);
}

double hs_norm(const DispersionParams& p, const std::map<Rational, cplx>& spectrum, double s) {
  double acc = 0;
  for (const auto& [xi, c] : spectrum) {
    double x = to_double(xi);
    acc += std::pow(1.0 + x * x, s) * std::norm(c);
  }
  return std::sqrt(acc / (2.0 * std::numbers::pi * p.sigma_d()));
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorKind::Fit, "slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = static_cast<double>(n) * sxx - sx * sx;
  if (den == 0) fail(ErrorKind::Fit, "slope fit needs distinct abscissae");
  return (static_cast<double>(n) * sxy - sx * sy) / den;
}

}  // namespace mbkdv
