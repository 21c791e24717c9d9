#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <array>
#include <set>
#include <vector>

namespace oracle {

Rational H(const Rational& alpha, const Rational& beta, const Rational& sigma, const Rational& xi,
           const Rational& xi1) {
  const Rational b = beta / (sigma * sigma);
  const Rational xi2 = xi - xi1;
  return xi * xi * xi - (alpha * xi1 * xi1 * xi1 - b * xi1) - (alpha * xi2 * xi2 * xi2 - b * xi2);
}

Best best_approx(const Rational& rho, const Rational& gamma, std::int64_t n) {
  const Rational y = rho * n + gamma / n;
  BigInt f = mbkdv::floor_q(y);
  Best best{0, Rational(-1)};
  for (BigInt m = f - 4; m <= f + 4; ++m) {
    Rational d = rho - Rational(m, n) + gamma / (Rational(n) * n);
    if (d < 0) d = -d;
    if (best.distance < 0 || d < best.distance) best = {m, d};
  }
  return best;
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  // Fixed panels keep the adaptive recursion shallow on oscillatory integrands.
  constexpr int panels = 64;
  const double h = (b - a) / panels;
  cplx total(0, 0);
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h, hi = lo + h;
    auto re = [&](double t) { return f(t).real(); };
    auto im = [&](double t) { return f(t).imag(); };
    total += cplx(gauss_kronrod<double, 61>::integrate(re, lo, hi, 6, 1e-13),
                  gauss_kronrod<double, 61>::integrate(im, lo, hi, 6, 1e-13));
  }
  return total;
}

std::int64_t count(const Rational& alpha, const Rational& beta, const Rational& sigma, const Rational& xi,
                   const Rational& M, std::int64_t range) {
  std::int64_t c = 0;
  for (std::int64_t b = -range; b <= range; ++b) {
    Rational h = H(alpha, beta, sigma, xi, Rational(b) / sigma);
    if (h < 0) h = -h;
    if (h >= M && h < 2 * M) ++c;
  }
  return c;
}

PicardState picard_ode(double alpha, double beta_sigma, const Rational& sigma, const std::map<Rational, cplx>& phi0,
                       const std::map<Rational, cplx>& psi0, double T, int steps) {
  // Dense lattice indices a = sigma * xi over sums of up to three data frequencies.
  const Rational& sig = sigma;
  const double sd = mbkdv::to_double(sigma);
  auto index = [&](const Rational& k) { return mbkdv::floor_q(k * sig).convert_to<long>(); };
  long K = 0;
  for (const auto* m : {&phi0, &psi0})
    for (const auto& [k, c] : *m) K = std::max(K, std::abs(index(k)));
  K *= 3;
  const long W = 2 * K + 1;
  const double w = 1.0 / (2.0 * std::numbers::pi * sd);
  std::vector<double> xi(W), phase_rate[2];
  phase_rate[0].resize(W);
  phase_rate[1].resize(W);
  for (long a = -K; a <= K; ++a) {
    double x = a / sd;
    xi[a + K] = x;
    phase_rate[0][a + K] = x * x * x;
    phase_rate[1][a + K] = alpha * x * x * x - beta_sigma * x;
  }
  using Field = std::vector<cplx>;
  using Hier = std::array<Field, 6>;  // phi1 psi1 phi2 psi2 phi3 psi3
  auto conv = [&](const Field& f, const Field& g, long a) {
    cplx s(0, 0);
    for (long b = std::max(-K, a - K); b <= std::min(K, a + K); ++b) s += f[b + K] * g[a - b + K];
    return s;
  };
  // Interaction picture: y = e^{-iPt} x.
  auto rhs = [&](const Hier& y, double t) {
    Hier x, d;
    for (int c = 0; c < 6; ++c) {
      x[c].resize(W);
      d[c].assign(W, 0);
      for (long i = 0; i < W; ++i) x[c][i] = y[c][i] * std::polar(1.0, phase_rate[c % 2][i] * t);
    }
    for (long a = -K; a <= K; ++a) {
      if (a == 0) continue;
      const cplx ik(0.0, xi[a + K] * w);
      const cplx src[6] = {0.0,
                           0.0,
                           -ik * conv(x[1], x[1], a),
                           -2.0 * ik * conv(x[0], x[1], a),
                           -3.0 * ik * conv(x[1], x[3], a),
                           -3.0 * ik * (conv(x[0], x[3], a) + conv(x[2], x[1], a))};
      for (int c = 2; c < 6; ++c) d[c][a + K] = src[c] * std::polar(1.0, -phase_rate[c % 2][a + K] * t);
    }
    return d;
  };
  Hier y;
  for (auto& f : y) f.assign(W, 0);
  for (const auto& [k, v] : phi0) y[0][index(k) + K] = v;
  for (const auto& [k, v] : psi0) y[1][index(k) + K] = v;
  const double h = T / steps;
  auto axpy = [&](const Hier& a, const Hier& b, double s) {
    Hier r = a;
    for (int c = 0; c < 6; ++c)
      for (long i = 0; i < W; ++i) r[c][i] += s * b[c][i];
    return r;
  };
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    Hier k1 = rhs(y, t);
    Hier k2 = rhs(axpy(y, k1, h / 2), t + h / 2);
    Hier k3 = rhs(axpy(y, k2, h / 2), t + h / 2);
    Hier k4 = rhs(axpy(y, k3, h), t + h);
    for (int c = 0; c < 6; ++c)
      for (long i = 0; i < W; ++i) y[c][i] += h / 6 * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]);
  }
  PicardState out;
  for (int c = 0; c < 6; ++c)
    for (long a = -K; a <= K; ++a) {
      cplx val = y[c][a + K] * std::polar(1.0, phase_rate[c % 2][a + K] * T);
      if (std::abs(val) > 0) (c % 2 == 0 ? out.phi[c / 2] : out.psi[c / 2])[Rational(a) / sig] = val;
    }
  return out;
}

}  // namespace oracle
