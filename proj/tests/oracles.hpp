#pragma once

#include "mbkdv/numeric.hpp"

#include <functional>
#include <map>
#include <vector>

namespace oracle {

using mbkdv::BigInt;
using mbkdv::cplx;
using mbkdv::Rational;

// xi^3 - (alpha xi1^3 - b xi1) - (alpha xi2^3 - b xi2), xi2 = xi - xi1, b = beta / sigma^2.
Rational H(const Rational& alpha, const Rational& beta, const Rational& sigma, const Rational& xi,
           const Rational& xi1);

struct Best {
  BigInt m;
  Rational distance;
};
// Exhaustive over m within 4 of rho n + gamma / n; ties to smaller m.
Best best_approx(const Rational& rho, const Rational& gamma, std::int64_t n);

// Gauss-Kronrod on real and imaginary parts over fixed panels.
cplx integrate(const std::function<cplx(double)>& f, double a, double b);

// Count of lattice xi1 = b/sigma, |b| <= range, with M <= |H| < 2M.
std::int64_t count(const Rational& alpha, const Rational& beta, const Rational& sigma, const Rational& xi,
                   const Rational& M, std::int64_t range);

// Picard hierarchy integrated as an ODE in the interaction picture with classical RK4.
struct PicardState {
  std::map<Rational, cplx> phi[3];
  std::map<Rational, cplx> psi[3];
};
PicardState picard_ode(double alpha, double beta_sigma, const Rational& sigma, const std::map<Rational, cplx>& phi0,
                       const std::map<Rational, cplx>& psi0, double T, int steps);

}  // namespace oracle
