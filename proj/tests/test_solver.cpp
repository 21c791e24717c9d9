#include "mbkdv/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mbkdv;

namespace {

std::vector<cplx> spectrum_of(const TorusGrid& g, const std::function<double(double)>& f) {
  std::vector<double> vals;
  for (double x : g.points()) vals.push_back(f(x));
  return to_spectral(g, vals);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(TorusGrid::make(Rational(1), 100), Error);
  CHECK_THROWS_AS(TorusGrid::make(Rational(1, 2), 64), Error);
  auto g = TorusGrid::make(Rational(2), 64);
  CHECK(g.length() == doctest::Approx(4 * std::numbers::pi));
  CHECK(g.xi(3) == 1.5);
  CHECK(g.wavenumber(63) == -1);
}

TEST_CASE("FFT convention and round trip") {
  auto g = TorusGrid::make(Rational(1), 32);
  auto hat = spectrum_of(g, [](double x) { return 2.0 * std::cos(3 * x); });
  CHECK(std::abs(hat[3] - cplx(2 * std::numbers::pi, 0)) < 1e-12);
  CHECK(std::abs(hat[g.index_of(-3)] - cplx(2 * std::numbers::pi, 0)) < 1e-12);
  auto back = to_physical(g, hat);
  for (std::size_t i = 0; i < back.size(); ++i)
    CHECK(back[i] == doctest::Approx(2.0 * std::cos(3 * g.points()[i])).epsilon(1e-13));
}

TEST_CASE("mean reduction") {
  auto g = TorusGrid::make(Rational(1), 32);
  auto a = mean_reduce(g, spectrum_of(g, [](double x) { return 2 + std::cos(x); }));
  CHECK(a.beta == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(a.field[0]) == 0.0);
  auto z = mean_reduce(g, std::vector<cplx>(32));
  CHECK(z.beta == 0.0);
  auto b = mean_reduce(g, spectrum_of(g, [](double x) { return 3 * std::sin(2 * x) - 5; }));
  CHECK(b.beta == doctest::Approx(-5.0).epsilon(1e-14));
  auto back = to_physical(g, b.field);
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(std::abs(back[i] - 3 * std::sin(2 * g.points()[i])) < 1e-13);
}

TEST_CASE("scaling transform") {
  auto g = TorusGrid::make(Rational(1), 32);
  auto unit = SpectralState::zero(g);
  unit.u_hat = spectrum_of(g, [](double x) { return std::cos(x); });
  auto sc = scale_problem(unit, Rational(2), Rational(3));
  CHECK(sc.beta_sigma == Rational(3, 4));
  const auto& G = sc.state.grid;
  CHECK(G.sigma == 2);
  auto u = to_physical(G, sc.state.u_hat);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - 0.25 * std::cos(G.points()[i] / 2)) < 1e-13);
  double l2_in = hs_norm(g, unit.u_hat, 0) * std::sqrt(2 * std::numbers::pi);
  double l2_out = hs_norm(G, sc.state.u_hat, 0) * std::sqrt(2 * std::numbers::pi);
  CHECK(l2_out == doctest::Approx(std::pow(2.0, -1.5) * l2_in).epsilon(1e-12));
  auto id = scale_problem(unit, Rational(1));
  for (int i = 0; i < 32; ++i) CHECK(std::abs(id.state.u_hat[i] - unit.u_hat[i]) < 1e-14);
  CHECK_THROWS_AS(scale_problem(unit, Rational(1, 2)), Error);
}

TEST_CASE("linear propagation solves the linear equations") {
  auto p = DispersionParams::make(Rational(2), Rational(3));
  auto g = TorusGrid::make(Rational(1), 32);
  auto s = SpectralState::zero(g);
  s.u_hat = spectrum_of(g, [](double x) { return std::cos(x); });
  s.v_hat = spectrum_of(g, [](double x) { return std::cos(x); });
  auto s0 = linear_propagate(p, s, 0.0);
  for (int i = 0; i < 32; ++i) CHECK(s0.u_hat[i] == s.u_hat[i]);
  const double t = 0.37;
  auto st = linear_propagate(p, s, t);
  auto u = to_physical(g, st.u_hat);
  auto v = to_physical(g, st.v_hat);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double x = g.points()[i];
    CHECK(std::abs(u[i] - std::cos(x + t)) < 1e-13);
    // v_t + 2 v_xxx + 3 v_x = 0 with v = cos(x + c t): c = 2 - 3... phase e^{i(2 - 3) t} at xi = 1.
    CHECK(std::abs(v[i] - std::cos(x - t)) < 1e-13);
  }
  // Residual of the PDE by spectral differentiation.
  const double h = 1e-4;
  auto a = linear_propagate(p, s, t + h), b = linear_propagate(p, s, t - h);
  double res = 0;
  for (int i = 0; i < 32; ++i) {
    double xi = g.xi(i);
    cplx dt = (a.v_hat[i] - b.v_hat[i]) / (2 * h);
    cplx rhs = cplx(0, 2 * xi * xi * xi - 3 * xi) * st.v_hat[i];
    res = std::max(res, std::abs(dt - rhs) / (2 * std::numbers::pi));
  }
  CHECK(res < 1e-6);  // central difference error, not the propagator
}

TEST_CASE("zero data stays zero") {
  auto p = DispersionParams::make(Rational(2), Rational(1));
  auto g = TorusGrid::make(Rational(1), 64);
  SolverConfig c;
  c.dt = 1e-2;
  c.t_end = 0.5;
  auto tr = evolve(p, SpectralState::zero(g), c);
  for (const auto& z : tr.final_state().u_hat) CHECK(std::abs(z) == 0.0);
  for (const auto& z : tr.final_state().v_hat) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("linear evolution equals the propagator") {
  auto p = DispersionParams::make(Rational(3), Rational(2));
  auto g = TorusGrid::make(Rational(1), 64);
  SparseSpectrum u, v;
  u.add_cosine(p, Rational(2), 0.3);
  v.add_cosine(p, Rational(5), 0.7);
  auto s = state_from_spectra(g, u, v);
  SolverConfig c;
  c.dt = 1e-2;
  c.t_end = 0.8;
  c.nonlinear = false;
  auto tr = evolve(p, s, c);
  auto exact = linear_propagate(p, s, 0.8);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(tr.final_state().u_hat[i] - exact.u_hat[i]) < 1e-12);
    CHECK(std::abs(tr.final_state().v_hat[i] - exact.v_hat[i]) < 1e-12);
  }
}

TEST_CASE("nonlinear evolution keeps symmetry, mean and quadratic invariant") {
  auto p = DispersionParams::make(Rational(2), Rational(1));
  auto g = TorusGrid::make(Rational(1), 256);
  SparseSpectrum u, v;
  u.add_cosine(p, Rational(1), 0.5);
  v.add_cosine(p, Rational(2), 0.5);
  SolverConfig c;
  c.dt = 1e-3;
  c.t_end = 1.0;
  c.diagnostics_every = 50;
  auto tr = evolve(p, state_from_spectra(g, u, v), c);
  CHECK(tr.final_state().hermitian(1e-12));
  CHECK(tr.final_state().dealiased());
  CHECK(tr.diagnostics.max_mean_drift < 1e-10);
  CHECK(tr.diagnostics.max_relative_quadratic_drift < 1e-6);
  CHECK(std::abs(tr.final_state().u_hat[0]) < 1e-12);
  CHECK(tr.diagnostics.steps == 1000);
}

TEST_CASE("blow-up is reported") {
  auto p = DispersionParams::make(Rational(2), Rational(1));
  auto g = TorusGrid::make(Rational(1), 64);
  SparseSpectrum u, v;
  u.add_cosine(p, Rational(3), 200.0);
  v.add_cosine(p, Rational(4), 200.0);
  SolverConfig c;
  c.dt = 0.05;
  c.t_end = 50;
  try {
    evolve(p, state_from_spectra(g, u, v), c);
    FAIL("expected blow-up");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BlowUp);
  }
}

TEST_CASE("resonance transfer experiment") {
  TransferConfig cfg;
  cfg.T = 0.5;
  cfg.samples = 10;
  auto rep = resonance_transfer_experiment(cfg);
  CHECK(rep.primary.resonant);
  CHECK_FALSE(rep.companion.resonant);
  CHECK(rep.primary.slope_agreement <= 0.05);
  CHECK(rep.ratio_at_T > 1.0);
  TransferConfig z = cfg;
  z.delta = 0;
  auto zr = resonance_transfer_experiment(z);
  for (double a : zr.primary.solver_amplitude) CHECK(a == 0.0);
  TransferConfig bad = cfg;
  bad.N = 12;
  CHECK_THROWS_AS(resonance_transfer_experiment(bad), Error);
}
