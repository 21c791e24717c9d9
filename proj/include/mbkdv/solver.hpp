#pragma once

#include "mbkdv/picard.hpp"
#include "mbkdv/resonance.hpp"

#include <map>
#include <optional>
#include <vector>

namespace mbkdv {

// num_modes equispaced nodes on [0, 2 pi sigma); frequencies k/sigma in FFT order.
struct TorusGrid {
  Rational sigma{1};
  int num_modes = 0;

  static TorusGrid make(const Rational& sigma, int num_modes);
  double sigma_d() const { return to_double(sigma); }
  double length() const;
  double spacing() const { return length() / num_modes; }
  int wavenumber(int index) const { return index <= num_modes / 2 ? index : index - num_modes; }
  int index_of(int k) const { return k >= 0 ? k : k + num_modes; }
  double xi(int index) const { return wavenumber(index) / sigma_d(); }
  int dealias_cutoff() const { return num_modes / 3; }
  std::vector<double> points() const;
};

// f^(xi) = integral over [0, 2 pi sigma) of e^{-i x xi} f(x) dx, one entry per grid index.
struct SpectralState {
  TorusGrid grid;
  std::vector<cplx> u_hat;
  std::vector<cplx> v_hat;
  double time = 0;

  static SpectralState zero(const TorusGrid& g);
  bool hermitian(double tol = 0.0) const;
  bool dealiased() const;
};

std::vector<double> to_physical(const TorusGrid& g, const std::vector<cplx>& f_hat);
std::vector<cplx> to_spectral(const TorusGrid& g, const std::vector<double>& f);

SpectralState state_from_spectra(const TorusGrid& g, const SparseSpectrum& u, const SparseSpectrum& v);
std::map<Rational, cplx> spectrum_map(const TorusGrid& g, const std::vector<cplx>& f_hat, double tol = 0.0);

enum class Integrator { LawsonRK4 };

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = true;
  Integrator integrator = Integrator::LawsonRK4;
  bool nonlinear = true;
  int diagnostics_every = 1;
  int snapshot_every = 0;  // 0: initial and final states only
};

struct DiagnosticsRecord {
  double t = 0;
  double mean_u = 0;
  double mean_v = 0;
  double quadratic_invariant = 0;
  double hs_half = 0;
  double hs_one = 0;
};

struct Diagnostics {
  std::vector<DiagnosticsRecord> records;
  double max_mean_drift = 0;
  double max_relative_quadratic_drift = 0;
  double stability_number = 0;  // dt * max |P| over the retained band
  std::int64_t steps = 0;
  double dt_used = 0;
};

struct Trajectory {
  std::vector<SpectralState> snapshots;
  Diagnostics diagnostics;
  const SpectralState& final_state() const { return snapshots.back(); }
};

double field_mean(const TorusGrid& g, const std::vector<cplx>& f_hat);
double quadratic_invariant(const SpectralState& s);
double hs_norm(const TorusGrid& g, const std::vector<cplx>& f_hat, double s);
DiagnosticsRecord diagnose(const SpectralState& s);

struct MeanReduction {
  std::vector<cplx> field;
  double beta = 0;
};
MeanReduction mean_reduce(const TorusGrid& g, const std::vector<cplx>& u0_hat);

struct ScaledProblem {
  SpectralState state;
  Rational beta_sigma;
};
// Unit-torus data (sigma = 1 grid) mapped to (u, v)(x) -> sigma^{-2} (u, v)(x / sigma).
ScaledProblem scale_problem(const SpectralState& unit, const Rational& sigma, const Rational& beta = Rational(0));

SpectralState linear_propagate(const DispersionParams& p, const SpectralState& s, double t);

Trajectory evolve(const DispersionParams& p, const SpectralState& initial, const SolverConfig& config);

struct TransferRun {
  Rational beta;
  bool resonant = false;
  std::vector<double> t;
  std::vector<double> solver_amplitude;  // |u^(N, t)|
  std::vector<double> picard_amplitude;  // delta^2 / 2 |phi2(N, t)|
  double max_relative_error = 0;
  double fitted_slope = 0;   // slope of |u^(N,t)| in t through the origin
  double predicted_slope = 0;
  double slope_agreement = 0;  // |fitted / predicted - 1| when predicted != 0
};

struct TransferConfig {
  bool alpha4 = true;
  Rational beta{3};
  std::int64_t N = 11;
  std::int64_t n = 1;
  double T = 1.0;
  double delta = 1e-3;
  double s = 1.0;
  int num_modes = 128;
  double dt = 1e-3;
  int samples = 20;
  std::optional<Rational> companion_beta;
};

struct TransferReport {
  TransferRun primary;
  TransferRun companion;
  double ratio_at_T = 0;  // primary / companion amplitude at t = T
};

TransferReport resonance_transfer_experiment(const TransferConfig& config);

}  // namespace mbkdv
