#include "mbkdv/solver.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace mbkdv {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Real <-> full-spectrum transforms through r2c / c2r, so Hermitian symmetry is exact.
class RealFFT {
 public:
  explicit RealFFT(int n) : n_(n) {
    real_ = fftw_alloc_real(n);
    half_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(plan_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, half_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(n, half_, real_, FFTW_ESTIMATE);
  }
  ~RealFFT() {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(half_);
  }
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  // f(x_j) = (1/L) sum_k f^_k e^{2 pi i j k / n}
  void to_physical(const std::vector<cplx>& f_hat, double L, std::vector<double>& out) {
    const int h = n_ / 2;
    for (int k = 0; k <= h; ++k) {
      cplx c = f_hat[k] / L;
      half_[k][0] = c.real();
      half_[k][1] = c.imag();
    }
    half_[0][1] = 0;
    if (n_ % 2 == 0) half_[h][1] = 0;
    fftw_execute(bwd_);
    out.assign(real_, real_ + n_);
  }

  // f^_k = (L/n) sum_j f(x_j) e^{-2 pi i j k / n}
  void to_spectral(const std::vector<double>& f, double L, std::vector<cplx>& out) {
    std::copy(f.begin(), f.end(), real_);
    fftw_execute(fwd_);
    out.assign(n_, cplx(0.0, 0.0));
    const double w = L / n_;
    for (int k = 0; k <= n_ / 2; ++k) out[k] = w * cplx(half_[k][0], half_[k][1]);
    for (int k = 1; k < (n_ + 1) / 2; ++k) out[n_ - k] = std::conj(out[k]);
  }

 private:
  int n_;
  double* real_;
  fftw_complex* half_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_grid(const TorusGrid& g, const std::vector<cplx>& f) {
  if (static_cast<int>(f.size()) != g.num_modes)
    fail(ErrorKind::Domain, fmt::format("spectral array has {} entries, grid has {}", f.size(), g.num_modes));
}

struct Phases {
  std::vector<cplx> u_full, u_half, v_full, v_half;
};

Phases make_phases(const DispersionParams& p, const TorusGrid& g, double h) {
  Phases ph;
  const int n = g.num_modes;
  ph.u_full.resize(n);
  ph.u_half.resize(n);
  ph.v_full.resize(n);
  ph.v_half.resize(n);
  const double a = p.alpha_d(), b = to_double(p.beta_sigma);
  for (int i = 0; i < n; ++i) {
    double x = g.xi(i);
    double Pu = x * x * x, Pv = a * x * x * x - b * x;
    ph.u_full[i] = std::polar(1.0, Pu * h);
    ph.u_half[i] = std::polar(1.0, Pu * h / 2);
    ph.v_full[i] = std::polar(1.0, Pv * h);
    ph.v_half[i] = std::polar(1.0, Pv * h / 2);
  }
  return ph;
}

class Nonlinearity {
 public:
  Nonlinearity(const TorusGrid& g, bool dealias) : g_(g), fft_(g.num_modes), dealias_(dealias) {}

  // u_t: -(i xi / 2) F(v^2);  v_t: -i xi F(u v)
  void operator()(const std::vector<cplx>& u_hat, const std::vector<cplx>& v_hat, std::vector<cplx>& du,
                  std::vector<cplx>& dv) {
    const double L = g_.length();
    fft_.to_physical(u_hat, L, u_);
    fft_.to_physical(v_hat, L, v_);
    const int n = g_.num_modes;
    w_.resize(n);
    for (int j = 0; j < n; ++j) w_[j] = v_[j] * v_[j];
    fft_.to_spectral(w_, L, du);
    for (int j = 0; j < n; ++j) w_[j] = u_[j] * v_[j];
    fft_.to_spectral(w_, L, dv);
    const int cut = g_.dealias_cutoff();
    for (int i = 0; i < n; ++i) {
      int k = g_.wavenumber(i);
      if (k == 0 || (dealias_ && std::abs(k) > cut) || (n % 2 == 0 && i == n / 2)) {
        du[i] = dv[i] = cplx(0.0, 0.0);
        continue;
      }
      cplx ix(0.0, g_.xi(i));
      du[i] *= -0.5 * ix;
      dv[i] *= -ix;
    }
  }

 private:
  const TorusGrid& g_;
  RealFFT fft_;
  bool dealias_;
  std::vector<double> u_, v_, w_;
};

double max_abs_phase(const DispersionParams& p, const TorusGrid& g, bool dealias) {
  const double a = p.alpha_d(), b = to_double(p.beta_sigma);
  double m = 0;
  for (int i = 0; i < g.num_modes; ++i) {
    int k = g.wavenumber(i);
    if (dealias && std::abs(k) > g.dealias_cutoff()) continue;
    double x = g.xi(i);
    m = std::max({m, std::abs(x * x * x), std::abs(a * x * x * x - b * x)});
  }
  return m;
}

bool finite_state(const SpectralState& s) {
  for (const auto& c : s.u_hat)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(c) > 1e150) return false;
  for (const auto& c : s.v_hat)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(c) > 1e150) return false;
  return true;
}

}  // namespace

TorusGrid TorusGrid::make(const Rational& sigma, int num_modes) {
  if (sigma < 1) fail(ErrorKind::Domain, "sigma must be >= 1");
  if (!is_power_of_two(num_modes) || num_modes < 8)
    fail(ErrorKind::Domain, fmt::format("num_modes must be a power of two >= 8, got {}", num_modes));
  return TorusGrid{sigma, num_modes};
}

double TorusGrid::length() const { return 2.0 * std::numbers::pi * sigma_d(); }

std::vector<double> TorusGrid::points() const {
  std::vector<double> x(num_modes);
  for (int j = 0; j < num_modes; ++j) x[j] = spacing() * j;
  return x;
}

SpectralState SpectralState::zero(const TorusGrid& g) {
  SpectralState s;
  s.grid = g;
  s.u_hat.assign(g.num_modes, cplx(0.0, 0.0));
  s.v_hat.assign(g.num_modes, cplx(0.0, 0.0));
  return s;
}

bool SpectralState::hermitian(double tol) const {
  const int n = grid.num_modes;
  for (const auto* f : {&u_hat, &v_hat})
    for (int i = 0; i < n; ++i) {
      cplx a = (*f)[i], b = (*f)[(n - i) % n];
      if (std::abs(a - std::conj(b)) > tol * (1.0 + std::abs(a))) return false;
    }
  return true;
}

bool SpectralState::dealiased() const {
  const int cut = grid.dealias_cutoff();
  for (int i = 0; i < grid.num_modes; ++i)
    if (std::abs(grid.wavenumber(i)) > cut && (u_hat[i] != cplx(0.0, 0.0) || v_hat[i] != cplx(0.0, 0.0)))
      return false;
  return true;
}

std::vector<double> to_physical(const TorusGrid& g, const std::vector<cplx>& f_hat) {
  check_grid(g, f_hat);
  RealFFT fft(g.num_modes);
  std::vector<double> out;
  fft.to_physical(f_hat, g.length(), out);
  return out;
}

std::vector<cplx> to_spectral(const TorusGrid& g, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != g.num_modes) fail(ErrorKind::Domain, "sample count does not match grid");
  RealFFT fft(g.num_modes);
  std::vector<cplx> out;
  fft.to_spectral(f, g.length(), out);
  return out;
}

SpectralState state_from_spectra(const TorusGrid& g, const SparseSpectrum& u, const SparseSpectrum& v) {
  SpectralState s = SpectralState::zero(g);
  auto fill = [&](const SparseSpectrum& src, std::vector<cplx>& dst) {
    for (const auto& [xi, c] : src.entries) {
      Rational a = xi * g.sigma;
      if (!is_integer(a)) fail(ErrorKind::Domain, fmt::format("frequency {} is off the lattice", to_string(xi)));
      long k = numerator(a).convert_to<long>();
      if (std::abs(k) > g.dealias_cutoff())
        fail(ErrorKind::Domain, fmt::format("frequency {} lies outside the dealiased band", to_string(xi)));
      dst[g.index_of(static_cast<int>(k))] += c;
    }
  };
  fill(u, s.u_hat);
  fill(v, s.v_hat);
  return s;
}

std::map<Rational, cplx> spectrum_map(const TorusGrid& g, const std::vector<cplx>& f_hat, double tol) {
  check_grid(g, f_hat);
  std::map<Rational, cplx> out;
  for (int i = 0; i < g.num_modes; ++i)
    if (std::abs(f_hat[i]) > tol) out.emplace(Rational(g.wavenumber(i)) / g.sigma, f_hat[i]);
  return out;
}

double field_mean(const TorusGrid& g, const std::vector<cplx>& f_hat) {
  check_grid(g, f_hat);
  return f_hat[0].real() / g.length();
}

double hs_norm(const TorusGrid& g, const std::vector<cplx>& f_hat, double s) {
  check_grid(g, f_hat);
  double acc = 0;
  for (int i = 0; i < g.num_modes; ++i) {
    double x = g.xi(i);
    acc += std::pow(1.0 + x * x, s) * std::norm(f_hat[i]);
  }
  return std::sqrt(acc / g.length());
}

double quadratic_invariant(const SpectralState& s) {
  double a = hs_norm(s.grid, s.u_hat, 0.0), b = hs_norm(s.grid, s.v_hat, 0.0);
  return a * a + b * b;
}

DiagnosticsRecord diagnose(const SpectralState& s) {
  DiagnosticsRecord r;
  r.t = s.time;
  r.mean_u = field_mean(s.grid, s.u_hat);
  r.mean_v = field_mean(s.grid, s.v_hat);
  r.quadratic_invariant = quadratic_invariant(s);
  double hu = hs_norm(s.grid, s.u_hat, 0.5), hv = hs_norm(s.grid, s.v_hat, 0.5);
  r.hs_half = std::sqrt(hu * hu + hv * hv);
  hu = hs_norm(s.grid, s.u_hat, 1.0);
  hv = hs_norm(s.grid, s.v_hat, 1.0);
  r.hs_one = std::sqrt(hu * hu + hv * hv);
  return r;
}

MeanReduction mean_reduce(const TorusGrid& g, const std::vector<cplx>& u0_hat) {
  check_grid(g, u0_hat);
  MeanReduction r;
  r.beta = u0_hat[0].real() / g.length();
  r.field = u0_hat;
  r.field[0] = cplx(0.0, 0.0);
  return r;
}

ScaledProblem scale_problem(const SpectralState& unit, const Rational& sigma, const Rational& beta) {
  if (sigma < 1) fail(ErrorKind::Domain, "sigma must be >= 1");
  if (unit.grid.sigma != 1) fail(ErrorKind::Domain, "scale_problem expects data on the unit torus");
  ScaledProblem out;
  out.state = unit;
  out.state.grid = TorusGrid::make(sigma, unit.grid.num_modes);
  const double inv = 1.0 / to_double(sigma);
  for (auto& c : out.state.u_hat) c *= inv;
  for (auto& c : out.state.v_hat) c *= inv;
  out.beta_sigma = beta / (sigma * sigma);
  return out;
}

SpectralState linear_propagate(const DispersionParams& p, const SpectralState& s, double t) {
  if (p.sigma != s.grid.sigma) fail(ErrorKind::Domain, "parameter sigma does not match the grid");
  SpectralState out = s;
  const double a = p.alpha_d(), b = to_double(p.beta_sigma);
  for (int i = 0; i < s.grid.num_modes; ++i) {
    double x = s.grid.xi(i);
    out.u_hat[i] *= std::polar(1.0, x * x * x * t);
    out.v_hat[i] *= std::polar(1.0, (a * x * x * x - b * x) * t);
  }
  out.time = s.time + t;
  return out;
}

Trajectory evolve(const DispersionParams& p, const SpectralState& initial, const SolverConfig& cfg) {
  if (!(cfg.dt > 0) || !(cfg.t_end > 0)) fail(ErrorKind::Domain, "dt and t_end must be positive");
  if (cfg.dt > cfg.t_end) fail(ErrorKind::Domain, "dt must not exceed t_end");
  if (p.sigma != initial.grid.sigma) fail(ErrorKind::Domain, "parameter sigma does not match the grid");
  check_grid(initial.grid, initial.u_hat);
  check_grid(initial.grid, initial.v_hat);
  if (cfg.dealias && !initial.dealiased()) fail(ErrorKind::Domain, "initial state is not dealiased");

  const TorusGrid& g = initial.grid;
  const int n = g.num_modes;
  const auto steps = static_cast<std::int64_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  const double h = cfg.t_end / static_cast<double>(steps);
  const Phases ph = make_phases(p, g, h);
  Nonlinearity nl(g, cfg.dealias);

  Trajectory traj;
  traj.diagnostics.steps = steps;
  traj.diagnostics.dt_used = h;
  traj.diagnostics.stability_number = h * max_abs_phase(p, g, cfg.dealias);
  SpectralState y = initial;
  traj.snapshots.push_back(y);
  const DiagnosticsRecord d0 = diagnose(y);
  traj.diagnostics.records.push_back(d0);

  std::vector<cplx> k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n), au(n), av(n);
  auto N = [&](const std::vector<cplx>& u, const std::vector<cplx>& v, std::vector<cplx>& du,
               std::vector<cplx>& dv) {
    if (cfg.nonlinear) {
      nl(u, v, du, dv);
    } else {
      std::fill(du.begin(), du.end(), cplx(0.0, 0.0));
      std::fill(dv.begin(), dv.end(), cplx(0.0, 0.0));
    }
  };

  for (std::int64_t step = 1; step <= steps; ++step) {
    N(y.u_hat, y.v_hat, k1u, k1v);
    for (int i = 0; i < n; ++i) {
      au[i] = ph.u_half[i] * (y.u_hat[i] + 0.5 * h * k1u[i]);
      av[i] = ph.v_half[i] * (y.v_hat[i] + 0.5 * h * k1v[i]);
    }
    N(au, av, k2u, k2v);
    for (int i = 0; i < n; ++i) {
      au[i] = ph.u_half[i] * y.u_hat[i] + 0.5 * h * k2u[i];
      av[i] = ph.v_half[i] * y.v_hat[i] + 0.5 * h * k2v[i];
    }
    N(au, av, k3u, k3v);
    for (int i = 0; i < n; ++i) {
      au[i] = ph.u_full[i] * y.u_hat[i] + h * ph.u_half[i] * k3u[i];
      av[i] = ph.v_full[i] * y.v_hat[i] + h * ph.v_half[i] * k3v[i];
    }
    N(au, av, k4u, k4v);
    for (int i = 0; i < n; ++i) {
      y.u_hat[i] = ph.u_full[i] * y.u_hat[i] +
                   h / 6.0 * (ph.u_full[i] * k1u[i] + 2.0 * ph.u_half[i] * (k2u[i] + k3u[i]) + k4u[i]);
      y.v_hat[i] = ph.v_full[i] * y.v_hat[i] +
                   h / 6.0 * (ph.v_full[i] * k1v[i] + 2.0 * ph.v_half[i] * (k2v[i] + k3v[i]) + k4v[i]);
    }
    y.time = h * static_cast<double>(step);
    if (!finite_state(y)) {
      fail(ErrorKind::BlowUp,
           fmt::format("solution left the finite range; last valid time {}", h * static_cast<double>(step - 1)));
    }
    const bool last = step == steps;
    if (cfg.diagnostics_every > 0 && (step % cfg.diagnostics_every == 0 || last)) {
      DiagnosticsRecord r = diagnose(y);
      auto& D = traj.diagnostics;
      D.max_mean_drift =
          std::max({D.max_mean_drift, std::abs(r.mean_u - d0.mean_u), std::abs(r.mean_v - d0.mean_v)});
      if (d0.quadratic_invariant > 0)
        D.max_relative_quadratic_drift =
            std::max(D.max_relative_quadratic_drift,
                     std::abs(r.quadratic_invariant - d0.quadratic_invariant) / d0.quadratic_invariant);
      D.records.push_back(r);
    }
    if (last || (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0)) traj.snapshots.push_back(y);
  }
  return traj;
}

namespace {

TransferRun transfer_run(const TransferConfig& c, const Rational& beta) {
  DispersionParams p = DispersionParams::make(Rational(4), beta);
  TransferRun run;
  run.beta = beta;
  run.resonant = beta == Rational(3 * c.n * c.n);

  const std::int64_t N1 = (c.N + c.n) / 2, N2 = (c.N - c.n) / 2;
  SparseSpectrum psi;
  psi.add_cosine(p, Rational(N1), 1.0);
  psi.add_cosine(p, Rational(N2), 1.0);
  double norm = hs_norm(p, psi.entries, c.s);
  for (auto& [xi, v] : psi.entries) v /= norm;

  SparseSpectrum phi0;
  PicardIterates it = picard_iterates(p, phi0, psi, 2);
  const Rational probe(c.N);
  const ExponentialSum* phi2 = it.phi[1].at(probe);

  SparseSpectrum scaled = psi;
  for (auto& [xi, v] : scaled.entries) v *= c.delta;
  TorusGrid g = TorusGrid::make(Rational(1), c.num_modes);
  SpectralState init = state_from_spectra(g, SparseSpectrum{}, scaled);

  SolverConfig cfg;
  cfg.dt = c.dt;
  cfg.t_end = c.T;
  cfg.diagnostics_every = 0;
  const auto steps = static_cast<std::int64_t>(std::ceil(c.T / c.dt - 1e-9));
  const int samples = std::max(1, c.samples);
  cfg.snapshot_every = static_cast<int>(std::max<std::int64_t>(1, steps / samples));
  Trajectory tr = evolve(p, init, cfg);

  const int idx = g.index_of(static_cast<int>(c.N));
  double sxy = 0, sxx = 0;
  for (const auto& snap : tr.snapshots) {
    if (snap.time == 0) continue;
    double a = std::abs(snap.u_hat[idx]);
    double pred = phi2 ? 0.5 * c.delta * c.delta * std::abs((*phi2)(snap.time)) : 0.0;
    run.t.push_back(snap.time);
    run.solver_amplitude.push_back(a);
    run.picard_amplitude.push_back(pred);
    if (pred > 0) run.max_relative_error = std::max(run.max_relative_error, std::abs(a - pred) / pred);
    sxy += snap.time * a;
    sxx += snap.time * snap.time;
  }
  run.fitted_slope = sxx > 0 ? sxy / sxx : 0.0;
  if (phi2) {
    for (const auto& [key, coef] : phi2->terms())
      if (key.first == 1 && key.second == Rational(c.N) * c.N * c.N)
        run.predicted_slope = 0.5 * c.delta * c.delta * std::abs(coef);
  }
  run.slope_agreement = run.predicted_slope > 0 ? std::abs(run.fitted_slope / run.predicted_slope - 1.0) : 0.0;
  return run;
}

}  // namespace

TransferReport resonance_transfer_experiment(const TransferConfig& c) {
  if (!c.alpha4) fail(ErrorKind::Unsupported, "the transfer experiment is defined for alpha = 4 only");
  if (c.n < 1 || c.N <= c.n) fail(ErrorKind::Admissibility, "transfer experiment needs N > n >= 1");
  if ((c.N + c.n) % 2 != 0) fail(ErrorKind::Admissibility, "transfer experiment needs N and n of equal parity");
  if (2 * c.N > TorusGrid::make(Rational(1), c.num_modes).dealias_cutoff())
    fail(ErrorKind::Domain, "num_modes too small to resolve the quadratic interactions of mode N");
  if (!(c.delta >= 0)) fail(ErrorKind::Domain, "delta must be nonnegative");
  TransferReport r;
  r.primary = transfer_run(c, c.beta);
  Rational resonant_beta(3 * c.n * c.n);
  Rational other = c.companion_beta ? *c.companion_beta : (c.beta == resonant_beta ? c.beta - 1 : resonant_beta);
  r.companion = transfer_run(c, other);
  double a = r.primary.solver_amplitude.empty() ? 0.0 : r.primary.solver_amplitude.back();
  double b = r.companion.solver_amplitude.empty() ? 0.0 : r.companion.solver_amplitude.back();
  r.ratio_at_T = b > 0 ? a / b : 0.0;
  return r;
}

}  // namespace mbkdv
