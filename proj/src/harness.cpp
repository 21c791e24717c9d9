#include "mbkdv/harness.hpp"

#include "mbkdv/diophantine.hpp"
#include "mbkdv/picard.hpp"
#include "mbkdv/resonance.hpp"
#include "mbkdv/solver.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace mbkdv {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const char* command_name(Command c) {
  switch (c) {
    case Command::Dioph: return "dioph";
    case Command::ResonanceScan: return "resonance-scan";
    case Command::Counting: return "counting";
    case Command::PicardGrowth: return "picard-growth";
    case Command::Witness: return "witness";
    case Command::Solve: return "solve";
    case Command::CriticalIndex: return "critical-index";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (auto c : {Command::Dioph, Command::ResonanceScan, Command::Counting, Command::PicardGrowth, Command::Witness,
                 Command::Solve, Command::CriticalIndex})
    if (name == command_name(c)) return c;
  fail(ErrorKind::Usage, fmt::format("unknown command '{}'", name));
}

namespace {

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "command") {
    command = parse_command(value);
    command_given = true;
  } else if (key == "output_path") {
    output_path = value;
  } else if (key == "precision_bits") {
    try {
      std::size_t used = 0;
      precision_bits = std::stoi(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      fail(ErrorKind::Usage, fmt::format("precision_bits must be an integer, got '{}'", value));
    }
  } else if (key == "seed") {
    try {
      std::size_t used = 0;
      seed = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      fail(ErrorKind::Usage, fmt::format("seed must be a nonnegative integer, got '{}'", value));
    }
  } else {
    parameters[key] = value;
  }
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = parameters.find(key);
  return it == parameters.end() ? fallback : it->second;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Usage, fmt::format("config line {}: expected key = value", lineno));
    std::string key = strip(line.substr(0, eq)), value = strip(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (key.empty()) fail(ErrorKind::Usage, fmt::format("config line {}: empty key", lineno));
    cfg.set(key, value);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool RunManifest::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["version"] = version;
  json cfg = json::object();
  for (const auto& [k, v] : config_echo) cfg[k] = v;
  j["config"] = cfg;
  j["status"] = status;
  j["exit_code"] = exit_code;
  if (!error_kind.empty()) j["error"] = {{"kind", error_kind}, {"message", error_message}};
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"id", c.id}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
  j["checks"] = cs;
  j["outputs"] = outputs;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2);
}

namespace {

class Params {
 public:
  Params(const ExperimentConfig& cfg, std::set<std::string> allowed) : cfg_(cfg) {
    for (const auto& [k, v] : cfg.parameters)
      if (!allowed.count(k))
        fail(ErrorKind::Usage, fmt::format("parameter '{}' is not accepted by {}", k, command_name(cfg.command)));
  }

  bool has(const std::string& k) const { return cfg_.has(k); }

  std::string str(const std::string& k, const std::string& fallback) const { return cfg_.get(k, fallback); }

  std::string required(const std::string& k) const {
    if (!has(k)) fail(ErrorKind::Usage, fmt::format("missing required parameter '{}'", k));
    return cfg_.get(k, "");
  }

  Rational rational(const std::string& k, std::optional<Rational> fallback = std::nullopt) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      required(k);
    }
    return parse_rational(cfg_.get(k, ""));
  }

  std::int64_t integer(const std::string& k, std::optional<std::int64_t> fallback = std::nullopt) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      required(k);
    }
    return to_int(k, cfg_.get(k, ""));
  }

  double real(const std::string& k, std::optional<double> fallback = std::nullopt) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      required(k);
    }
    const std::string v = cfg_.get(k, "");
    try {
      std::size_t used = 0;
      double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    // Accept exact fractions such as 1/2 for real-valued parameters.
    try {
      return to_double(parse_rational(v));
    } catch (const Error&) {
      fail(ErrorKind::Usage, fmt::format("parameter '{}' must be a number, got '{}'", k, v));
    }
  }

  bool boolean(const std::string& k, bool fallback) const {
    if (!has(k)) return fallback;
    std::string v = cfg_.get(k, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(ErrorKind::Usage, fmt::format("parameter '{}' must be a boolean, got '{}'", k, v));
  }

  std::vector<std::string> list(const std::string& k) const {
    std::vector<std::string> out;
    std::stringstream ss(required(k));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = strip(item);
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) fail(ErrorKind::Usage, fmt::format("parameter '{}' is an empty list", k));
    return out;
  }

  std::vector<std::int64_t> int_list(const std::string& k) const {
    std::vector<std::int64_t> out;
    for (const auto& s : list(k)) out.push_back(to_int(k, s));
    return out;
  }

 private:
  static std::int64_t to_int(const std::string& k, const std::string& v) {
    try {
      std::size_t used = 0;
      long long x = std::stoll(v, &used);
      if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Usage, fmt::format("parameter '{}' must be an integer, got '{}'", k, v));
  }

  const ExperimentConfig& cfg_;
};

json big(const BigInt& z) {
  if (z >= BigInt(std::numeric_limits<std::int64_t>::min()) && z <= BigInt(std::numeric_limits<std::int64_t>::max()))
    return z.convert_to<std::int64_t>();
  return z.str();
}

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class Writer {
 public:
  Writer(const std::string& dir, RunManifest& m) : dir_(dir), m_(m) {}

  void text(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    std::ofstream out(fs::path(dir_) / name, std::ios::binary);
    if (!out) fail(ErrorKind::Domain, fmt::format("cannot write '{}'", (fs::path(dir_) / name).string()));
    out << content;
    m_.outputs.push_back(name);
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

 private:
  std::string dir_;
  RunManifest& m_;
};

void check(RunManifest& m, const std::string& id, bool passed, std::string detail) {
  m.checks.push_back({id, passed, std::move(detail), 0.0});
}

std::string g17(double x) { return std::isfinite(x) ? format_g17(x) : std::string(); }

// ---------------------------------------------------------------- dioph

json estimate_json(const TypeIndexEstimate& e) {
  json j;
  j["rho"] = e.rho.describe();
  j["gamma"] = e.gamma.describe();
  j["n_max"] = e.n_max;
  j["mu_hat"] = e.mu_hat;
  j["nu_hat"] = e.nu_hat;
  j["witness_K"] = real_or_null(e.witness_K);
  j["witness_N"] = e.witness_N;
  json zp = json::array();
  for (const auto& z : e.zero_pairs) zp.push_back(json::array({big(z.m), z.n}));
  j["zero_pairs"] = zp;
  json table = json::array();
  for (const auto& r : e.best_table) {
    json row = json::array({r.n, big(r.m), r.distance});
    if (r.distance_exact) row.push_back(to_string(*r.distance_exact));
    table.push_back(row);
  }
  j["best_table"] = table;
  j["exact"] = e.exact;
  j["window_start"] = e.window_start;
  j["window_fraction"] = e.window_fraction;
  j["full_range_mu"] = e.full_range_mu;
  j["min_scaled_distance"] = e.min_scaled_distance;
  return j;
}

void run_dioph(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  Params P(cfg, {"rho", "gamma", "nmax", "window"});
  RealNumber rho = parse_real(P.required("rho"));
  RealNumber gamma = parse_real(P.required("gamma"));
  auto e = estimate_indices(rho, gamma, P.integer("nmax", 5000), P.real("window", kDefaultWindowFraction));
  json j = estimate_json(e);
  w.json_file("dioph.json", j);
  bool sym = e.zero_pairs.size() % 2 == 0;
  for (std::size_t i = 0; sym && i + 1 < e.zero_pairs.size(); i += 2)
    sym = e.zero_pairs[i].m == -e.zero_pairs[i + 1].m && e.zero_pairs[i].n == -e.zero_pairs[i + 1].n;
  check(m, "A2", sym, fmt::format("zero pairs sign-symmetric ({} pairs)", e.zero_pairs.size()));
  check(m, "A2", std::abs(e.mu_hat - e.nu_hat - 2.0) <= 1e-12 && e.mu_hat >= 2.0,
        fmt::format("mu_hat = nu_hat + 2 = {}", g17(e.mu_hat)));
  check(m, "A1", e.min_scaled_distance >= 0, fmt::format("min n^2 d = {}", g17(e.min_scaled_distance)));
  std::printf("%s\n", json{{"mu_hat", e.mu_hat}, {"nu_hat", e.nu_hat}, {"witness_N", e.witness_N},
                           {"zero_pairs", j["zero_pairs"]}}
                          .dump()
                          .c_str());
}

// ---------------------------------------------------------------- resonance

void run_resonance_scan(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  Params P(cfg, {"alpha", "beta", "sigma", "xi_max", "s", "nmax"});
  auto p = DispersionParams::make(P.rational("alpha"), P.rational("beta"), P.rational("sigma", Rational(1)));
  auto scan = scan_min_resonance(p, P.rational("xi_max", Rational(200)));
  std::string csv = "xi,xi1_min,H_min,bound,valid\n";
  bool all_valid = true;
  for (const auto& r : scan.rows) {
    csv += fmt::format("{},{},{},{},{}\n", to_string(r.xi), to_string(r.xi1_min), to_string(r.H_min),
                       r.bound ? g17(*r.bound) : std::string(), r.valid ? "true" : "false");
    all_valid = all_valid && r.valid;
  }
  w.text("resonance_scan.csv", csv);
  json j;
  j["alpha"] = to_string(p.alpha);
  j["beta"] = to_string(p.beta);
  j["sigma"] = to_string(p.sigma);
  j["rows"] = scan.rows.size();
  j["fitted_exponent"] = real_or_null(scan.fitted_exponent);
  j["fitted_points"] = scan.fitted_points;
  j["all_valid"] = all_valid;
  if (P.has("s")) {
    auto t = threshold_E(p, P.real("s"), P.integer("nmax", 0));
    json terms = json::array();
    for (const auto& term : t.terms)
      terms.push_back({{"constraint", constraint_name(term.kind)},
                       {"value", real_or_null(term.value)},
                       {"certified", term.certified}});
    j["threshold"] = {{"s", t.s}, {"E", t.E}, {"terms", terms}};
  }
  w.json_file("resonance_scan.json", j);
  check(m, "A3", all_valid, "certified bound below the scanned minimum on every row");
}

void run_counting(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  Params P(cfg, {"alpha", "beta", "sigma", "xi", "mexp_min", "mexp_max"});
  auto p = DispersionParams::make(P.rational("alpha"), P.rational("beta"), P.rational("sigma", Rational(1)));
  const auto lo = P.integer("mexp_min", 10), hi = P.integer("mexp_max", 20);
  if (lo < 0 || hi < lo || hi > 60) fail(ErrorKind::Domain, "need 0 <= mexp_min <= mexp_max <= 60");
  std::string csv = "xi,M,count,limit\n";
  json fits = json::array();
  bool within = true;
  double worst_exp = 0;
  for (const auto& xs : P.list("xi")) {
    Rational xi = parse_rational(xs);
    std::vector<double> lx, ly;
    for (auto e = lo; e <= hi; ++e) {
      Rational M(BigInt(1) << static_cast<unsigned>(e));
      auto c = count_level_set(p, xi, M);
      double limit = 8.0 * p.sigma_d() * std::sqrt(to_double(M));
      csv += fmt::format("{},{},{},{}\n", to_string(xi), to_string(M), c.count, g17(limit));
      within = within && static_cast<double>(c.count) <= limit;
      if (c.count > 0) {
        lx.push_back(std::log(to_double(M)));
        ly.push_back(std::log(static_cast<double>(c.count)));
      }
    }
    double slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : std::nan("");
    if (std::isfinite(slope)) worst_exp = std::max(worst_exp, slope);
    fits.push_back({{"xi", to_string(xi)}, {"fitted_exponent", real_or_null(slope)}, {"nonzero_bins", lx.size()}});
  }
  w.text("counting.csv", csv);
  w.json_file("counting.json", json{{"alpha", to_string(p.alpha)},
                                    {"beta", to_string(p.beta)},
                                    {"sigma", to_string(p.sigma)},
                                    {"fits", fits}});
  check(m, "A4", within, "count <= 8 sigma M^(1/2) on every bin");
  check(m, "A4", worst_exp <= 0.55, fmt::format("largest fitted exponent {}", g17(worst_exp)));
}

// ---------------------------------------------------------------- picard

Rational default_alpha(WitnessCase c) {
  switch (c) {
    case WitnessCase::Alpha4Resonant:
    case WitnessCase::Alpha4Nonresonant: return Rational(4);
    case WitnessCase::RationalRalpha: return Rational(3);
    default: return Rational(2);
  }
}

const char* anchor_of(WitnessCase c) {
  switch (c) {
    case WitnessCase::Alpha4Resonant: return "A6";
    case WitnessCase::Alpha4Nonresonant: return "A7";
    case WitnessCase::RationalRalpha: return "A8";
    default: return "A9";
  }
}

void run_picard_growth(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  Params P(cfg, {"case", "alpha", "beta", "s", "N", "T", "n", "metric"});
  WitnessCase c = parse_witness_case(P.required("case"));
  auto p = DispersionParams::make(P.rational("alpha", default_alpha(c)), P.rational("beta"));
  const std::string metric_name = P.str("metric", c == WitnessCase::Alpha4Resonant ? "norm" : "probe");
  GrowthMetric metric;
  if (metric_name == "norm") metric = GrowthMetric::FullNorm;
  else if (metric_name == "probe") metric = GrowthMetric::ProbeWeighted;
  else fail(ErrorKind::Usage, "metric must be 'norm' or 'probe'");
  const double s = P.real("s");
  auto fit = growth_exponent(c, p, s, P.int_list("N"), P.real("T", 1.0), metric, P.integer("n", 1));
  std::string csv = "N,log_amplitude,hs_norm\n";
  for (std::size_t i = 0; i < fit.N.size(); ++i)
    csv += fmt::format("{},{},{}\n", fit.N[i], g17(fit.log_amplitude[i]), g17(fit.hs_norm[i]));
  w.text("growth.csv", csv);
  w.json_file("growth.json", json{{"case", witness_case_name(c)},
                                  {"alpha", to_string(p.alpha)},
                                  {"beta", to_string(p.beta)},
                                  {"s", s},
                                  {"T", P.real("T", 1.0)},
                                  {"metric", metric_name},
                                  {"slope", fit.slope},
                                  {"expected", fit.expected}});
  const double tol = c == WitnessCase::Alpha4Resonant ? 0.05 : 0.1;
  check(m, anchor_of(c), std::abs(fit.slope - fit.expected) <= tol,
        fmt::format("slope {} vs expected {} (tolerance {})", g17(fit.slope), g17(fit.expected), tol));
  std::printf("slope = %s (expected %s)\n", g17(fit.slope).c_str(), g17(fit.expected).c_str());
}

void run_witness(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  Params P(cfg, {"case", "alpha", "beta", "s", "N", "T", "n"});
  WitnessCase c = parse_witness_case(P.required("case"));
  auto p = DispersionParams::make(P.rational("alpha", default_alpha(c)), P.rational("beta"));
  const double s = P.real("s"), T = P.real("T", 1.0);
  const auto N = P.integer("N"), n = P.integer("n", 1);
  auto fam = build_witness(c, N, s, p, n);
  auto ev = evaluate_witness(fam, T);
  json slope_partial = nullptr;
  try {
    auto ev2 = evaluate_witness(build_witness(c, 2 * N, s, p, n), T);
    if (ev.weighted_amplitude > 0 && ev2.weighted_amplitude > 0)
      slope_partial = std::log(ev2.weighted_amplitude / ev.weighted_amplitude) / std::log(2.0);
  } catch (const Error&) {
  }
  auto pairs = [](const std::vector<FreqPair>& v) {
    json a = json::array();
    for (const auto& [x, y] : v) a.push_back(json::array({to_string(x), to_string(y)}));
    return a;
  };
  json j;
  j["case"] = witness_case_name(c);
  j["N"] = fam.N;
  j["N1"] = fam.N1;
  j["N2"] = fam.N2;
  j["s"] = s;
  j["T"] = T;
  j["probe_xi"] = to_string(ev.probe_xi);
  j["amplitude_re"] = ev.target_mode_amplitude.real();
  j["amplitude_im"] = ev.target_mode_amplitude.imag();
  j["hs_norm"] = ev.hs_norm;
  j["slope_partial"] = slope_partial;
  j["probe_time"] = ev.probe_time;
  j["formula_amplitude"] = ev.formula_amplitude;
  j["weighted_amplitude"] = ev.weighted_amplitude;
  j["I1"] = {std::abs(ev.I1)};
  j["I2"] = {std::abs(ev.I2)};
  j["support_pairs"] = pairs(ev.support_pairs);
  j["d1_pairs"] = pairs(ev.d1_pairs);
  j["d2_pairs"] = pairs(ev.d2_pairs);
  j["asymptotic_cutoff_met"] = fam.asymptotic_cutoff_met;
  w.json_file("witness.json", j);
  const double target = std::abs(ev.target_mode_amplitude);
  check(m, anchor_of(c), std::abs(ev.formula_amplitude - target) <= 1e-9 * std::max(1e-300, target),
        "closed-form amplitude matches the iterate");
  std::printf("%s\n", json{{"case", j["case"]}, {"amplitude", target}, {"hs_norm", ev.hs_norm}}.dump().c_str());
}

// ---------------------------------------------------------------- solver

// Exact value of a plain decimal literal such as "-2.125".
Rational decimal_rational(const std::string& text) {
  std::string t = strip(text);
  auto dot = t.find('.');
  if (dot == std::string::npos) return parse_rational(t);
  std::string digits = t.substr(0, dot) + t.substr(dot + 1);
  if (digits == "-" || digits == "+" || digits.empty()) fail(ErrorKind::Usage, fmt::format("bad amplitude '{}'", text));
  BigInt den = 1;
  for (std::size_t i = dot + 1; i < t.size(); ++i) den *= 10;
  return parse_rational(digits) / Rational(den);
}

// "k:amplitude,..." cosine modes on the unit torus; the k = 0 entry is the mean, returned exactly.
SparseSpectrum parse_cosines(const DispersionParams& unit, const std::string& spec, Rational* mean = nullptr) {
  SparseSpectrum out;
  if (strip(spec).empty() || strip(spec) == "0") return out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorKind::Usage, fmt::format("mode '{}' must read k:amplitude", item));
    long k = 0;
    Rational a;
    try {
      k = std::stol(item.substr(0, colon));
      a = decimal_rational(item.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorKind::Usage, fmt::format("mode '{}' must read k:amplitude", item));
    }
    if (k == 0 && mean) *mean += a;
    out.add_cosine(unit, Rational(std::abs(k)), to_double(a));
  }
  return out;
}

void run_transfer(const Params& P, RunManifest& m, Writer& w) {
  TransferConfig tc;
  tc.beta = P.rational("beta", Rational(3));
  tc.N = P.integer("N", 11);
  tc.n = P.integer("n", 1);
  tc.T = P.real("T", 1.0);
  tc.delta = P.real("delta", 1e-3);
  tc.s = P.real("s", 1.0);
  tc.num_modes = static_cast<int>(P.integer("modes", 128));
  tc.dt = P.real("dt", 1e-3);
  tc.samples = static_cast<int>(P.integer("samples", 20));
  if (P.has("companion_beta")) tc.companion_beta = P.rational("companion_beta");
  if (P.rational("alpha", Rational(4)) != 4) fail(ErrorKind::Unsupported, "transfer experiment needs alpha = 4");
  auto r = resonance_transfer_experiment(tc);
  std::string csv = "t,beta,solver_amplitude,picard_amplitude\n";
  for (const auto* run : {&r.primary, &r.companion})
    for (std::size_t i = 0; i < run->t.size(); ++i)
      csv += fmt::format("{},{},{},{}\n", g17(run->t[i]), to_string(run->beta), g17(run->solver_amplitude[i]),
                         g17(run->picard_amplitude[i]));
  w.text("transfer.csv", csv);
  auto run_json = [](const TransferRun& t) {
    return json{{"beta", to_string(t.beta)},
                {"resonant", t.resonant},
                {"max_relative_error", t.max_relative_error},
                {"fitted_slope", t.fitted_slope},
                {"predicted_slope", t.predicted_slope},
                {"slope_agreement", t.slope_agreement}};
  };
  w.json_file("transfer.json", json{{"N", tc.N},
                                    {"n", tc.n},
                                    {"T", tc.T},
                                    {"delta", tc.delta},
                                    {"primary", run_json(r.primary)},
                                    {"companion", run_json(r.companion)},
                                    {"ratio_at_T", r.ratio_at_T}});
  const TransferRun& res = r.primary.resonant ? r.primary : r.companion;
  if (res.resonant)
    check(m, "A6", res.slope_agreement <= 0.05,
          fmt::format("secular slope agrees with the order-2 iterate to {}", g17(res.slope_agreement)));
}

void run_solve(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  Params P(cfg, {"alpha", "beta", "sigma", "modes", "dt", "T", "u0", "v0", "dealias", "nonlinear", "snapshot_every",
                 "diagnostics_every", "experiment", "N", "n", "delta", "s", "samples", "companion_beta"});
  const std::string experiment = P.str("experiment", "none");
  if (experiment == "transfer") return run_transfer(P, m, w);
  if (experiment != "none") fail(ErrorKind::Usage, "experiment must be 'none' or 'transfer'");

  const Rational alpha = P.rational("alpha"), beta = P.rational("beta", Rational(0));
  const Rational sigma = P.rational("sigma", Rational(1));
  const int modes = static_cast<int>(P.integer("modes", 256));
  auto unit_params = DispersionParams::make(alpha, beta);
  TorusGrid unit = TorusGrid::make(Rational(1), modes);
  Rational mean(0);
  SpectralState s0 = state_from_spectra(unit, parse_cosines(unit_params, P.str("u0", "1:0.5"), &mean),
                                        parse_cosines(unit_params, P.str("v0", "2:0.5")));
  MeanReduction red = mean_reduce(unit, s0.u_hat);
  s0.u_hat = red.field;
  const Rational drift = beta + mean;
  ScaledProblem sp = scale_problem(s0, sigma, drift);
  auto p = DispersionParams::make(alpha, drift, sigma);

  SolverConfig sc;
  sc.dt = P.real("dt", 1e-3);
  sc.t_end = P.real("T", 1.0);
  sc.dealias = P.boolean("dealias", true);
  sc.nonlinear = P.boolean("nonlinear", true);
  sc.snapshot_every = static_cast<int>(P.integer("snapshot_every", 0));
  sc.diagnostics_every = static_cast<int>(P.integer("diagnostics_every", 1));
  auto tr = evolve(p, sp.state, sc);

  std::string traj = "t,xi,re_u,im_u,re_v,im_v\n";
  for (const auto& snap : tr.snapshots)
    for (int k = 0; k <= snap.grid.dealias_cutoff(); ++k) {
      int i = snap.grid.index_of(k);
      traj += fmt::format("{},{},{},{},{},{}\n", g17(snap.time), to_string(Rational(k) / snap.grid.sigma),
                          g17(snap.u_hat[i].real()), g17(snap.u_hat[i].imag()), g17(snap.v_hat[i].real()),
                          g17(snap.v_hat[i].imag()));
    }
  w.text("trajectory.csv", traj);
  std::string diag = "t,mean_u,mean_v,quad_inv,hs_half,hs_one\n";
  for (const auto& r : tr.diagnostics.records)
    diag += fmt::format("{},{},{},{},{},{}\n", g17(r.t), g17(r.mean_u), g17(r.mean_v), g17(r.quadratic_invariant),
                        g17(r.hs_half), g17(r.hs_one));
  w.text("diagnostics.csv", diag);
  const auto& D = tr.diagnostics;
  w.json_file("solve.json", json{{"alpha", to_string(alpha)},
                                 {"beta", to_string(drift)},
                                 {"beta_sigma", to_string(p.beta_sigma)},
                                 {"sigma", to_string(sigma)},
                                 {"mean_removed", red.beta},
                                 {"modes", modes},
                                 {"dt", D.dt_used},
                                 {"steps", D.steps},
                                 {"stability_number", D.stability_number},
                                 {"max_mean_drift", D.max_mean_drift},
                                 {"max_relative_quadratic_drift", D.max_relative_quadratic_drift}});
  check(m, "A10", D.max_mean_drift < 1e-10, fmt::format("mean drift {}", g17(D.max_mean_drift)));
  check(m, "A10", D.max_relative_quadratic_drift < 1e-6 * std::max(1.0, sc.t_end),
        fmt::format("relative quadratic drift {}", g17(D.max_relative_quadratic_drift)));
}

// ---------------------------------------------------------------- critical index

void run_critical_index(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  Params P(cfg, {"alpha", "beta", "nmax"});
  auto r = critical_index(P.rational("alpha"), P.rational("beta"), P.integer("nmax", 20000));
  json j;
  j["alpha"] = to_string(r.alpha);
  j["beta"] = to_string(r.beta);
  j["s_star"] = r.s_star;
  j["branch"] = branch_name(r.branch);
  j["s_star_exact"] = r.s_star_exact ? json(to_string(*r.s_star_exact)) : json(nullptr);
  j["s_alpha_beta"] = real_or_null(r.s_alpha_beta);
  j["nu_c1"] = real_or_null(r.nu_c1);
  j["nu_c2"] = real_or_null(r.nu_c2);
  j["empirical"] = r.empirical;
  j["resonant_n"] = r.resonant_n ? json(*r.resonant_n) : json(nullptr);
  j["R_alpha"] = r.R_alpha ? json(to_string(*r.R_alpha)) : json(nullptr);
  j["convention"] = r.convention;
  j["n_max"] = r.n_max;
  w.json_file("critical_index.json", j);
  check(m, "A11", r.s_star >= 0.5 && r.s_star <= 1.0, fmt::format("branch {}", branch_name(r.branch)));
  std::printf("%s\n", json{{"s_star", r.s_star}, {"branch", branch_name(r.branch)}}.dump().c_str());
}

}  // namespace

RunManifest run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest m;
  m.command = command_name(cfg.command);
  m.config_echo = cfg.parameters;
  m.config_echo["command"] = m.command;
  m.config_echo["output_path"] = cfg.output_path;
  m.config_echo["precision_bits"] = std::to_string(cfg.precision_bits);
  m.config_echo["seed"] = std::to_string(cfg.seed);
  Writer w(cfg.output_path, m);
  try {
    if (cfg.precision_bits < 53 || cfg.precision_bits > kMaxPrecisionBits)
      fail(ErrorKind::Domain, fmt::format("precision_bits must lie in [53, {}]", kMaxPrecisionBits));
    switch (cfg.command) {
      case Command::Dioph: run_dioph(cfg, m, w); break;
      case Command::ResonanceScan: run_resonance_scan(cfg, m, w); break;
      case Command::Counting: run_counting(cfg, m, w); break;
      case Command::PicardGrowth: run_picard_growth(cfg, m, w); break;
      case Command::Witness: run_witness(cfg, m, w); break;
      case Command::Solve: run_solve(cfg, m, w); break;
      case Command::CriticalIndex: run_critical_index(cfg, m, w); break;
    }
  } catch (const Error& e) {
    m.status = "error";
    m.error_kind = Error::kind_name(e.kind());
    m.error_message = e.what();
    m.exit_code = e.exit_code();
  } catch (const std::exception& e) {
    m.status = "error";
    m.error_kind = "internal";
    m.error_message = e.what();
    m.exit_code = 3;
  }
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    fs::create_directories(cfg.output_path);
    std::ofstream(fs::path(cfg.output_path) / "manifest.json", std::ios::binary) << m.to_json() << "\n";
  } catch (const std::exception&) {
  }
  return m;
}

}  // namespace mbkdv
