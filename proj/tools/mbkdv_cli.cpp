#include "mbkdv/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

using namespace mbkdv;

namespace {

struct Flag {
  const char* name;  // command-line spelling without dashes
  const char* key;   // parameter key
  const char* help;
};

struct CommandSpec {
  Command command;
  const char* help;
  std::vector<Flag> flags;
};

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {Command::Dioph,
       "Biased type-index estimate for rho with bias gamma",
       {{"rho", "rho", "rho: p/q exact, or a decimal / sqrt / pi expression"},
        {"gamma", "gamma", "bias gamma"},
        {"nmax", "nmax", "largest denominator scanned (default 5000)"},
        {"window", "window", "tail fraction used for the exponent (default 0.05)"}}},
      {Command::ResonanceScan,
       "Minimum |H| per xi on the lattice with certified bounds",
       {{"alpha", "alpha", "alpha (p/q)"},
        {"beta", "beta", "beta (p/q)"},
        {"sigma", "sigma", "torus scale sigma >= 1 (default 1)"},
        {"xi-max", "xi_max", "largest |xi| (default 200)"},
        {"s", "s", "also report the threshold E at this s"},
        {"nmax", "nmax", "denominator range for estimate-only threshold terms"}}},
      {Command::Counting,
       "Dyadic level-set counts of H in xi1",
       {{"alpha", "alpha", "alpha (p/q)"},
        {"beta", "beta", "beta (p/q)"},
        {"sigma", "sigma", "torus scale (default 1)"},
        {"xi", "xi", "comma-separated frequencies"},
        {"mexp-min", "mexp_min", "smallest log2 M (default 10)"},
        {"mexp-max", "mexp_max", "largest log2 M (default 20)"}}},
      {Command::PicardGrowth,
       "Growth exponent of a witness family over N",
       {{"case", "case", "alpha4-resonant | alpha4-nonresonant | rational-ralpha | biased-irrational | "
                         "high-index-irrational"},
        {"alpha", "alpha", "alpha (defaults by case)"},
        {"beta", "beta", "beta (p/q)"},
        {"s", "s", "Sobolev index"},
        {"N", "N", "comma-separated N values"},
        {"T", "T", "time (default 1)"},
        {"n", "n", "resonant index n (default 1)"},
        {"metric", "metric", "probe | norm"}}},
      {Command::Witness,
       "Single witness evaluation",
       {{"case", "case", "witness case"},
        {"alpha", "alpha", "alpha (defaults by case)"},
        {"beta", "beta", "beta (p/q)"},
        {"s", "s", "Sobolev index"},
        {"N", "N", "frequency scale N"},
        {"T", "T", "time (default 1)"},
        {"n", "n", "resonant index n (default 1)"}}},
      {Command::Solve,
       "Pseudospectral integration with diagnostics",
       {{"alpha", "alpha", "alpha (p/q)"},
        {"beta", "beta", "drift beta (p/q, default 0)"},
        {"sigma", "sigma", "torus scale (default 1)"},
        {"modes", "modes", "number of grid points, power of two (default 256)"},
        {"dt", "dt", "time step (default 1e-3)"},
        {"T", "T", "final time (default 1)"},
        {"u0", "u0", "cosine modes k:amp,... (k = 0 sets the mean)"},
        {"v0", "v0", "cosine modes k:amp,..."},
        {"dealias", "dealias", "true | false"},
        {"nonlinear", "nonlinear", "true | false"},
        {"snapshot-every", "snapshot_every", "steps between trajectory snapshots (0: ends only)"},
        {"diagnostics-every", "diagnostics_every", "steps between diagnostics rows"},
        {"experiment", "experiment", "none | transfer"},
        {"N", "N", "transfer: probed mode"},
        {"n", "n", "transfer: resonant index"},
        {"delta", "delta", "transfer: data amplitude"},
        {"s", "s", "transfer: Sobolev normalisation"},
        {"samples", "samples", "transfer: time samples"},
        {"companion-beta", "companion_beta", "transfer: comparison beta"}}},
      {Command::CriticalIndex,
       "Critical index branch for (alpha, beta)",
       {{"alpha", "alpha", "alpha (p/q)"},
        {"beta", "beta", "beta (p/q)"},
        {"nmax", "nmax", "denominator range on the irrational branch (default 20000)"}}},
  };
  return specs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance, Diophantine and Picard-iterate toolkit for drifted Majda-Biello systems"};
  app.require_subcommand(1);
  std::string config_path, output_path;
  std::optional<int> precision_bits, threads;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "key = value configuration file; flags take precedence");
  app.add_option("-o,--output", output_path, "output directory (default: out)");
  app.add_option("--precision-bits", precision_bits, "working precision for irrational inputs (<= 265)");
  app.add_option("--seed", seed, "seed for sampled checks");
  app.add_option("--threads", threads, "worker threads (also MBKDV_THREADS)");

  std::vector<std::pair<Command, CLI::App*>> subs;
  std::vector<std::vector<std::optional<std::string>>> slots(command_specs().size());
  for (std::size_t i = 0; i < command_specs().size(); ++i) {
    const auto& spec = command_specs()[i];
    auto* sub = app.add_subcommand(command_name(spec.command), spec.help);
    slots[i].resize(spec.flags.size());
    for (std::size_t f = 0; f < spec.flags.size(); ++f)
      sub->add_option(std::string("--") + spec.flags[f].name, slots[i][f], spec.flags[f].help);
    subs.emplace_back(spec.command, sub);
  }
  auto* run_sub = app.add_subcommand("run", "Run the command named in --config");
  auto* verify_sub = app.add_subcommand("verify", "Run the acceptance criteria");
  std::string level = "quick", only;
  bool mutate = false;
  verify_sub->add_option("--level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}));
  verify_sub->add_option("--only", only, "comma-separated criterion ids");
  verify_sub->add_flag("--mutate-resonance-sign", mutate, "negative control: flip the drift sign in A3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (threads) {
    if (*threads < 1) {
      std::fprintf(stderr, "error: --threads must be positive\n");
      return 1;
    }
    set_thread_count(static_cast<unsigned>(*threads));
  }

  if (verify_sub->parsed()) {
    VerifyOptions vo;
    vo.level = level == "full" ? VerifyLevel::Full : VerifyLevel::Quick;
    if (seed) vo.seed = *seed;
    vo.mutate_resonance_sign = mutate;
    std::string item;
    for (char ch : only + ",") {
      if (ch == ',') {
        if (!item.empty()) vo.only.push_back(item);
        item.clear();
      } else if (ch != ' ') {
        item += ch;
      }
    }
    RunManifest m = verify_suite(vo, output_path.empty() ? "out" : output_path);
    for (const auto& c : m.checks)
      std::printf("%-4s %s  %.2fs  %s\n", c.id.c_str(), c.passed ? "PASS" : "FAIL", c.seconds, c.detail.c_str());
    if (!m.all_passed()) std::fprintf(stderr, "failing criteria: %s\n", m.error_message.c_str());
    return m.exit_code;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
    else if (run_sub->parsed()) throw Error(ErrorKind::Usage, "run needs --config");
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i].second->parsed()) continue;
      cfg.command = subs[i].first;
      cfg.command_given = true;
      const auto& spec = command_specs()[i];
      for (std::size_t f = 0; f < spec.flags.size(); ++f)
        if (slots[i][f]) cfg.set(spec.flags[f].key, *slots[i][f]);
    }
    if (!cfg.command_given) throw Error(ErrorKind::Usage, "the configuration names no command");
    if (!output_path.empty()) cfg.output_path = output_path;
    if (precision_bits) cfg.precision_bits = *precision_bits;
    if (seed) cfg.seed = *seed;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", Error::kind_name(e.kind()), e.what());
    return e.exit_code();
  }

  RunManifest m = run(cfg);
  if (m.status != "ok") std::fprintf(stderr, "error (%s): %s\n", m.error_kind.c_str(), m.error_message.c_str());
  return m.exit_code;
}
