#pragma once

#include "mbkdv/numeric.hpp"

#include <map>
#include <string>
#include <vector>

namespace mbkdv {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kMaxPrecisionBits = 265;

enum class Command { Dioph, ResonanceScan, Counting, PicardGrowth, Witness, Solve, CriticalIndex };
const char* command_name(Command c);
Command parse_command(const std::string& name);  // Usage error on unknown names

struct ExperimentConfig {
  Command command = Command::CriticalIndex;
  bool command_given = false;
  std::map<std::string, std::string> parameters;
  std::string output_path = "out";
  int precision_bits = 256;
  std::uint64_t seed = 0;

  // `key = value` lines, '#' comments, optional [section] headers ignored,
  // quoted values unquoted. Reserved keys: command, output_path,
  // precision_bits, seed.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return parameters.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
};

struct CheckResult {
  std::string id;      // criterion identifier, e.g. "A4"
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct RunManifest {
  std::map<std::string, std::string> config_echo;
  std::string command;
  std::string version = kArtifactVersion;
  double wall_time_s = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;
  std::string status = "ok";
  std::string error_kind;
  std::string error_message;
  int exit_code = 0;

  bool all_passed() const;
  std::string to_json() const;
};

// Dispatches, writes data files and manifest.json under output_path.
// Errors are captured in the manifest; exit_code follows the error kind.
RunManifest run(const ExperimentConfig& config);

enum class VerifyLevel { Quick, Full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Quick;
  std::uint64_t seed = 20261016;
  bool mutate_resonance_sign = false;  // negative control for A3
  std::vector<std::string> only;       // empty: every criterion
};

RunManifest verify_suite(const VerifyOptions& options);
// Writes manifest.json under output_path as well.
RunManifest verify_suite(const VerifyOptions& options, const std::string& output_path);

}  // namespace mbkdv
