#include "mbkdv/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mbkdv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mbkdv_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig make(Command c, std::map<std::string, std::string> params, const fs::path& out) {
  ExperimentConfig cfg;
  cfg.command = c;
  cfg.command_given = true;
  cfg.parameters = std::move(params);
  cfg.output_path = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = ExperimentConfig::parse(
      "# comment\n[run]\ncommand = \"critical-index\"\nalpha = 4\nbeta = '12'  # trailing\nseed = 7\n");
  CHECK(cfg.command == Command::CriticalIndex);
  CHECK(cfg.command_given);
  CHECK(cfg.get("alpha", "") == "4");
  CHECK(cfg.get("beta", "") == "12");
  CHECK(cfg.seed == 7);
  CHECK(cfg.get("missing", "x") == "x");
  CHECK_THROWS_AS(ExperimentConfig::parse("command = bogus\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("just words\n"), Error);
}

TEST_CASE("command names round-trip") {
  for (auto c : {Command::Dioph, Command::ResonanceScan, Command::Counting, Command::PicardGrowth, Command::Witness,
                 Command::Solve, Command::CriticalIndex})
    CHECK(parse_command(command_name(c)) == c);
  try {
    parse_command("frobnicate");
    FAIL("expected usage error");
  } catch (const Error& e) {
    CHECK(e.exit_code() == 1);
  }
}

TEST_CASE("critical-index run writes a manifest") {
  auto out = scratch("ci");
  auto m = run(make(Command::CriticalIndex, {{"alpha", "4"}, {"beta", "12"}}, out));
  CHECK(m.status == "ok");
  CHECK(m.exit_code == 0);
  CHECK(m.all_passed());
  auto j = nlohmann::json::parse(slurp(out / "critical_index.json"));
  CHECK(j["branch"] == "Alpha4Resonant");
  CHECK(j["s_star"].get<double>() == 1.0);
  auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(man["status"] == "ok");
  CHECK(man["version"] == kArtifactVersion);
}

TEST_CASE("failures still write a manifest") {
  auto out = scratch("fail");
  auto m = run(make(Command::CriticalIndex, {{"alpha", "5"}, {"beta", "1"}}, out));
  CHECK(m.status != "ok");
  CHECK(m.exit_code == 2);
  auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(man["error"]["kind"] == "out-of-scope");
  auto u = run(make(Command::CriticalIndex, {{"alpha", "4"}, {"bogus", "1"}}, scratch("unknown")));
  CHECK(u.exit_code == 1);
  auto prec = make(Command::CriticalIndex, {{"alpha", "4"}, {"beta", "1"}}, scratch("prec"));
  prec.precision_bits = 4096;
  CHECK(run(prec).exit_code == 2);
}

TEST_CASE("dioph run and determinism") {
  auto a = scratch("da"), b = scratch("db");
  std::map<std::string, std::string> p = {{"rho", "2/3"}, {"gamma", "1/3"}, {"nmax", "500"}};
  auto ma = run(make(Command::Dioph, p, a));
  auto mb = run(make(Command::Dioph, p, b));
  CHECK(ma.exit_code == 0);
  CHECK(slurp(a / "dioph.json") == slurp(b / "dioph.json"));
  auto j = nlohmann::json::parse(slurp(a / "dioph.json"));
  CHECK(j["zero_pairs"].size() == 2);
}

TEST_CASE("counting and scan outputs") {
  auto out = scratch("count");
  auto m = run(make(Command::Counting, {{"alpha", "4"}, {"beta", "2"}, {"xi", "101"}}, out));
  CHECK(m.exit_code == 0);
  auto csv = slurp(out / "counting.csv");
  CHECK(csv.rfind("xi,M,count,limit\n", 0) == 0);
  CHECK(csv.find("101,1048576,26,") != std::string::npos);
  auto scan = scratch("scan");
  auto ms = run(make(Command::ResonanceScan, {{"alpha", "4"}, {"beta", "2"}, {"xi_max", "50"}}, scan));
  CHECK(ms.exit_code == 0);
  CHECK(slurp(scan / "resonance_scan.csv").rfind("xi,xi1_min,H_min,bound,valid\n", 0) == 0);
}

TEST_CASE("witness and growth outputs") {
  auto out = scratch("wit");
  auto m = run(make(Command::Witness, {{"case", "rational-ralpha"}, {"alpha", "3"}, {"beta", "1"}, {"s", "1/2"}, {"N", "24"}},
                    out));
  CHECK(m.exit_code == 0);
  auto j = nlohmann::json::parse(slurp(out / "witness.json"));
  CHECK(j["N1"] == 16);
  CHECK(j["N2"] == 8);
  CHECK(j["probe_xi"] == "16");
  auto g = scratch("growth");
  auto mg = run(make(Command::PicardGrowth,
                     {{"case", "alpha4-nonresonant"}, {"beta", "1"}, {"s", "1/2"}, {"N", "32,64,128,256"}}, g));
  CHECK(mg.exit_code == 0);
  CHECK(slurp(g / "growth.csv").rfind("N,log_amplitude,hs_norm\n", 0) == 0);
  auto bad = run(make(Command::PicardGrowth,
                      {{"case", "alpha4-nonresonant"}, {"beta", "1"}, {"s", "1/2"}, {"N", "32,32"}}, scratch("gf")));
  CHECK(bad.exit_code == 3);
}

TEST_CASE("solve outputs") {
  auto out = scratch("solve");
  auto m = run(make(Command::Solve, {{"alpha", "2"}, {"beta", "1"}, {"modes", "64"}, {"dt", "1e-2"}, {"T", "0.2"}}, out));
  CHECK(m.exit_code == 0);
  CHECK(slurp(out / "trajectory.csv").rfind("t,xi,re_u,im_u,re_v,im_v\n", 0) == 0);
  CHECK(slurp(out / "diagnostics.csv").rfind("t,mean_u,mean_v,quad_inv,hs_half,hs_one\n", 0) == 0);
}
