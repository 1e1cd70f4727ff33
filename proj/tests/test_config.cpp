#include "plap/config.hpp"
#include "plap/io.hpp"
#include "plap/runner.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace plap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plap_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

int run_text(const std::string& text, const fs::path& out) {
  std::ostringstream log;
  RunOverrides ov;
  ov.output = out.string();
  try {
    return run_experiment(parse_config(text), text, ov, log);
  } catch (const ConfigError&) {
    return exit_code::config_error;
  }
}

int cli(const std::string& args) {
  const std::string cmd = std::string(PLAPFLOW_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kEvolve = R"({
  "kind": "evolve",
  "grid": {"l": 1.0, "n_cells": 32},
  "reaction": {"form": "interpolated", "p": 3.0, "a0": 100.0, "a_inf": 10.0, "s": 2.0},
  "evolution": {"dt": 0.002, "t_end": 0.2, "snapshot_every": 10, "write_profiles": true},
  "initial": {"kind": "random", "amplitude": 0.5},
  "seed": 7
})";

}  // namespace

TEST(Config, ParsesFullDocument) {
  const ExperimentConfig cfg = parse_config(kEvolve);
  EXPECT_EQ(cfg.kind, ExperimentKind::evolve);
  EXPECT_EQ(cfg.n_cells, 32);
  ASSERT_TRUE(cfg.reaction);
  EXPECT_EQ(cfg.reaction->form, "interpolated");
  EXPECT_EQ(cfg.evolution.snapshot_every, 10);
  EXPECT_TRUE(cfg.write_profiles);
  ASSERT_TRUE(cfg.seed);
  EXPECT_EQ(*cfg.seed, 7u);
}

TEST(Config, UnknownKeyNamesFieldAndLine) {
  const std::string text = "{\n  \"kind\": \"eigen\",\n  \"eigen\": {\n    \"n_max\": 2,\n    \"nmax\": 3\n  }\n}";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "eigen.nmax");
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(Config, MalformedJsonReportsLine) {
  try {
    parse_config("{\n  \"kind\": \"eigen\",\n  \"eigen\": {\"n_max\": 2,}\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Config, RejectsMissingSectionsAndBadValues) {
  EXPECT_THROW(parse_config(R"({"kind": "evolve"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"kind": "bogus"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"kind": "eigen", "eigen": {"p": [1.5]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"kind": "equilibria", "grid": {"n_cells": 1},
                               "reaction": {"form": "zero", "p": 2}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"kind": "connect", "grid": {}, "reaction": {"form": "zero", "p": 2},
                               "evolution": {}, "connect": {"directions": [0]}})"),
               ConfigError);
  EXPECT_NO_THROW(parse_config(R"({"kind": "verify"})"));
}

TEST(Runner, EigenTableOnPi) {
  const fs::path out = scratch("eigen");
  const std::string text = R"({"kind": "eigen", "grid": {"l": 3.141592653589793, "n_cells": 64},
                               "eigen": {"p": [2.0], "n_max": 3}})";
  ASSERT_EQ(run_text(text, out), exit_code::ok);
  std::istringstream csv(slurp(out / "eigen.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n,p,l,lambda_closed,lambda_shooting,gap");
  for (int n = 1; n <= 3; ++n) {
    ASSERT_TRUE(std::getline(csv, line));
    std::vector<double> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(std::stod(cell));
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_NEAR(cells[3], n * n, 1e-12);
    EXPECT_NEAR(cells[4], n * n, 1e-8);
  }
  const Json manifest = Json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["exit_code"], 0);
  EXPECT_EQ(manifest["config_hash"], hex64(fnv1a(text)));
}

TEST(Runner, BlowupExitCode) {
  const fs::path out = scratch("blowup");
  const std::string text = R"({"kind": "evolve", "grid": {"n_cells": 32},
    "reaction": {"form": "homogeneous", "p": 3.0, "g": [60.0]},
    "evolution": {"dt": 0.0005, "t_end": 1.0, "blowup_threshold": 1000.0},
    "initial": {"kind": "eigenfunction", "n": 1}})";
  EXPECT_EQ(run_text(text, out), exit_code::blowup);
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  EXPECT_EQ(Json::parse(slurp(out / "manifest.json"))["exit_code"], exit_code::blowup);
}

TEST(Runner, RerunIsByteIdentical) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  ASSERT_EQ(run_text(kEvolve, a), exit_code::ok);
  ASSERT_EQ(run_text(kEvolve, b), exit_code::ok);
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
    const fs::path rel = fs::relative(entry.path(), a);
    EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 4u);  // trajectory, final, profiles
  Json ma = Json::parse(slurp(a / "manifest.json")), mb = Json::parse(slurp(b / "manifest.json"));
  ma.erase("timestamp");
  mb.erase("timestamp");
  ma.erase("outputs");
  mb.erase("outputs");
  EXPECT_EQ(ma, mb);
}

TEST(Runner, EquilibriaAndConnect) {
  const fs::path out = scratch("connect");
  const std::string text = R"({"kind": "connect", "grid": {"n_cells": 32},
    "reaction": {"form": "interpolated", "p": 3.0, "a0": 100.0, "a_inf": 10.0},
    "evolution": {"dt": 0.002, "t_end": 60, "prox_tol": 1e-11, "snapshot_every": 10,
                  "steady_udot_tol": 1e-8, "steady_window": 20},
    "connect": {"epsilon": 0.001, "criteria": {"window": 20}}})";
  ASSERT_EQ(run_text(text, out), exit_code::ok);
  const Json doc = Json::parse(slurp(out / "connections.json"));
  EXPECT_EQ(doc["orbits"].size(), 2u);
  EXPECT_EQ(doc["equilibria"]["records"].size(), 3u);
  EXPECT_TRUE(doc["graph"]["acyclic"].get<bool>());
  EXPECT_TRUE(fs::exists(out / "orbit_000.csv"));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  spit(dir / "eigen.json", R"({"kind": "eigen", "eigen": {"p": [2.0, 3.0], "n_max": 2}})");
  spit(dir / "bad.json", R"({"kind": "eigen", "typo": 1})");
  EXPECT_EQ(cli("eigen -c " + (dir / "eigen.json").string() + " -o " + (dir / "e").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "e" / "eigen.csv"));
  EXPECT_EQ(cli("eigen -c " + (dir / "bad.json").string() + " -o " + (dir / "b").string()), 2);
  EXPECT_EQ(cli("evolve -c " + (dir / "eigen.json").string() + " -o " + (dir / "m").string()), 2);
  EXPECT_EQ(cli("eigen -c " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(cli("evolve"), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("verify --only eigen_classical,monotonicity -o " + (dir / "v").string()), 0);
  const Json v = Json::parse(slurp(dir / "v" / "verify.json"));
  EXPECT_EQ(v["criteria"].size(), 2u);
}
