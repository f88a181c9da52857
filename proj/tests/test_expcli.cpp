// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qrtlab/expcli/runner.hpp"

using namespace qrtlab;
using namespace qrtlab::expcli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qrtlab_expcli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliResult {
  int code = -1;
  std::string err;
};

CliResult cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(QRTLAB_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int st = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

RunConfig parse(const std::string& yaml) { return parse_config(YAML::Load(yaml)); }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

const char* kSmallEstimate = R"(experiment: estimate-rgp
seed: 3
qrt: z2_asymmetry
n_qubits: 4
partition: {n_a: 2}
unitary: {kind: rx_tensor_power, alpha: [0.1, 0.3]}
outcome: all
shots: 300
)";

const char* kSmallThermalize = R"(experiment: thermalize
seed: 5
qrt: z2_asymmetry
n_qubits: 4
unitary: {kind: rx_tensor_power, alpha: 0.2}
depth: 6
realizations: 40
)";

}  // namespace

TEST(Config, ShippedConfigsParse) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(QRTLAB_CONFIG_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 5);
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    parse(std::string(kSmallEstimate) + "shotz: 5\n");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("shotz"), std::string::npos);
  }
}

TEST(Config, ImproperPartitionRejected) {
  std::string y = kSmallEstimate;
  y.replace(y.find("n_a: 2"), 6, "n_a: 4");
  try {
    parse(y);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("0 < N_A < N"), std::string::npos);
  }
}

TEST(Config, OversizeIsSizeGuard) {
  std::string y = kSmallThermalize;
  y.replace(y.find("n_qubits: 4"), 11, "n_qubits: 20");
  EXPECT_THROW(parse(y), SizeGuardError);
}

TEST(Config, ExitCodes) {
  EXPECT_EQ(exit_code_for(SchemaError("x")), 2);
  EXPECT_EQ(exit_code_for(DomainError("x")), 2);
  EXPECT_EQ(exit_code_for(SizeGuardError("x")), 3);
  EXPECT_EQ(exit_code_for(NumericError("x")), 4);
}

TEST(Config, UnitaryFileRoundTrip) {
  const auto dir = scratch("unitary");
  SeededRng r(1, 0);
  const Mat u = haar_matrix_polar(4, r);
  save_unitary_file(dir / "u.txt", u);
  EXPECT_LT((load_unitary_file(dir / "u.txt").matrix() - u).norm(), 1e-12);
  save_unitary_file(dir / "bad.txt", 1.1 * u);
  EXPECT_THROW(load_unitary_file(dir / "bad.txt"), DomainError);
  write_file(dir / "short.txt", "dim 2\n1 0 0 0\n");
  EXPECT_THROW(load_unitary_file(dir / "short.txt"), SchemaError);
}

TEST(Artifacts, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, EstimateRunWritesManifestWithMatchingDigests) {
  const auto dir = scratch("estimate");
  const auto cfg = write_file(dir / "c.yaml", kSmallEstimate);
  const auto r = cli("estimate-rgp --config " + cfg.string() + " --out " + (dir / "out").string() + " --plot", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto man = read_json(dir / "out" / "manifest.json");
  EXPECT_EQ(man["seed"].get<int>(), 3);
  EXPECT_EQ(man["config"]["n_qubits"].get<int>(), 4);
  for (const auto& [name, digest] : man["digests"].items())
    EXPECT_EQ(sha256_file(dir / "out" / name), digest.get<std::string>()) << name;
  const auto csv = read_csv(dir / "out" / "estimate_rgp.csv");
  EXPECT_EQ(csv.numeric("omega_hat").size(), 2u);
  EXPECT_EQ(csv.numeric("alpha").size(), 2u);
  std::ifstream svg(dir / "out" / "plot.svg");
  std::stringstream ss;
  ss << svg.rdbuf();
  EXPECT_NE(ss.str().find("<svg"), std::string::npos);
}

TEST(Cli, OutputsAreDeterministicAcrossRunsAndWorkers) {
  const auto dir = scratch("determinism");
  const auto cfg = write_file(dir / "c.yaml", kSmallThermalize);
  const std::vector<std::string> workers{"1", "1", "3"};
  for (std::size_t i = 0; i < workers.size(); ++i) {
    const std::string w = workers[i];
    const auto out = dir / ("out" + std::to_string(i));
    ASSERT_EQ(cli("thermalize --config " + cfg.string() + " --workers " + w + " --out " + out.string(), dir).code, 0);
  }
  std::vector<std::string> digests;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) digests.push_back(read_json(e.path() / "manifest.json")["digests"].dump());
  ASSERT_EQ(digests.size(), 3u);
  EXPECT_EQ(digests[0], digests[1]);
  EXPECT_EQ(digests[0], digests[2]);
}

TEST(Cli, SeedOverrideChangesOutputs) {
  const auto dir = scratch("seed");
  const auto cfg = write_file(dir / "c.yaml", kSmallThermalize);
  ASSERT_EQ(cli("thermalize --config " + cfg.string() + " --out " + (dir / "a").string(), dir).code, 0);
  ASSERT_EQ(cli("thermalize --config " + cfg.string() + " --seed 99 --out " + (dir / "b").string(), dir).code, 0);
  const auto a = read_json(dir / "a" / "manifest.json"), b = read_json(dir / "b" / "manifest.json");
  EXPECT_EQ(b["seed"].get<int>(), 99);
  EXPECT_NE(a["digests"].dump(), b["digests"].dump());
}

TEST(Cli, ValidationExitCodes) {
  const auto dir = scratch("codes");
  std::string y = kSmallEstimate;
  y.replace(y.find("n_a: 2"), 6, "n_a: 4");
  auto r = cli("estimate-rgp --config " + write_file(dir / "na.yaml", y).string() + " --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("0 < N_A < N"), std::string::npos);

  r = cli("estimate-rgp --config " + write_file(dir / "k.yaml", std::string(kSmallEstimate) + "bogus: 1\n").string() +
              " --out " + dir.string(),
          dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);

  std::string big = kSmallThermalize;
  big.replace(big.find("n_qubits: 4"), 11, "n_qubits: 20");
  r = cli("thermalize --config " + write_file(dir / "big.yaml", big).string() + " --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 3);

  // Subcommand and config disagree.
  r = cli("thermalize --config " + (dir / "k.yaml").string() + " --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, PlotRejectsBadInput) {
  const auto dir = scratch("plot");
  write_file(dir / "empty.csv", "t,mean\n");
  auto r = cli("plot --csv " + (dir / "empty.csv").string() + " --y mean --out " + (dir / "a.svg").string(), dir);
  EXPECT_EQ(r.code, 2);
  write_file(dir / "ok.csv", "t,mean\n1,0.5\n2,0.7\n");
  r = cli("plot --csv " + (dir / "ok.csv").string() + " --y nope --out " + (dir / "b.svg").string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
  r = cli("plot --csv " + (dir / "ok.csv").string() + " --y mean --log-y --out " + (dir / "c.svg").string(), dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "c.svg"));
}

TEST(Cli, NonUnitaryMatrixFileRejected) {
  const auto dir = scratch("matfile");
  SeededRng r(2, 0);
  save_unitary_file(dir / "bad.txt", 2.0 * haar_matrix_polar(4, r));
  const std::string y = "experiment: thermalize\nqrt: z2_asymmetry\nn_qubits: 2\n"
                        "unitary: {kind: matrix_file, path: bad.txt}\ndepth: 3\nrealizations: 4\n";
  const auto res = cli("thermalize --config " + write_file(dir / "c.yaml", y).string() + " --out " +
                           (dir / "out").string(),
                       dir);
  EXPECT_EQ(res.code, 2);
  EXPECT_NE(res.err.find("unitar"), std::string::npos);
}

TEST(Cli, ThermalizeCsvHasSpecifiedColumns) {
  const auto dir = scratch("columns");
  const auto cfg = write_file(dir / "c.yaml", kSmallThermalize);
  ASSERT_EQ(cli("thermalize --config " + cfg.string() + " --out " + (dir / "o").string(), dir).code, 0);
  const auto csv = read_csv(dir / "o" / "thermalize.csv");
  for (const char* col : {"t", "mean", "std_err", "prediction", "delta2", "delta4"})
    EXPECT_NE(std::find(csv.header.begin(), csv.header.end(), col), csv.header.end()) << col;
  EXPECT_EQ(csv.numeric("t").size(), 6u);
}
