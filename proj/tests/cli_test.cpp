#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "cli_runner.hpp"
#include "vnge/vnge.hpp"

namespace {

using namespace vnge;
using fixtures::run_cli;
using fixtures::TempDir;

// method -> value column of an entropy report.
std::map<std::string, double> values_of(const std::string& csv) {
  std::map<std::string, double> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("method,", 0) == 0) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    out[line.substr(0, c1)] = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
  }
  return out;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

TEST(Cli, UsageErrors) {
  TempDir d("cli_usage");
  EXPECT_EQ(run_cli("", d).exit_code, 1);
  EXPECT_EQ(run_cli("frobnicate", d).exit_code, 1);
  EXPECT_EQ(run_cli("gen --model xx", d).exit_code, 1);
  EXPECT_EQ(run_cli("entropy", d).exit_code, 1);
  EXPECT_EQ(run_cli("--help", d).exit_code, 0);
}

TEST(Cli, EntropyOfPath) {
  TempDir d("cli_p3");
  const auto file = d.file("p3.txt", "0 1\n1 2\n");
  const auto r = run_cli("entropy " + file + " --exact", d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# vnentropy-csv v1\n", 0), 0u);
  const auto v = values_of(r.out);
  EXPECT_NEAR(v.at("exact"), 0.562335, 1e-6);
  EXPECT_NEAR(v.at("finger"), -std::log(0.75) * 0.375, 1e-12);
  EXPECT_NEAR(v.at("taylor"), -1.5 * 0.625 + std::log(3.0) - 0.5, 1e-12);
  EXPECT_NEAR(v.at("radial"), radial_projection(3, 0.625).value, 1e-12);
  EXPECT_EQ(v.count("mixed_quadratic"), 1u);
  EXPECT_NE(r.out.find(",3,2,0.625,"), std::string::npos);
}

TEST(Cli, EntropyOfSingleEdge) {
  TempDir d("cli_edge");
  const auto file = d.file("edge.txt", "% one edge\n1 2 4.5\n");
  const auto r = run_cli("entropy " + file + " --one-indexed --exact --methods finger,radial", d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto v = values_of(r.out);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_NEAR(v.at("exact"), 0.0, 1e-12);
  EXPECT_EQ(v.at("finger"), 0.0);
  EXPECT_NEAR(v.at("radial"), 0.0, 1e-12);
}

TEST(Cli, EntropyDataErrors) {
  TempDir d("cli_bad");
  EXPECT_EQ(run_cli("entropy " + (d / "missing.txt").string(), d).exit_code, 2);
  EXPECT_EQ(run_cli("entropy " + d.file("loop.txt", "0 0\n"), d).exit_code, 2);
  EXPECT_EQ(run_cli("entropy " + d.file("junk.txt", "0 1\n1 q\n"), d).exit_code, 2);
  EXPECT_EQ(run_cli("entropy " + d.file("e.txt", "# vertices 4\n"), d).exit_code, 2);
}

TEST(Cli, ExactTooLargeStillPrintsApproximations) {
  TempDir d("cli_big");
  const auto file = (d / "er.txt").string();
  ASSERT_EQ(run_cli("--seed 3 gen --model er -n 100000 --degree 10 -o " + file, d).exit_code, 0);
  const auto r = run_cli("entropy " + file + " --exact --methods radial,taylor", d);
  EXPECT_EQ(r.exit_code, 2);
  const auto v = values_of(r.out);
  EXPECT_EQ(v.count("radial"), 1u);
  EXPECT_EQ(v.count("taylor"), 1u);
  EXPECT_EQ(v.count("exact"), 0u);
  EXPECT_NE(r.err.find("dense"), std::string::npos);
}

TEST(Cli, GenRoundTrip) {
  TempDir d("cli_gen");
  const auto file = (d / "ws.txt").string();
  ASSERT_EQ(run_cli("--seed 9 gen --model ws -n 60 --k 4 --p-rewire 0.2 --weighted -o " + file, d).exit_code, 0);
  auto spec = ModelSpec::watts_strogatz(60, 4, 0.2, 9);
  spec.perturb_weights = true;
  EXPECT_EQ(load_edge_list(file), generate(spec));
  const auto r = run_cli("entropy " + file + " --exact --methods exact", d);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NEAR(values_of(r.out).at("exact"), exact_vnge(generate(spec)), 1e-12);
}

TEST(Cli, JsDistance) {
  TempDir d("cli_js");
  const auto p3 = d.file("p3.txt", "0 1\n1 2\n");
  const auto k3 = d.file("k3.txt", "0 1\n1 2\n0 2\n");
  const auto p4 = d.file("p4.txt", "0 1\n1 2\n2 3\n");
  auto same = run_cli("jsdist " + p3 + " " + p3, d);
  ASSERT_EQ(same.exit_code, 0);
  EXPECT_NE(same.out.find("exact,0,"), std::string::npos) << same.out;
  auto r = run_cli("jsdist " + p3 + " " + k3 + " --method exact", d);
  ASSERT_EQ(r.exit_code, 0);
  const double expected = js_distance(load_edge_list(p3), load_edge_list(k3), EntropyBackend::of(Method::Exact)).distance;
  EXPECT_NE(r.out.find("exact," + harness::fmt(expected) + ","), std::string::npos) << r.out;
  EXPECT_EQ(run_cli("jsdist " + p3 + " " + p4, d).exit_code, 2);
  EXPECT_EQ(run_cli("jsdist " + p3 + " " + k3 + " --method mixed-quadratic", d).exit_code, 0);
  EXPECT_EQ(run_cli("jsdist " + p3 + " " + k3 + " --method nonsense", d).exit_code, 1);
}

TEST(Cli, Presets) {
  TempDir d("cli_preset");
  auto r = run_cli("calibrate --preset improved-modified-taylor", d);
  ASSERT_EQ(r.exit_code, 0);
  auto kv = key_values(r.out);
  EXPECT_EQ(kv["t"], "0.38240000000000002");
  EXPECT_EQ(kv.count("iterations"), 0u);
  r = run_cli("calibrate --preset mixed-quadratic --weights-out " + (d / "mq.txt").string(), d);
  ASSERT_EQ(r.exit_code, 0);
  kv = key_values(r.out);
  EXPECT_EQ(std::stod(kv["w_finger"]), 0.2299);
  EXPECT_EQ(std::stod(kv["w_taylor"]), 0.0);
  EXPECT_EQ(std::stod(kv["w_modified_taylor"]), 0.3099);
  EXPECT_EQ(std::stod(kv["w_radial"]), 0.4602);
  EXPECT_EQ(std::stod(kv["beta"]), -0.0073);
  // The written weights file feeds the entropy command.
  const auto k3 = d.file("k3.txt", "0 1\n1 2\n0 2\n");
  r = run_cli("entropy " + k3 + " --methods radial --weights " + (d / "mq.txt").string(), d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto v = values_of(r.out);
  EXPECT_NEAR(v.at("mixed_quadratic"), 0.2299 * std::log(2.0) * 0.5 + 0.3099 * 0.8822169 + 0.4602 * 0.8675632 - 0.0073, 1e-6);
}

TEST(Cli, CalibrateRecoversPlantedMixture) {
  TempDir d("cli_cal");
  std::ostringstream csv;
  csv << "n,purity,lambda_max,H_exact,finger,taylor,modified_taylor,radial\n";
  CounterRng rng(17);
  for (int i = 0; i < 120; ++i) {
    double x[4];
    for (double& v : x) v = 5.0 * rng.uniform();
    const double y = 0.25 * (x[0] + x[1] + x[2] + x[3]) + 0.1;
    csv << "100,0.02,0.05," << harness::fmt(y);
    for (double v : x) csv << ',' << harness::fmt(v);
    csv << '\n';
  }
  const auto file = d.file("samples.csv", csv.str());
  auto r = run_cli("calibrate --samples " + file + " --affine4", d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto kv = key_values(r.out);
  for (const char* k : {"w_finger", "w_taylor", "w_modified_taylor", "w_radial"}) EXPECT_NEAR(std::stod(kv[k]), 0.25, 1e-3) << k;
  EXPECT_NEAR(std::stod(kv["beta"]), 0.1, 1e-3);
  r = run_cli("calibrate --samples " + file + " --pair finger,radial --fast", d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  kv = key_values(r.out);
  EXPECT_EQ(kv["kind"], "two_term");
  EXPECT_EQ(kv["converged"], "true");
  EXPECT_EQ(run_cli("calibrate --samples " + d.file("bad.csv", "a,b\n"), d).exit_code, 2);
}

TEST(Cli, CalibrateFromModelWritesSamples) {
  TempDir d("cli_cal2");
  const auto samples = (d / "s.csv").string();
  auto r = run_cli("--seed 5 calibrate --model ba -n 60 --degree 4 --count 12 --write-samples " + samples, d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::ifstream in(samples);
  EXPECT_EQ(read_samples_csv(in).size(), 12u);
}

TEST(Cli, SeededCommandsAreByteIdenticalAcrossThreads) {
  TempDir d("cli_det");
  const std::vector<std::string> commands = {
      "error-sweep --model ba -n 120 --range 4:8:4 --trials 4",
      "error-sweep --model er --vary nodes --points 60,90 --trials 3 --records",
      "correlation --model ws -n 100 --count 8",
      "calibrate --model er -n 80 --count 10 --fast",
      "gen --model ba -n 500 --m 3",
  };
  for (const auto& c : commands) {
    const auto a = run_cli("--seed 11 --threads 1 " + c, d);
    const auto b = run_cli("--seed 11 --threads 1 " + c, d);
    const auto e = run_cli("--seed 11 --threads 8 " + c, d);
    ASSERT_EQ(a.exit_code, 0) << c << "\n" << a.err;
    EXPECT_FALSE(a.out.empty());
    EXPECT_EQ(a.out, b.out) << c;
    EXPECT_EQ(a.out, e.out) << c;
  }
}

TEST(Cli, SweepRecordsCarryAbsoluteError) {
  TempDir d("cli_rec");
  const auto r = run_cli("error-sweep --model er -n 80 --points 6 --trials 3 --records", d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, harness::kRecordHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    ASSERT_GE(f.size(), 7u);
    EXPECT_NEAR(std::stod(f[6]), std::abs(std::stod(f[4]) - std::stod(f[5])), 1e-15);
    ++rows;
  }
  EXPECT_EQ(rows, 3 * 7);
}

}  // namespace
