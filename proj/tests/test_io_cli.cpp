#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blowup/blowup.hpp"
#include "blowup/io.hpp"

using namespace blowup;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const auto log = fs::temp_directory_path() / "blowup_lab_test_output.txt";
  const std::string cmd = std::string(BLOWUP_LAB_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("blowup_lab_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(FieldJson, RoundTrip) {
  TorusGrid g({6, 5}, {64, 32});
  const auto w = build_bump(g, BumpSpec{0.25, 1.5});
  const auto j = field_to_json(w.spectrum);
  const auto back = field_from_json(json::parse(j.dump()));
  EXPECT_TRUE(back.grid() == g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back[i], w.spectrum[i]);
  EXPECT_EQ(back.support().radius, 0.25);
  EXPECT_TRUE(back.nonnegative());
}

TEST(Csv, FormatAndHeader) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  const auto d = fresh_dir("csv");
  {
    CsvWriter w((d / "x.csv").string(), json{{"a", 1}}, {"k", "v"});
    w.row({3L, 0.5});
    EXPECT_THROW(w.row({1L}), PreconditionError);
  }
  const auto text = slurp(d / "x.csv");
  EXPECT_EQ(text, "# config {\"a\":1}\n# version 0.1.0\nk,v\n3,0.5\n");
}

TEST(Cli, CertificateWithMultipleOfThreshold) {
  const auto d = fresh_dir("cert");
  const auto r = run_cli("certificate --b 4 --delta 1 --A 2x --out " + d.string());
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(slurp(d / "verdict.json"));
  EXPECT_EQ(j["verdict"], "DIVERGES");
  EXPECT_TRUE(j["k_star"].is_number());
  const auto csv = slurp(d / "certificate.csv");
  EXPECT_NE(csv.find("k,t_k,log_alpha_k,Lambda_k\n"), std::string::npos);
  EXPECT_NE(csv.find("\"command\":\"certificate\""), std::string::npos);
}

TEST(Cli, FujitaRejection) {
  const auto d = fresh_dir("fujita");
  const auto r = run_cli("data --b 1 --out " + d.string());
  EXPECT_EQ(r.code, 2);
  const auto r3 = run_cli("data --b 3 --n 1 --out " + d.string());
  EXPECT_EQ(r3.code, 2);
  EXPECT_NE(r3.out.find("n(b-1)/2 > 1"), std::string::npos) << r3.out;
}

TEST(Cli, BesovCsvMatchesLibrary) {
  const auto d = fresh_dir("besov");
  const auto r = run_cli("besov --q 8 --N 3 --b 4 --n 1 --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(d / "besov.csv");
  std::string line, header, last;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) header = line;
    else last = line;
  }
  EXPECT_EQ(header, "j,block_norm,weighted,total");
  const double total = std::stod(last.substr(last.rfind(',') + 1));
  const auto g = data_grid(1, 4, 3);
  const auto w = build_bump(g, BumpSpec::for_exponent(4));
  const auto u = build_u0N(g, 3, Schedule::loglog(4), w.spectrum);
  const double lib = besov_norm(u.spectrum, -0.5, 6.0, 8.0, FilterBank(g, -1, 3));
  EXPECT_NEAR(total, lib, 1e-14 * lib);
}

TEST(Cli, OutputsAreByteIdentical) {
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const std::string args = "simulate --A 0.5x --t-end 0.05 --M 512 --record-every 5";
  ASSERT_EQ(run_cli(args + " --out " + a.string()).code, 0);
  ASSERT_EQ(run_cli(args + " --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  EXPECT_EQ(slurp(a / "blowup.json"), slurp(b / "blowup.json"));
  const auto sa = fresh_dir("sweep_a"), sb = fresh_dir("sweep_b");
  const std::string sw = "sweep --kind amplitude --A 1,2,4 --M 512 --t-end 0.6";
  ASSERT_EQ(run_cli(sw + " --threads 3 --out " + sa.string()).code, 0);
  ASSERT_EQ(run_cli(sw + " --threads 1 --out " + sb.string()).code, 0);
  auto strip = [](std::string s) { return s.substr(s.find('\n', s.find("# version"))); };
  EXPECT_EQ(strip(slurp(sa / "sweep.csv")), strip(slurp(sb / "sweep.csv")));
}

TEST(Cli, ConfigFileAndUnknownKeys) {
  const auto d = fresh_dir("config");
  {
    std::ofstream(d / "good.json") << R"({"command": "certificate", "b": 3, "n": 2, "delta": 0.5, "A": "0.9x"})";
    std::ofstream(d / "bad.json") << R"({"b": 4, "bogus": 1})";
  }
  auto r = run_cli("certificate --config " + (d / "good.json").string() + " --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = json::parse(slurp(d / "verdict.json"));
  EXPECT_EQ(j["verdict"], "CONVERGES_TO_ZERO");
  EXPECT_EQ(j["config"]["b"], 3);
  // command line wins over the file
  r = run_cli("certificate --config " + (d / "good.json").string() + " --A 3x --out " + d.string());
  j = json::parse(slurp(d / "verdict.json"));
  EXPECT_EQ(j["verdict"], "DIVERGES");
  r = run_cli("certificate --config " + (d / "bad.json").string() + " --out " + d.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bogus"), std::string::npos);
}

TEST(Cli, ThresholdExitCodes) {
  const auto d = fresh_dir("threshold");
  auto r = run_cli("threshold --b 4 --delta 1 --out " + d.string());
  EXPECT_EQ(r.code, 4) << r.out;
  auto j = json::parse(slurp(d / "threshold.json"));
  EXPECT_EQ(j["verdict"], "NOT_FOUND");
  EXPECT_TRUE(j["log10_N_estimate"].is_number());
  r = run_cli("threshold --b 4 --delta 1 --schedule constant --w-l1 5 --out " + d.string());
  EXPECT_EQ(r.code, 0) << r.out;
  j = json::parse(slurp(d / "threshold.json"));
  EXPECT_EQ(j["verdict"], "FOUND");
}

TEST(Cli, SeriesSweepTrends) {
  const auto d = fresh_dir("series");
  const auto r = run_cli("sweep --kind besov-series --b 4 --N 10,100,1000,10000 --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(d / "sweep.csv");
  std::string line;
  std::map<std::string, std::vector<double>> by_q;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
    ASSERT_EQ(f.size(), 7u);
    EXPECT_EQ(f[6], "ok");
    by_q[f[2]].push_back(std::stod(f[5]));
  }
  ASSERT_EQ(by_q.size(), 2u);
  for (double v : by_q["8"]) EXPECT_LT(v, 20.0);
}

TEST(Cli, VerifyReportsPartialWhenSolutionDies) {
  const auto d = fresh_dir("verify");
  const auto r = run_cli("verify --A 2x --M 512 --r 7 --out " + d.string());
  EXPECT_EQ(r.code, 1) << r.out;
  const auto j = json::parse(slurp(d / "verify.json"));
  EXPECT_EQ(j["overall"], "PARTIAL");
}
