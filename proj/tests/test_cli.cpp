#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "temp_dir.hpp"

namespace fs = std::filesystem;
using skseg::testing::TempDir;

namespace {

struct CliResult {
  int code;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
CliResult run(const std::string& args) {
  const std::string cmd = std::string("'") + SKSEG_CLI_PATH + "' " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  const CliResult help = run("--help");
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("segment"), std::string::npos);
  EXPECT_NE(help.out.find("check-kernel"), std::string::npos);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("segment --bogus").code, 2);
  const CliResult sub = run("segment --help");
  EXPECT_EQ(sub.code, 0);
  EXPECT_NE(sub.out.find("pipeline.adapt_window"), std::string::npos);
}

TEST(Cli, CheckKernel) {
  const CliResult r = run("check-kernel --k 6 --step 0.05");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("family: jackson"), std::string::npos);
  EXPECT_NE(r.out.find("k2_max_deviation: "), std::string::npos);
  EXPECT_NE(r.out.find("bounded_near_zero: true"), std::string::npos);
  EXPECT_EQ(run("check-kernel --family gauss").code, 1);
}

TEST(Cli, ReconstructAndConfig) {
  TempDir dir("cli");
  ASSERT_EQ(run("phantom --out " + q(dir / "ph") + " --count 1").code, 0);
  const CliResult r = run("reconstruct --in " + q(dir / "ph/P01/basal/s000.png") + " --out " + q(dir / "r.png") +
                    " --k 6 --scale 3");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("(288x288)"), std::string::npos) << r.out;

  std::ofstream(dir / "run.conf") << "[sk]\nscale = 1\n";
  const CliResult c = run("reconstruct --config " + q(dir / "run.conf") + " --in " +
                    q(dir / "ph/P01/basal/s000.png") + " --out " + q(dir / "r1.png"));
  EXPECT_NE(c.out.find("(96x96)"), std::string::npos) << c.out;
  // Dedicated flags and --set override the file.
  const CliResult s = run("reconstruct --config " + q(dir / "run.conf") + " --set sk.scale=2 --in " +
                    q(dir / "ph/P01/basal/s000.png") + " --out " + q(dir / "r2.png"));
  EXPECT_NE(s.out.find("(192x192)"), std::string::npos) << s.out;

  EXPECT_EQ(run("reconstruct --in " + q(dir / "missing.png") + " --out " + q(dir / "x.png")).code, 1);
  EXPECT_EQ(run("reconstruct --set nokey=1 --in a --out b").code, 1);
}

TEST(Cli, SegmentEvaluateCompare) {
  TempDir dir("cli");
  ASSERT_EQ(run("phantom --out " + q(dir / "ph") + " --count 4 --patients 2 --seed 5").code, 0);
  const CliResult seg = run("segment --in " + q(dir / "ph") + " --out " + q(dir / "seg"));
  EXPECT_EQ(seg.code, 0) << seg.out;
  EXPECT_TRUE(fs::exists(dir / "seg/P01/report.csv"));
  EXPECT_TRUE(fs::exists(dir / "seg/P02/s003/c_f.png"));
  const CliResult nosk = run("segment --no-sk --in " + q(dir / "ph") + " --out " + q(dir / "nosk"));
  EXPECT_EQ(nosk.code, 0) << nosk.out;

  const CliResult ev = run("evaluate --pred " + q(dir / "seg") + " --target " + q(dir / "ph/truth/lumen") +
                     " --target-scale 2 --out " + q(dir / "eval"));
  EXPECT_EQ(ev.code, 0) << ev.out;
  const std::string pp = slurp(dir / "eval/per_patient.csv");
  EXPECT_EQ(pp.rfind("patient,n,dci_mean", 0), 0u);
  EXPECT_NE(pp.find("\ntotal,4,"), std::string::npos) << pp;

  const CliResult cmp = run("compare " + q(dir / "seg") + " " + q(dir / "nosk") + " --name-a sk --name-b nosk --out " +
                      q(dir / "cmp"));
  EXPECT_EQ(cmp.code, 0) << cmp.out;
  EXPECT_NE(cmp.out.find("mean dci: sk "), std::string::npos);
  EXPECT_EQ(slurp(dir / "cmp/comparison.csv").rfind("stat,dci_sk,dci_nosk", 0), 0u);
  EXPECT_EQ(slurp(dir / "cmp/boxplot.csv").rfind("group,method,slice,value", 0), 0u);
}

TEST(Cli, PartialFailureExitCode) {
  TempDir dir("cli");
  ASSERT_EQ(run("phantom --out " + q(dir / "ph") + " --count 3").code, 0);
  std::ofstream(dir / "ph/P01/basal/s001.png", std::ios::trunc) << "broken";
  const CliResult seg = run("segment --in " + q(dir / "ph") + " --out " + q(dir / "seg") + " --parallelism 1");
  EXPECT_EQ(seg.code, 3) << seg.out;
  EXPECT_NE(seg.out.find("s001"), std::string::npos) << seg.out;
  EXPECT_TRUE(fs::exists(dir / "seg/P01/errors.csv"));
  EXPECT_EQ(run("segment --in " + q(dir / "nothing") + " --out " + q(dir / "seg")).code, 1);
}

TEST(Cli, Ablate) {
  TempDir dir("cli");
  ASSERT_EQ(run("phantom --out " + q(dir / "ph") + " --count 3").code, 0);
  const CliResult r = run("ablate --in " + q(dir / "ph") + " --out " + q(dir / "abl") + " --truth " +
                    q(dir / "ph/truth/lumen"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("soft expectation"), std::string::npos);
  const std::string cmp = slurp(dir / "abl/ablation/comparison.csv");
  for (const char* col : {"dci_sk", "dci_nosk", "ti_sk", "ti_nosk", "em_sk", "em_nosk", "bpn_sk", "bpn_nosk"}) {
    EXPECT_NE(cmp.find(col), std::string::npos) << col;
  }
}
