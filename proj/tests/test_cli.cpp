#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "matspec/io.hpp"
#include "matspec/matspec.hpp"

using namespace matspec;
using io::json;

namespace fs = std::filesystem;

namespace {

const std::string kCli = MATSPEC_CLI_PATH;
const fs::path kData = MATSPEC_DATA_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("matspec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of the CLI; stderr goes to err.json.
  int run(const std::string& args) const {
    const std::string cmd = kCli + " " + args + " > " + path("stdout.txt") + " 2> " + path("err.json");
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ForwardOnZeroProblem) {
  ASSERT_EQ(run("forward --problem " + (kData / "zero_m2.json").string() + " -N 6 -o " + path("s.json")), 0);
  SpectralData d = io::spectral_from_json(io::read_json(path("s.json")));
  ASSERT_EQ(d.N(), 6);
  for (int n = 1; n <= 6; ++n)
    for (int k = 1; k <= 2; ++k) EXPECT_NEAR(d.lambda({n, k}), double((n - 1) * (n - 1)), 1e-8);
  json m = io::read_json(path("s.json.manifest.json"));
  EXPECT_EQ(m["config"]["command"], "forward");
  EXPECT_TRUE(m.contains("config_hash"));
  EXPECT_EQ(io::read_json(path("s.json"))["config_hash"], m["config_hash"]);
}

TEST_F(Cli, RoundTripReportsErrors) {
  ASSERT_EQ(run("roundtrip --problem " + (kData / "cos_m1.json").string() + " -N 5 -o " + path("r.json")), 0);
  json r = io::read_json(path("r.json"));
  for (const char* k : {"q_error_L2", "h_error", "H_error", "total_error"}) {
    ASSERT_TRUE(r.contains(k)) << k;
    EXPECT_GE(r[k].get<double>(), 0.0);
  }
  EXPECT_LT(r["q_error_L2"].get<double>(), 1.0);
}

TEST_F(Cli, MalformedInputExitsOneWithoutArtifacts) {
  std::ofstream(path("bad.json")) << "{\"m\": 2, \"M\": ";
  EXPECT_EQ(run("forward --problem " + path("bad.json") + " -o " + path("s.json")), 1);
  EXPECT_FALSE(fs::exists(path("s.json")));
  EXPECT_FALSE(fs::exists(path("s.json.manifest.json")));
  json e = json::parse(slurp(path("err.json")));
  EXPECT_EQ(e["error"], "ParseError");
  EXPECT_EQ(e["exit_code"], 1);
  EXPECT_EQ(run("forward --no-such-flag"), 1);
}

TEST_F(Cli, ValidationFailureExitsTwo) {
  Coefficients c = Coefficients::zero(2, 20);
  c.Q[4](0, 1) = 0.5;
  io::write_text(path("p.json"), io::dump(io::to_json(c)));
  EXPECT_EQ(run("forward --problem " + path("p.json") + " -o " + path("s.json")), 2);
  EXPECT_EQ(json::parse(slurp(path("err.json")))["error"], "ValidationError");
  EXPECT_FALSE(fs::exists(path("s.json")));
}

TEST_F(Cli, NumericalFailureExitsThree) {
  ASSERT_EQ(run("forward --problem " + (kData / "cos_m1.json").string() + " -N 6 -o " + path("s.json")), 0);
  EXPECT_EQ(run("inverse --spectra " + path("s.json") + " -N 6 -M 20 --cond-limit 1.000000001 -o " + path("q.json")), 3);
  EXPECT_EQ(json::parse(slurp(path("err.json")))["error"], "IllConditioned");
}

TEST_F(Cli, ArtifactsIndependentOfThreadCount) {
  const std::string p = (kData / "trig_m2.json").string();
  ASSERT_EQ(run("--threads 1 forward --problem " + p + " -N 6 -o " + path("a.json")), 0);
  ASSERT_EQ(run("--threads 3 forward --problem " + p + " -N 6 -o " + path("b.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  ASSERT_EQ(run("--threads 1 inverse --spectra " + path("a.json") + " -N 6 -M 100 -o " + path("qa.json")), 0);
  ASSERT_EQ(run("--threads 4 inverse --spectra " + path("a.json") + " -N 6 -M 100 -o " + path("qb.json")), 0);
  EXPECT_EQ(slurp(path("qa.json")), slurp(path("qb.json")));
}
