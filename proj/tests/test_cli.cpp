#include "cli.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace robot;
using namespace robot::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "robot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("robot_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& body) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << body;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kSqrt3 = "1.7320508075688772";

}  // namespace

TEST_F(CliTest, SolveTwoByTwo) {
  const auto src = write("a.csv", "w,x1\n0.7,0\n0.3," + kSqrt3 + "\n");
  const auto tgt = write("b.csv", "x1\n0\n" + kSqrt3 + "\n");
  const auto r = run_cli({"solve", "--source", src, "--target", tgt, "--lambda", "0.5", "--plan-out", path("plan.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_NEAR(j["objective"].get<double>(), 0.2, 1e-7);
  EXPECT_NEAR(j["slack_l1"].get<double>(), 0.4, 1e-7);
  EXPECT_EQ(j["lambda"], 0.5);
  std::ifstream plan(path("plan.csv"));
  std::string row0, row1;
  std::getline(plan, row0);
  std::getline(plan, row1);
  EXPECT_EQ(row1, "0,0.29999999999999999");

  const auto inf = run_cli({"solve", "--source", src, "--target", tgt, "--lambda", "inf"});
  ASSERT_EQ(inf.code, 0);
  EXPECT_NEAR(inf.json()["objective"].get<double>(), 0.6, 1e-7);
  EXPECT_EQ(inf.json()["lambda"], "inf");

  const auto ent = run_cli({"solve", "--source", src, "--target", tgt, "--lambda", "0.5", "--method", "sinkhorn", "--alpha", "0.001"});
  ASSERT_EQ(ent.code, 0) << ent.err;
  EXPECT_NEAR(ent.json()["objective"].get<double>(), 0.2, 1e-2);
}

TEST_F(CliTest, SolveIdenticalIsZero) {
  const auto a = write("a.csv", "x1,x2\n0,0\n1,0\n0,1\n");
  const auto r = run_cli({"solve", "--source", a, "--target", a, "--lambda", "0.3", "--cost", "euclidean"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(r.json()["objective"].get<double>(), 0.0, 1e-12);
}

TEST_F(CliTest, ExitCodes) {
  const auto a = write("a.csv", "x1\n0\n1\n");
  const auto bad = write("bad.csv", "x1\nfoo\n");
  const auto wide = write("wide.csv", "x1,x2\n0,0\n");
  EXPECT_EQ(run_cli({"solve", "--source", bad, "--target", a, "--lambda", "1"}).code, 1);
  EXPECT_EQ(run_cli({"solve", "--source", path("missing.csv"), "--target", a, "--lambda", "1"}).code, 1);
  EXPECT_EQ(run_cli({"solve", "--source", wide, "--target", a, "--lambda", "1"}).code, 1);
  EXPECT_EQ(run_cli({"solve", "--source", a, "--target", a, "--lambda", "-1"}).code, 2);
  EXPECT_EQ(run_cli({"solve", "--source", a, "--target", a, "--lambda", "x"}).code, 2);
  EXPECT_EQ(run_cli({"solve", "--source", a, "--target", a, "--lambda", "1", "--method", "magic"}).code, 2);
  EXPECT_EQ(run_cli({"solve", "--source", a}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  const auto b = write("b.csv", "x1\n0.2\n3\n7\n");
  const auto r = run_cli({"solve", "--source", a, "--target", b, "--lambda", "1", "--method", "sinkhorn", "--alpha", "0.001", "--max-iter", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "solver_failure");
}

TEST_F(CliTest, DetectFarPoint) {
  const auto c = write("c.csv", "x1\n0\n0.1\n100\n");
  const auto k = write("k.csv", "x1\n0\n0.1\n0.2\n");
  const auto r = run_cli({"detect", "--contaminated", c, "--clean", k, "--lambda", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["outlier_indices"], nlohmann::json::array({2}));
  EXPECT_EQ(r.json()["lambda_source"], "flag");
  const auto s = run_cli({"detect", "--contaminated", c, "--clean", k, "--lambda", "1", "--method", "sinkhorn", "--alpha", "0.01"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.json()["outlier_indices"], nlohmann::json::array({2}));
}

TEST_F(CliTest, GenThenDetectAuto) {
  const auto g = run_cli({"gen", "--model", "clusters", "--n-clean", "60", "--n-out", "15", "--d", "2", "--seed", "3", "--out", path("c.csv"),
                          "--reference-out", path("r.csv"), "--mask-out", path("m.csv")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(g.json()["n"], 75);
  EXPECT_EQ(g.json()["n_outliers"], 15);
  const auto r = run_cli({"detect", "--contaminated", path("c.csv"), "--clean", path("r.csv"), "--lambda", "auto"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["lambda_source"], "auto");
  // A 30-point split gives a tight lambda, so a few clean points may join.
  std::ifstream mask(path("m.csv"));
  std::string line;
  std::getline(mask, line);
  std::vector<int> truth;
  for (int i = 0; std::getline(mask, line); ++i)
    if (line == "1") truth.push_back(i);
  ASSERT_EQ(truth.size(), 15u);
  const auto flagged = r.json()["outlier_indices"].get<std::vector<int>>();
  EXPECT_TRUE(std::includes(flagged.begin(), flagged.end(), truth.begin(), truth.end()));
  EXPECT_LE(flagged.size(), 20u);

  const auto s = run_cli({"solve", "--source", path("c.csv"), "--target", path("r.csv"), "--lambda", "1"});
  EXPECT_EQ(s.code, 0);
  const auto stdout_gen = run_cli({"gen", "--model", "gaussian-huber", "--n", "4", "--d", "2"});
  ASSERT_EQ(stdout_gen.code, 0);
  EXPECT_EQ(stdout_gen.out.substr(0, 6), "x1,x2\n");
}

TEST_F(CliTest, JsonIsDeterministic) {
  auto strip = [](nlohmann::json j) {
    j.erase("seconds");
    return j.dump();
  };
  const auto d = run_cli({"gen", "--model", "gaussian-huber", "--n", "40", "--d", "2", "--seed", "5", "--out", path("d.csv")});
  ASSERT_EQ(d.code, 0);
  const std::vector<std::vector<std::string>> commands = {
      {"estimate-mean", "--data", path("d.csv"), "--outer", "50"},
      {"bench", "equivalence", "--trials", "10", "--max-size", "4"},
      {"detect", "--contaminated", path("d.csv"), "--clean", path("d.csv"), "--lambda", "auto", "--subsample", "10"},
  };
  for (const auto& cmd : commands) {
    const auto a = run_cli(cmd), b = run_cli(cmd);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(strip(a.json()), strip(b.json())) << cmd[0];
  }
}

TEST_F(CliTest, EstimateMeanAndScan) {
  run_cli({"gen", "--model", "gaussian-huber", "--n", "200", "--d", "2", "--seed", "1", "--out", path("d.csv")});
  const auto r = run_cli({"estimate-mean", "--data", path("d.csv"), "--outer", "100", "--true-mean", "0,0", "--trace-out", path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["theta"].size(), 2u);
  EXPECT_TRUE(r.json()["error_vs"].is_number());
  EXPECT_TRUE(fs::exists(path("t.csv")));
  EXPECT_EQ(run_cli({"estimate-mean", "--data", path("d.csv"), "--true-mean", "0"}).code, 2);

  run_cli({"gen", "--model", "clusters", "--n-clean", "30", "--n-out", "5", "--d", "2", "--out", path("c.csv"), "--reference-out", path("r.csv")});
  const auto s = run_cli({"scan-lambda", "--contaminated", path("c.csv"), "--clean", path("r.csv"), "--grid", "0.5,2,50"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.json()["violations"], 0);
  EXPECT_EQ(run_cli({"scan-lambda", "--contaminated", path("c.csv"), "--clean", path("r.csv"), "--grid", "2,1"}).code, 2);
}
