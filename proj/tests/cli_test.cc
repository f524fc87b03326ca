#include "cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "dynkin/io.h"

namespace dynkin {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dynkin_cli_" + std::string(::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string Write(const std::string& name, const std::string& text) const {
    io::WriteFileAtomic(Path(name), text);
    return Path(name);
  }

  int Call(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::Run(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, HelpAndUsage) {
  EXPECT_EQ(Call({"--help"}), cli::kOk);
  EXPECT_NE(out_.str().find("solve"), std::string::npos);
  EXPECT_EQ(Call({}), cli::kParse);
  EXPECT_EQ(Call({"frobnicate"}), cli::kParse);
  EXPECT_EQ(Call({"gen", "--mode", "sideways"}), cli::kParse);
}

TEST_F(CliTest, SolveDemoSucceeds) {
  ASSERT_EQ(Call({"demo", "--players", "3", "--depth", "2", "--out", Path("g.json")}),
            cli::kOk);
  ASSERT_EQ(Call({"solve", Path("g.json"), "--report", Path("r.json"), "--trace",
                  Path("t.csv")}),
            cli::kOk);
  EXPECT_NE(out_.str().find("certified"), std::string::npos);
  EXPECT_TRUE(fs::exists(Path("r.json")));
  EXPECT_TRUE(fs::exists(Path("t.csv")));

  // The report doubles as a profile for re-verification.
  EXPECT_EQ(Call({"verify", Path("g.json"), "--profile", Path("r.json")}), cli::kOk);
  EXPECT_NE(out_.str().find("\"is_nash\": true"), std::string::npos);
}

TEST_F(CliTest, SolveWritesReportToStdout) {
  Call({"gen", "--players", "2", "--depth", "3", "--seed", "4", "--mode", "touching",
        "--out", Path("g.json")});
  ASSERT_EQ(Call({"solve", Path("g.json")}), cli::kOk);
  EXPECT_NE(out_.str().find("dynkin-run-report/1"), std::string::npos);
}

TEST_F(CliTest, ParseErrorExitsOne) {
  const std::string bad = Write("bad.json", "{\n  \"horizon\": 1,\n  oops\n}\n");
  EXPECT_EQ(Call({"solve", bad}), cli::kParse);
  EXPECT_NE(err_.str().find("line 3"), std::string::npos);
  EXPECT_EQ(Call({"solve", Path("missing.json")}), cli::kParse);
}

TEST_F(CliTest, StructuralErrorNamesNode) {
  std::string text = io::SerializeGame(io::DemoConstant(2, 1, 2));
  text.replace(text.rfind("\"p\": 0.5"), 8, "\"p\": 0.7");
  EXPECT_EQ(Call({"validate", Write("g.json", text)}), cli::kParse);
  EXPECT_NE(err_.str().find("node 0"), std::string::npos);
}

TEST_F(CliTest, AssumptionViolationExitsTwo) {
  const ScenarioTree tree = ScenarioTree::Uniform(1, 2);
  const AdaptedProcess x({1, 0, 0}), q({0.5, 0, 0}), y({2, 0, 0});
  io::SaveGame(GameSpec(tree, {x, x}, {q, q}, {y, y}), Path("g.json"));
  EXPECT_EQ(Call({"validate", Path("g.json")}), cli::kValidation);
  EXPECT_NE(out_.str().find("\"node\": 0"), std::string::npos);
  EXPECT_EQ(Call({"solve", Path("g.json")}), cli::kValidation);
}

TEST_F(CliTest, NonConvergenceExitsThree) {
  const ScenarioTree tree = ScenarioTree::Uniform(1, 2);
  const AdaptedProcess x({1, 0, 0}), q({1.5, 0, 0}), y({2, 0, 0});
  io::SaveGame(GameSpec(tree, {x, x}, {q, q}, {y, y}), Path("g.json"));
  EXPECT_EQ(Call({"solve", Path("g.json"), "--max-rounds", "1"}),
            cli::kNonConvergence);
  EXPECT_NE(err_.str().find("did not converge"), std::string::npos);
  EXPECT_EQ(Call({"solve", Path("g.json")}), cli::kOk);
}

TEST_F(CliTest, NonEquilibriumProfileExitsFour) {
  Call({"demo", "--players", "2", "--depth", "2", "--out", Path("g.json")});
  const std::string profile =
      Write("p.json", R"({"format": "dynkin-profile/1", "stop_sets": [[0], []]})");
  EXPECT_EQ(Call({"verify", Path("g.json"), "--profile", profile}),
            cli::kCertification);
  EXPECT_NE(err_.str().find("player 1"), std::string::npos);
  EXPECT_EQ(err_.str().find("player 2"), std::string::npos);
}

TEST_F(CliTest, OracleCapExitsFive) {
  Call({"demo", "--players", "2", "--depth", "5", "--out", Path("g.json")});
  const std::string profile =
      Write("p.json", R"({"stop_sets": [[], []]})");
  EXPECT_EQ(Call({"oracle", Path("g.json"), "--player", "1", "--profile", profile}),
            cli::kCap);
  EXPECT_NE(err_.str().find("458330"), std::string::npos);

  Call({"demo", "--players", "2", "--depth", "2", "--out", Path("small.json")});
  EXPECT_EQ(Call({"oracle", Path("small.json"), "--player", "2", "--profile",
                  profile}),
            cli::kOk);
  EXPECT_NE(out_.str().find("\"stopping_times\": 5"), std::string::npos);
  EXPECT_EQ(Call({"oracle", Path("small.json"), "--player", "3", "--profile",
                  profile}),
            cli::kParse);
}

TEST_F(CliTest, GenIsDeterministic) {
  ASSERT_EQ(Call({"gen", "--players", "3", "--depth", "3", "--seed", "11"}), cli::kOk);
  const std::string first = out_.str();
  Call({"gen", "--players", "3", "--depth", "3", "--seed", "11"});
  EXPECT_EQ(out_.str(), first);
  EXPECT_EQ(io::SerializeGame(io::ParseGame(first)), first);
}

}  // namespace
}  // namespace dynkin
