#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <sstream>

#include "rbacscan/cli.hpp"
#include "support.hpp"

using namespace rbacscan;
using namespace rbacscan::testing;

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rbacscan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rbacscan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidateFixture) {
  EXPECT_EQ(cli({"validate", fixture_path("lawfirm/factory.json")}).code, kExitClean);
  EXPECT_EQ(cli({"validate", fixture_path("lawfirm/factory.json"), "--policy", fixture_path("lawfirm/policy.json")}).code,
            kExitClean);
}

TEST_F(Cli, ValidateBrokenCondNamesTheNode) {
  Factory f = parse_factory(read_file(fixture_path("guard/factory.json")));
  std::string cond_id;
  for (auto& m : f.modules) {
    for (auto& a : m.actions) {
      for (const auto& n : a.cfg.nodes) {
        if (n.kind() == NodeKind::Cond && cond_id.empty()) {
          cond_id = n.id;
          for (auto& e : a.cfg.edges) {
            if (e.from == n.id && e.label == false) e.label = true;
          }
        }
      }
    }
  }
  ASSERT_FALSE(cond_id.empty());
  write_file(path("broken.json"), serialize_factory(f));
  const CliRun r = cli({"validate", path("broken.json")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("nodes." + cond_id), std::string::npos) << r.err;
}

TEST_F(Cli, MissingFile) {
  const CliRun r = cli({"validate", path("nowhere.json")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli({"analyze", "--factory", path("nowhere.json"), "--policy", fixture_path("lawfirm/policy.json"),
                 "--out", path("r.json")})
                .code,
            kExitError);
}

TEST_F(Cli, AnalyzeExitCodes) {
  const CliRun found = cli({"analyze", "--factory", fixture_path("lawfirm/factory.json"), "--policy",
                         fixture_path("lawfirm/policy.json"), "--out", path("r.json"), "--html", path("r.html")});
  EXPECT_EQ(found.code, kExitFindings);
  EXPECT_TRUE(std::regex_search(found.out, std::regex(R"(modules=1 screens=1 findings=2 elapsed_ms=\d+)"))) << found.out;
  EXPECT_GT(parse_report_json(read_file(path("r.json"))).summary.total_findings, 0u);
  EXPECT_NE(read_file(path("r.html")).find("Inspect Call Graph"), std::string::npos);

  const CliRun clean = cli({"analyze", "--factory", fixture_path("guard/factory.json"), "--policy",
                         fixture_path("guard/policy.json"), "--out", path("g.json")});
  EXPECT_EQ(clean.code, kExitClean);
  EXPECT_TRUE(fs::exists(path("g.json")));
}

TEST_F(Cli, AnalyzeRejectsBadConfig) {
  const std::vector<std::string> base = {"analyze", "--factory", fixture_path("lawfirm/factory.json"), "--policy",
                                         fixture_path("lawfirm/policy.json"), "--out", path("r.json")};
  for (const auto& extra : std::vector<std::vector<std::string>>{
           {"--max-atoms", "99"}, {"--max-paths", "0"}, {"--jobs", "0"}, {"--bogus"}}) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(cli(args).code, kExitError) << extra[0];
  }
  // Policy naming an entity the factory lacks.
  write_file(path("p.json"), R"({"format_version":1,"rules":[{"entity":"Ghost","read":["Admin"],"write":["Admin"]}]})");
  EXPECT_EQ(cli({"analyze", "--factory", fixture_path("lawfirm/factory.json"), "--policy", path("p.json"), "--out",
                 path("r.json")})
                .code,
            kExitError);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitError);
}

TEST_F(Cli, JobsDoNotChangeOutput) {
  auto g = generate_factory(*preset_params("oracle", 17));
  write_file(path("f.json"), serialize_factory(g.factory));
  write_file(path("p.json"), serialize_policy(g.policy));
  std::string first;
  for (const std::string jobs : {"1", "2", "5"}) {
    cli({"analyze", "--factory", path("f.json"), "--policy", path("p.json"), "--out", path("r" + jobs + ".json"),
         "--jobs", jobs});
    const std::string bytes = read_file(path("r" + jobs + ".json"));
    if (first.empty()) first = bytes;
    EXPECT_EQ(bytes, first) << jobs;
  }
}

TEST_F(Cli, TimestampIsOptIn) {
  const std::vector<std::string> base = {"analyze", "--factory", fixture_path("lawfirm/factory.json"), "--policy",
                                         fixture_path("lawfirm/policy.json"), "--out", path("r.json")};
  cli(base);
  EXPECT_EQ(read_file(path("r.json")).find("generated_at"), std::string::npos);
  auto stamped = base;
  stamped.push_back("--timestamp");
  cli(stamped);
  EXPECT_NE(read_file(path("r.json")).find("generated_at"), std::string::npos);
}

TEST_F(Cli, GenMockupWritesThreeFiles) {
  ASSERT_EQ(cli({"gen", "--preset", "mockup", "--out", path("m")}).code, kExitClean);
  for (const std::string name : {"factory.json", "policy.json", "planted.json"}) {
    EXPECT_EQ(read_file(path("m/" + name)), read_file(fixture_path("lawfirm/" + name))) << name;
  }
  EXPECT_EQ(cli({"gen", "--preset", "mockup", "--modules", "3", "--out", path("m2")}).code, kExitError);
}

TEST_F(Cli, GenWithoutEntities) {
  ASSERT_EQ(cli({"gen", "--plant-flaws", "0", "--entities", "0", "--out", path("e")}).code, kExitClean);
  EXPECT_TRUE(parse_planted(read_file(path("e/planted.json"))).empty());
  EXPECT_EQ(cli({"validate", path("e/factory.json"), "--policy", path("e/policy.json")}).code, kExitClean);
  EXPECT_EQ(cli({"gen", "--plant-flaws", "2", "--entities", "0", "--out", path("bad")}).code, kExitError);
}

TEST_F(Cli, GenSameSeedSameBytes) {
  ASSERT_EQ(cli({"gen", "--seed", "9", "--modules", "5", "--out", path("a")}).code, kExitClean);
  ASSERT_EQ(cli({"gen", "--seed", "9", "--modules", "5", "--out", path("b")}).code, kExitClean);
  for (const std::string name : {"factory.json", "policy.json", "planted.json"}) {
    EXPECT_EQ(read_file(path("a/" + name)), read_file(path("b/" + name))) << name;
  }
  ASSERT_EQ(cli({"gen", "--seed", "10", "--modules", "5", "--out", path("c")}).code, kExitClean);
  EXPECT_NE(read_file(path("a/factory.json")), read_file(path("c/factory.json")));
}

TEST_F(Cli, BinaryExitCodes) {
  const auto r = run_command(cli_path() + " analyze --factory " + fixture_path("lawfirm/factory.json") +
                             " --policy " + fixture_path("lawfirm/policy.json") + " --out " + path("bin.json"));
  EXPECT_EQ(r.status, kExitFindings) << r.output;
  EXPECT_EQ(run_command(cli_path() + " validate " + path("missing.json")).status, kExitError);
}
