#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "unimodal/cli.hpp"
#include "unimodal/tables.hpp"

using namespace unimodal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("unimodal_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kBimodal = [] {
  std::string s = "x\n";
  for (int i = 0; i < 40; ++i) s += std::to_string(i * 0.01) + "\n";
  for (int i = 0; i < 40; ++i) s += std::to_string(5 + i * 0.01) + "\n";
  return s;
}();

bool single_error_line(const std::string& err, const std::string& kind) {
  return err.rfind("error[" + kind + "]: ", 0) == 0 && err.find('\n') == err.size() - 1;
}

}  // namespace

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(cli::exit_code(ErrorKind::validation), 2);
  EXPECT_EQ(cli::exit_code(ErrorKind::dimensionality), 2);
  EXPECT_EQ(cli::exit_code(ErrorKind::missing_data), 3);
  EXPECT_EQ(cli::exit_code(ErrorKind::corrupt_table), 4);
  EXPECT_EQ(cli::exit_code(ErrorKind::calibration_curve), 4);
  EXPECT_EQ(cli::exit_code(ErrorKind::unsupported_size), 4);
  EXPECT_EQ(cli::exit_code(ErrorKind::degenerate_spread), 5);
}

TEST_F(CliTest, DipMissingValues) {
  const auto f = write("m.csv", "x\n0.1\n0.5\n\n0.9\n0.2\n0.3\n");
  const auto fail = run({"dip", f});
  EXPECT_EQ(fail.code, 3);
  EXPECT_TRUE(single_error_line(fail.err, "missing_data")) << fail.err;

  const auto ok = run({"dip", f, "--complete-case", "--format", "json"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto j = nlohmann::json::parse(ok.out);
  EXPECT_EQ(j["sample"]["dropped_missing"], 1);
  EXPECT_EQ(j["sample"]["n"], 5);
  EXPECT_EQ(j["parameters"]["seed"], "none");
  EXPECT_EQ(j["alternative"], "non-unimodal, i.e., at least bimodal");
}

TEST_F(CliTest, DipIrisAtTableFloor) {
  const auto r = run({"dip", bundled_iris_path().string(), "--table", "default"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("beyond tabulated range"), std::string::npos);
  EXPECT_NE(r.out.find("p-value = 0.0001"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Hartigans' dip test"), std::string::npos);
}

TEST_F(CliTest, DipMonteCarloEchoesSeed) {
  const auto f = write("b.csv", kBimodal);
  const auto r = run({"dip", f, "--simulate-pvalue", "--reps", "200", "--seed", "17",
                      "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["parameters"]["seed"], "17");
  EXPECT_EQ(j["parameters"]["reps"], 200);
  EXPECT_LT(j["p_value"].get<double>(), 0.01);
}

TEST_F(CliTest, DipStdinAndCsv) {
  const auto r = run({"dip", "-", "--format", "csv"}, kBimodal);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("test,data,", 0), 0u);
}

TEST_F(CliTest, DipOutFile) {
  const auto f = write("b.csv", kBimodal);
  const auto out = path("report.json");
  const auto r = run({"dip", f, "--format", "json", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NO_THROW(nlohmann::json::parse(slurp(out)));
}

TEST_F(CliTest, InputErrors) {
  EXPECT_EQ(run({"dip", path("nope.csv")}).code, 2);
  const auto two = write("two.csv", "a,b\n1,2\n3,4\n5,6\n7,1\n2,9\n");
  const auto dim = run({"dip", two});
  EXPECT_EQ(dim.code, 2);
  EXPECT_TRUE(single_error_line(dim.err, "dimensionality")) << dim.err;
  EXPECT_EQ(run({"dip", two, "--column", "b"}).code, 0);
  EXPECT_EQ(run({"dip", two, "--column", "2"}).code, 0);
  const auto bad = write("bad.csv", "x\n1\nfoo\n");
  EXPECT_EQ(run({"dip", bad}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, TableErrors) {
  const auto f = write("b.csv", kBimodal);
  const auto missing = run({"dip", f, "--table", path("none.tab")});
  EXPECT_EQ(missing.code, 4);
  const auto junk = write("junk.tab", "format,unimodal-dip-table,1\nseed,1\n");
  const auto corrupt = run({"dip", f, "--table", junk});
  EXPECT_EQ(corrupt.code, 4);
  EXPECT_TRUE(single_error_line(corrupt.err, "corrupt_table")) << corrupt.err;
  const auto tiny = write("tiny.csv", "x\n1\n2\n3\n");
  EXPECT_EQ(run({"dip", tiny}).code, 4);
}

TEST_F(CliTest, SilvermanDeterministic) {
  const auto f = write("b.csv", kBimodal);
  const std::vector<std::string> args = {"silverman", f, "--seed", "1234", "--M", "99",
                                         "--format", "json"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(nlohmann::json::parse(a.out)["parameters"]["seed"], "1234");
}

TEST_F(CliTest, SilvermanAdjustOnlyForKOne) {
  const auto f = write("b.csv", kBimodal);
  const auto r = run({"silverman", f, "--k", "2", "--adjust", "--M", "49", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("adjustment only defined for k = 1"), std::string::npos) << r.out;
}

TEST_F(CliTest, SilvermanAdjustedUsesCurve) {
  const auto f = write("b.csv", kBimodal);
  const auto r = run({"silverman", f, "--adjust", "--M", "49", "--seed", "1", "--format",
                      "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["parameters"]["adjusted"], true);
  EXPECT_EQ(j["parameters"]["digits"], 6);
  const auto bad = run({"silverman", f, "--adjust", "--curve", path("none.curve")});
  EXPECT_EQ(bad.code, 4);
}

TEST_F(CliTest, SilvermanSeedDump) {
  const auto f = write("b.csv", kBimodal);
  const auto seed_file = path("seed.txt");
  const auto r = run({"silverman", f, "--seed", "77", "--M", "19", "--show-seed", "--seed-out",
                      seed_file});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.rfind("philox4x64-10 seed=77", 0), 0u);
  EXPECT_EQ(slurp(seed_file), r.err);
}

TEST_F(CliTest, SilvermanIrisTwoModes) {
  const auto r = run({"silverman", bundled_iris_path().string(), "--k", "2", "--seed", "1234",
                      "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double p = nlohmann::json::parse(r.out)["p_value"];
  EXPECT_GE(p, 0.3);
  EXPECT_LE(p, 0.65);
}

TEST_F(CliTest, ModesDegenerateSpread) {
  const auto f = write("c.csv", "x\n2\n2\n2\n2\n");
  const auto r = run({"modes", f, "--seed", "1", "--M", "19"});
  EXPECT_EQ(r.code, 5);
  EXPECT_TRUE(single_error_line(r.err, "degenerate_spread")) << r.err;
}

TEST_F(CliTest, ModesTrace) {
  const auto f = write("b.csv", kBimodal);
  const auto r = run({"modes", f, "--seed", "3", "--M", "99", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["modes"], 2);
  EXPECT_EQ(j["trace"].size(), 2u);
}

TEST_F(CliTest, GenTableDeterministic) {
  const auto a = path("a.tab"), b = path("b.tab");
  const std::vector<std::string> base = {"gen-table", "--sizes", "5,10", "--probs",
                                         "0.5,0.9", "--reps", "300", "--seed", "7", "--out"};
  auto args_a = base, args_b = base;
  args_a.push_back(a);
  args_b.push_back(b);
  ASSERT_EQ(run(args_a).code, 0);
  ASSERT_EQ(run(args_b).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(run({"gen-table", "--seed", "7"}).code, 2);
}

TEST_F(CliTest, CalibrateSmall) {
  const auto out = path("c.curve");
  const auto r = run({"calibrate", "--n", "40", "--M", "19", "--reps-outer", "60",
                      "--alpha-grid", "0.2,0.4,0.6,0.8", "--seed", "7", "--out", out,
                      "--holdout-reps", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("hold-out level"), std::string::npos);
  EXPECT_NO_THROW(load_curve(out));
  EXPECT_EQ(run({"calibrate"}).code, 2);
}

TEST_F(CliTest, ReplicateUnknownSuite) {
  const auto r = run({"replicate", "--suite", "bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(single_error_line(r.err, "usage")) << r.err;
}

TEST_F(CliTest, ReplicateIrisSmoke) {
  const auto r = run({"replicate", "--suite", "iris", "--reps-outer", "2", "--M", "49"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("irisPW"), std::string::npos);
  EXPECT_NE(r.out.find("<2.2e-16"), std::string::npos);
}
