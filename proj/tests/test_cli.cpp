#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli_app.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fastsparse");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fscli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> kv(const std::string& text) {
  std::map<std::string, std::string> m;
  std::istringstream in(text);
  std::string k, v;
  while (in >> k) {
    std::getline(in, v);
    m[k] = v.empty() ? "" : v.substr(1);
  }
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("fastsparse_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
    // Integer-valued features so binarization yields a handful of thresholds.
    std::ofstream f(dir / "train.csv");
    f << "A,B,C,y\n";
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> U(0, 9);
    std::uniform_real_distribution<double> R(0, 1);
    for (int i = 0; i < 300; ++i) {
      const int a = U(rng), b = U(rng), c = U(rng);
      const double logit = 0.8 * (a - 4.5) - 0.5 * (b > 6 ? 1 : 0);
      f << a << ',' << b << ',' << c << ',' << (R(rng) < 1 / (1 + std::exp(-logit)) ? 1 : 0) << '\n';
    }
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const char* name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, FitPredictRoundTrip) {
  const auto fit = cli({"fit", "--data", path("train.csv"), "--lambda0", "2", "--lambda2", "0.001", "--binarize",
                        "--out", path("model.json")});
  ASSERT_EQ(fit.code, 0) << fit.err;
  const auto fm = kv(fit.out);
  ASSERT_TRUE(fm.count("objective"));
  EXPECT_NE(fm.at("support_size"), "0");
  const auto pred = cli({"predict", "--model", path("model.json"), "--data", path("train.csv"), "--out",
                         path("pred.csv")});
  ASSERT_EQ(pred.code, 0) << pred.err;
  const auto pm = kv(pred.out);
  EXPECT_EQ(std::stod(pm.at("accuracy")), std::stod(fm.at("train_accuracy")));
  EXPECT_EQ(pm.at("auc"), fm.at("train_auc"));
  const std::string csv = slurp(dir / "pred.csv");
  EXPECT_EQ(csv.rfind("score,probability,label\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 301);
}

TEST_F(Cli, HugePenaltyGivesInterceptOnly) {
  const auto fit = cli({"fit", "--data", path("train.csv"), "--lambda0", "1e9", "--out", path("m.json")});
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_EQ(kv(fit.out).at("support_size"), "0");
  const auto sc = fastsparse::scorecard_from_json(slurp(dir / "m.json"));
  EXPECT_TRUE(sc.terms.empty());
  const auto pred = cli({"predict", "--model", path("m.json"), "--data", path("train.csv")});
  std::istringstream in(pred.out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const double prob = std::stod(line.substr(line.find(',') + 1));
  EXPECT_NEAR(prob, fastsparse::sigmoid(sc.intercept), 1e-15);
}

TEST_F(Cli, ExponentialProbabilitiesUseDoubledScore) {
  const auto fit = cli({"fit", "--data", path("train.csv"), "--loss", "exponential", "--lambda0", "3",
                        "--binarize", "--out", path("e.json")});
  ASSERT_EQ(fit.code, 0) << fit.err;
  const auto pred = cli({"predict", "--model", path("e.json"), "--data", path("train.csv")});
  std::istringstream in(pred.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line) && line.find(',') != std::string::npos) {
    const double f = std::stod(line);
    const double p = std::stod(line.substr(line.find(',') + 1));
    EXPECT_NEAR(p, fastsparse::probability_from_score(2 * f, fastsparse::LossKind::logistic), 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 300);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(cli({"fit", "--data", path("missing.csv")}).code, 2);
  EXPECT_EQ(cli({"fit", "--data", path("train.csv"), "--loss", "exponential"}).code, 3);
  EXPECT_EQ(cli({"fit", "--data", path("train.csv"), "--cut", "quad"}).code, 3);
  EXPECT_EQ(cli({"fit", "--data", path("train.csv"), "--loss", "hinge"}).code, 3);
  EXPECT_EQ(cli({"fit", "--data", path("train.csv"), "--candidate-limit", "zero"}).code, 3);
  EXPECT_EQ(cli({"fit", "--bogus"}).code, 3);
  EXPECT_EQ(cli({}).code, 3);
  std::ofstream(dir / "bad.csv") << "A,y\n1,1\nfoo,0\n";
  EXPECT_EQ(cli({"fit", "--data", path("bad.csv")}).code, 2);
  std::ofstream(dir / "bad.json") << "{";
  EXPECT_EQ(cli({"predict", "--model", path("bad.json"), "--data", path("train.csv")}).code, 2);
  std::ofstream(dir / "other.csv") << "Q,y\n1,1\n";
  ASSERT_EQ(cli({"fit", "--data", path("train.csv"), "--lambda0", "0.5", "--out", path("m.json")}).code, 0);
  EXPECT_EQ(cli({"predict", "--model", path("m.json"), "--data", path("other.csv")}).code, 2);
}

TEST_F(Cli, PathTable) {
  const auto r = cli({"path", "--data", path("train.csv"), "--binarize", "--lambda0-grid", "7,6,5,4,3,2,1,0.8",
                      "--lambda2-grid", "0.00001,0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lambda0,lambda2,support_size,objective,train_auc,wall_ms,swap_evals,cut_prunes,error");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 16);
}

TEST_F(Cli, VerifiedFitNeverWorse) {
  const auto plain = cli({"fit", "--data", path("train.csv"), "--lambda0", "1", "--binarize"});
  const auto ver = cli({"fit", "--data", path("train.csv"), "--lambda0", "1", "--binarize", "--verify-swaps"});
  ASSERT_EQ(ver.code, 0) << ver.err;
  EXPECT_LE(std::stod(kv(ver.out).at("objective")), std::stod(kv(plain.out).at("objective")) + 1e-9);
}

TEST_F(Cli, PathSinglePointMatchesFit) {
  const auto fit = cli({"fit", "--data", path("train.csv"), "--lambda0", "2", "--lambda2", "0.001"});
  const auto r = cli({"path", "--data", path("train.csv"), "--lambda0-grid", "2", "--lambda2-grid", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::string> cells;
  std::stringstream ls(line);
  for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
  const auto fm = kv(fit.out);
  EXPECT_EQ(cells[2], fm.at("support_size"));
  EXPECT_EQ(cells[3], fm.at("objective"));
}

TEST_F(Cli, PathRowsSurviveFailures) {
  const auto r = cli({"path", "--data", path("train.csv"), "--cut", "lin", "--lambda0-grid", "3,1",
                      "--lambda2-grid", "0,0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST_F(Cli, BenchMatrix) {
  const auto r = cli({"bench", "--data", path("train.csv"), "--binarize", "--lambda0-grid", "4,2",
                      "--lambda2-grid", "0,0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  // lin x 2 orderings x 2 lambda2, quad x 2 orderings x 1, exponential x 2 orderings x 1; 2 points each
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 2 * (4 + 2 + 2));
  EXPECT_NE(r.out.find("exponential,none,dynamic"), std::string::npos);
}

TEST_F(Cli, SynthDeterministic) {
  ASSERT_EQ(cli({"synth", "--n", "50", "--p", "20", "--k", "4", "--seed", "5", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(cli({"synth", "--n", "50", "--p", "20", "--k", "4", "--seed", "5", "--out", path("b.csv")}).code, 0);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_EQ(slurp(dir / "a.csv.truth"), "x5\nx10\nx15\nx20\n");
  EXPECT_EQ(cli({"synth", "--k", "0", "--out", path("c.csv")}).code, 3);
  const auto fit = cli({"fit", "--data", path("a.csv"), "--lambda0", "1"});
  EXPECT_EQ(fit.code, 0) << fit.err;
}
