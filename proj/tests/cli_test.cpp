#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "steer/io.hpp"

namespace {

namespace fs = std::filesystem;
using steer::io::json;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(STEER_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("steer_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const json& j) {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, EvaluateClosedFormQubitViolated) {
  const auto r = run("evaluate --family isotropic --d 2 --p 0.7 --criterion srur --mode paper-closed-form");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["violated"], true);
  EXPECT_EQ(j["mode"], "paper-closed-form");
}

TEST_F(CliTest, EvaluateWhiteNoiseNotViolated) {
  const auto r = run("evaluate --family isotropic --d 2 --p 0 --criterion srur --mode linear-g");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["violated"], false);
  EXPECT_NEAR(j["lhs"].get<double>(), 1.0 / 16.0, 1e-14);
}

TEST_F(CliTest, EvaluateAuditIncludesOracleAndDiff) {
  const auto r = run("evaluate --d 2 --p 0 --mode paper-closed-form --audit");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["report"]["mode"], "paper-closed-form");
  EXPECT_EQ(j["audit"]["oracle"]["tables"]["b1"].size(), 4u);
  EXPECT_EQ(j["audit"]["closed_form_diff"].size(), 7u);
  EXPECT_TRUE(j["audit"].contains("engine_moments"));
  bool found = false;
  for (const auto& row : j["audit"]["closed_form_diff"]) {
    if (row["slot"] == "product_of_means_inf") {
      found = true;
      EXPECT_EQ(row["abs_diff"].get<double>(), 0.0625);
    }
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, EvaluateFileFamily) {
  const auto rho = steer::isotropic({2, 0.8});
  const auto state = write("s.json", steer::io::state_to_json(rho));
  const auto obs = write("o.json", {{"b1", steer::io::observable_to_json(steer::spin_half(steer::Axis::X))},
                                    {"b2", steer::io::observable_to_json(steer::spin_half(steer::Axis::Z))}});
  const auto r = run("evaluate --family file --state " + state.string() + " --observables " + obs.string());
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  const auto direct = steer::evaluate_srur(rho, steer::spin_half(steer::Axis::X), steer::spin_half(steer::Axis::Z));
  EXPECT_NEAR(j["lhs"].get<double>(), direct.lhs, 1e-15);
  EXPECT_NEAR(j["rhs"].get<double>(), direct.rhs, 1e-15);
  EXPECT_EQ(j["violated"], direct.violated);

  // Explicit pairing: Alice measures the same operators untransposed; Sx and Sz are real so nothing changes.
  const auto obs2 = write("o2.json", {{"b1", steer::io::observable_to_json(steer::spin_half(steer::Axis::X))},
                                      {"b2", steer::io::observable_to_json(steer::spin_half(steer::Axis::Z))},
                                      {"a1", steer::io::observable_to_json(steer::spin_half(steer::Axis::X))},
                                      {"a2", steer::io::observable_to_json(steer::spin_half(steer::Axis::Z))}});
  const auto r2 = run("evaluate --family file --pairing file --state " + state.string() + " --observables " +
                      obs2.string());
  ASSERT_EQ(r2.code, 0);
  EXPECT_NEAR(json::parse(r2.out)["lhs"].get<double>(), direct.lhs, 1e-15);
}

TEST_F(CliTest, InvalidConfigExitsTwo) {
  EXPECT_EQ(run("evaluate --d 4 --p 0.5").code, 2);
  EXPECT_EQ(run("evaluate --d 2 --p 1.5").code, 2);
  EXPECT_EQ(run("evaluate --d 2 --p 0.5 --criterion eur").code, 2);
  EXPECT_EQ(run("evaluate --d 2 --p 0.5 --pairing file").code, 2);
  EXPECT_EQ(run("evaluate --family file").code, 2);
  EXPECT_EQ(run("evaluate --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(CliTest, NumericalFailureExitsThree) {
  // <A^2> = 0 for Alice's zero observable makes g undefined.
  const auto state = write("s.json", steer::io::state_to_json(steer::isotropic({2, 0.5})));
  const json zero = {{"matrix", {{{0, 0}, {0, 0}}, {{0, 0}, {0, 0}}}}};
  const auto obs = write("o.json", {{"b1", steer::io::observable_to_json(steer::spin_half(steer::Axis::X))},
                                    {"b2", steer::io::observable_to_json(steer::spin_half(steer::Axis::Z))},
                                    {"a1", zero},
                                    {"a2", steer::io::observable_to_json(steer::spin_half(steer::Axis::Z))}});
  EXPECT_EQ(run("evaluate --family file --pairing file --state " + state.string() + " --observables " + obs.string())
                .code,
            3);
}

TEST_F(CliTest, ThresholdExamples) {
  auto p_star = [](const std::string& args) {
    const auto r = run("threshold " + args);
    EXPECT_EQ(r.code, 0) << args;
    return r.code == 0 ? json::parse(r.out)["p_star"].get<double>() : -1.0;
  };
  const double q2 = p_star("--d 2 --criterion srur --mode paper-closed-form");
  EXPECT_GE(q2, 0.555);
  EXPECT_LE(q2, 0.570);
  const double q3 = p_star("--d 3 --criterion srur --mode paper-closed-form");
  EXPECT_GE(q3, 0.8995);
  EXPECT_LE(q3, 0.9015);
  EXPECT_NEAR(p_star("--d 2 --criterion hur --mode linear-g"), 0.618, 1e-3);
}

TEST_F(CliTest, ThresholdOutputFields) {
  const auto r = run("threshold --d 2 --criterion hur --mode linear-g --tol 1e-6");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  for (const char* k : {"p_star", "bracket", "evaluations", "margin_at_p_star", "multi_crossing"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_LE(j["bracket"][1].get<double>() - j["bracket"][0].get<double>(), 1e-6);
}

TEST_F(CliTest, ThresholdInvalidToleranceExitsTwo) {
  EXPECT_EQ(run("threshold --d 2 --tol 0").code, 2);
}

TEST_F(CliTest, SweepQutritClosedForm) {
  const auto out = dir_ / "q.csv";
  ASSERT_EQ(run("sweep --d 3 --mode paper-closed-form --p-start 0 --p-end 1 --steps 101 --out " + out.string()).code, 0);
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "p,lhs,rhs,margin,violated");
  int rows = 0;
  double last_not_violated = -1.0;
  while (std::getline(in, line)) {
    ++rows;
    const double p = std::stod(line.substr(0, line.find(',')));
    if (line.ends_with(",false")) last_not_violated = p;
  }
  EXPECT_EQ(rows, 101);
  EXPECT_LE(last_not_violated, 0.90 + 1e-12);
  EXPECT_GE(last_not_violated, 0.89);
}

TEST_F(CliTest, SweepTwoStepsAndDeterminism) {
  const auto a = dir_ / "a.csv", b = dir_ / "b.csv", c = dir_ / "c.csv";
  ASSERT_EQ(run("sweep --d 2 --steps 2 --out " + a.string()).code, 0);
  const std::string text = slurp(a);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);

  ASSERT_EQ(run("sweep --d 3 --steps 257 --out " + b.string()).code, 0);
  ASSERT_EQ(run("sweep --d 3 --steps 257 --jobs 4 --out " + c.string()).code, 0);
  EXPECT_EQ(slurp(b), slurp(c));
  ASSERT_EQ(run("sweep --d 3 --steps 257 --out " + c.string()).code, 0);
  EXPECT_EQ(slurp(b), slurp(c));
}

TEST_F(CliTest, SweepDiffOut) {
  const auto out = dir_ / "s.csv", diff = dir_ / "d.csv";
  ASSERT_EQ(run("sweep --d 2 --steps 3 --out " + out.string() + " --diff-out " + diff.string()).code, 0);
  const std::string text = slurp(diff);
  EXPECT_EQ(text.rfind("p,slot,engine_value,paper_value,abs_diff\n", 0), 0u);
  EXPECT_NE(text.find("0,product_of_means_inf,0,-0.0625,0.0625"), std::string::npos);
}

TEST_F(CliTest, InvalidSweepLeavesNoFile) {
  const auto out = dir_ / "never.csv";
  EXPECT_EQ(run("sweep --d 2 --p-start 0.8 --p-end 0.2 --out " + out.string()).code, 2);
  EXPECT_EQ(run("sweep --d 5 --out " + out.string()).code, 2);
  EXPECT_EQ(run("sweep --d 2 --steps 1 --out " + out.string()).code, 2);
  EXPECT_EQ(run("sweep --d 2").code, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST_F(CliTest, ValidateState) {
  const auto good = write("good.json", steer::io::state_to_json(steer::isotropic({3, 0.2})));
  auto r = run("validate-state --state " + good.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["valid"], true);
  EXPECT_EQ(json::parse(r.out)["dim"], 9);

  const json bad = {{"matrix", {{{1, 0}, {0, 0}}, {{0, 0}, {-1, 0}}}}};
  r = run("validate-state --state " + write("bad.json", bad).string());
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["valid"], false);
  EXPECT_EQ(j["defect"], "trace differs from 1");

  EXPECT_EQ(run("validate-state --state " + (dir_ / "missing.json").string()).code, 2);
}

}  // namespace
