#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qot/io.hpp"

namespace {

namespace fs = std::filesystem;
using qot::io::json;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(QOT_BINARY) + " " + args + " 2>&1";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qot_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    write("a.json", R"({"dim": 2, "entries": [[0.8, 0], [0.1, -0.05], [0.1, 0.05], [0.2, 0]]})");
    write("b.json", R"({"dim": 2, "entries": [[0.3, 0], [0, 0.1], [0, -0.1], [0.7, 0]]})");
    write("mixed.json", R"({"dim": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const std::string p = path(name);
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    rows.emplace_back();
    while (std::getline(row, cell, ',')) rows.back().push_back(std::stod(cell));
  }
  return rows;
}

TEST_F(Cli, DistanceToItselfIsZero) {
  const Outcome r = run("distance --marginal0 " + path("a.json") + " --marginal1 " +
                    path("a.json") + " --steps 8");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(json::parse(r.out)["report"]["distance"].get<double>(), 0.0);
}

TEST_F(Cli, LogDirectReport) {
  const Outcome r = run("distance --marginal0 " + path("a.json") + " --marginal1 " +
                    path("b.json") + " --kind log --backend direct --steps 6 --out " +
                    path("r.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(read("r.json"));
  EXPECT_EQ(j["report"]["backend"], "direct");
  EXPECT_GT(j["report"]["distance"].get<double>(), 0.0);
  EXPECT_EQ(j["report"]["step_energies"].size(), 6u);
  EXPECT_TRUE(j["report"]["optimality"].contains("hj_l2"));
}

TEST_F(Cli, GeodesicWritesPath) {
  const Outcome r = run("geodesic --marginal0 " + path("a.json") + " --marginal1 " +
                    path("b.json") + " --steps 4");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["path"]["densities"].size(), 5u);
  EXPECT_EQ(j["path"]["momenta"].size(), 4u);
}

TEST_F(Cli, ConicRejectsLogKind) {
  const Outcome r = run("distance --marginal0 " + path("a.json") + " --marginal1 " +
                    path("b.json") + " --kind log --backend conic");
  EXPECT_EQ(r.code, 2) << r.out;
}

TEST_F(Cli, MalformedJsonIsInputError) {
  write("bad.json", "{\"dim\": 2,\n \"entries\": [[1, 0],, [0, 0]]}");
  const Outcome r = run("distance --marginal0 " + path("bad.json") + " --marginal1 " +
                    path("a.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 2"), std::string::npos) << r.out;
}

TEST_F(Cli, NonDensityIsInputError) {
  write("neg.json", R"({"dim": 2, "entries": [[1.2, 0], [0, 0], [0, 0], [-0.2, 0]]})");
  const Outcome r = run("flow --marginal0 " + path("neg.json"));
  EXPECT_EQ(r.code, 2) << r.out;
}

TEST_F(Cli, FlowOfMaximallyMixedIsConstant) {
  const Outcome r = run("flow --marginal0 " + path("mixed.json") + " --tfinal 0.1 --dt 0.01");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 11u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row[1], std::log(2.0), 1e-14);
    EXPECT_NEAR(row[4], 0.0, 1e-14);
  }
}

TEST_F(Cli, LogFlowReachesUniform) {
  const Outcome r = run("flow --kind log --marginal0 " + path("a.json") +
                    " --tfinal 10 --dt 0.01 --stride 100");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_LE(csv_rows(r.out).back()[4], 1e-6);
}

TEST_F(Cli, OversizedStepReportsPositivityLoss) {
  const Outcome r = run("flow --marginal0 " + path("a.json") + " --tfinal 1e6 --dt 1e6");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("positivity lost at step 1"), std::string::npos) << r.out;
}

TEST_F(Cli, ConfigFileAndOverride) {
  write("cfg.json", R"({"steps": 4, "marginal0": ")" + path("a.json") +
                        R"(", "marginal1": ")" + path("b.json") + R"("})");
  const Outcome a = run("geodesic --config " + path("cfg.json"));
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(json::parse(a.out)["path"]["steps"], 4);
  const Outcome b = run("geodesic --config " + path("cfg.json") + " --steps 2");
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(json::parse(b.out)["path"]["steps"], 2);
  write("cfg2.json", R"({"stepz": 4})");
  EXPECT_EQ(run("distance --config " + path("cfg2.json")).code, 2);
}

TEST_F(Cli, BadFlagsAreInputErrors) {
  EXPECT_EQ(run("distance --steps 0 --marginal0 " + path("a.json")).code, 2);
  EXPECT_EQ(run("distance --bogus 1").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("distance --marginal0 " + path("a.json")).code, 2);
}

TEST_F(Cli, InnerProduct) {
  write("t.json", R"({"dim": 2, "entries": [[1, 0], [0, 0], [0, 0], [-1, 0]]})");
  const Outcome r = run("innerprod --basis " +
                    write("xy.json",
                          R"([{"dim": 2, "entries": [[0,0],[1,0],[1,0],[0,0]]},
                              {"dim": 2, "entries": [[0,0],[0,-1],[0,1],[0,0]]}])") +
                    " --marginal0 " + path("mixed.json") + " --tangent1 " + path("t.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  // <sigma_z, sigma_z> at I/2 for {sigma_x, sigma_y}
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 0.5, 1e-12);
}

TEST_F(Cli, SpatialCommands) {
  json f = json::array();
  for (int i = 0; i < 4; ++i) {
    f.push_back(json::parse(R"({"dim": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]})"));
  }
  write("u.json", f.dump());
  const Outcome d = run("spatial-distance --marginal0 " + path("u.json") + " --marginal1 " +
                    path("u.json") + " --steps 2");
  ASSERT_EQ(d.code, 0) << d.out;
  EXPECT_LE(json::parse(d.out)["report"]["distance"].get<double>(), 1e-12);
  const Outcome fl = run("spatial-flow --marginal0 " + path("u.json") +
                     " --kind log --tfinal 0.05 --dt 0.01");
  ASSERT_EQ(fl.code, 0) << fl.out;
  EXPECT_EQ(csv_rows(fl.out).size(), 6u);
}

TEST_F(Cli, CheckSelectsSuitesAndIsReproducible) {
  const Outcome a = run("check --only sbp,roundtrip --seed 7");
  ASSERT_EQ(a.code, 0) << a.out;
  const json j = json::parse(a.out);
  ASSERT_EQ(j["suites"].size(), 2u);
  EXPECT_EQ(j["suites"][0]["name"], "sbp");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(run("check --only sbp,roundtrip --seed 7").out, a.out);
  EXPECT_EQ(run("check --only nonsense").code, 2);
}

}  // namespace
