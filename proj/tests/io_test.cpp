#include <filesystem>
#include <random>
#include <sstream>

#include "qot/io.hpp"
#include "support.hpp"

namespace qot {
namespace {

using io::json;
using io::ParseError;

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qot_io_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

TEST(MatrixJson, RoundTripIsBitExact) {
  Rng rng(1);
  for (int n = 1; n <= 4; ++n) {
    const ComplexMatrix m = random_ginibre(rng, n) * 1e-7;
    const ComplexMatrix back = io::matrix_from_json(io::parse_json(
        io::matrix_to_json(m).dump(), "mem"));
    EXPECT_EQ((back - m).norm(), 0.0);
    const std::string path = temp_path("m.json");
    io::write_matrix_file(path, m);
    EXPECT_EQ((io::read_matrix_file(path) - m).norm(), 0.0);
  }
}

TEST(MatrixJson, Layout) {
  ComplexMatrix m(2, 2);
  m << cplx(1, 0), cplx(2, 3), cplx(4, 0), cplx(0, -1);
  const json j = io::matrix_to_json(m);
  EXPECT_EQ(j["dim"], 2);
  EXPECT_EQ(j["entries"][1], json::array({2.0, 3.0}));
  EXPECT_EQ(j["entries"][2], json::array({4.0, 0.0}));
}

TEST(MatrixJson, RejectsMalformedRecords) {
  EXPECT_THROW(io::matrix_from_json(json::parse(R"({"dim": 2, "entries": []})")), ParseError);
  EXPECT_THROW(io::matrix_from_json(json::parse(R"({"dim": 0, "entries": []})")), ParseError);
  EXPECT_THROW(io::matrix_from_json(json::parse(R"({"dim": 1})")), ParseError);
  EXPECT_THROW(io::matrix_from_json(json::parse(R"({"dim": 1, "entries": [[1]]})")),
               ParseError);
  EXPECT_THROW(io::matrix_from_json(json::parse(R"({"dim": 1, "entries": [["a", 0]]})")),
               ParseError);
  EXPECT_THROW(
      io::matrix_from_json(json::parse(R"({"dim": 1, "entries": [[1, 0]], "x": 1})")),
      ParseError);
  EXPECT_THROW(io::matrix_from_json(json::parse("[1, 2]")), ParseError);
}

TEST(ParseJson, ReportsLineAndColumn) {
  try {
    // the second comma is the 12th character of line 2
    io::parse_json("{\n  \"dim\": 2,,\n}", "bad.json");
    FAIL() << "no ParseError";
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bad.json: line 2, column 12"), std::string::npos) << what;
  }
  EXPECT_THROW(io::read_json_file(temp_path("missing.json")), ParseError);
}

TEST(Fields, ReadArrayOfRecords) {
  const std::string path = temp_path("field.json");
  json arr = json::array();
  for (int i = 0; i < 3; ++i) {
    arr.push_back(io::matrix_to_json(ComplexMatrix::Identity(2, 2) * (i + 1.0)));
  }
  io::write_text_file(path, arr.dump());
  const MatrixField f = io::read_field_file(path);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[2](1, 1), cplx(3.0, 0.0));
  io::write_text_file(path, R"({"dim": 1})");
  EXPECT_THROW(io::read_field_file(path), ParseError);
}

TEST(Basis, PresetsAndFiles) {
  EXPECT_EQ(io::load_basis("pauli").size(), 3u);
  EXPECT_EQ(io::load_basis("gellmann:3").size(), 8u);
  const std::string path = temp_path("basis.json");
  io::write_text_file(path, json::array({io::matrix_to_json(sigma_x()),
                                         io::matrix_to_json(sigma_y())})
                                .dump());
  const LindbladBasis b = io::load_basis(path);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_EQ(b.dim(), 2);
}

TEST(Config, OverlayAndValidation) {
  io::JobConfig c;
  io::apply_config_json(json::parse(R"({"steps": 8, "kind": "log", "gamma": 0.5})"), c);
  EXPECT_EQ(c.steps, 8);
  EXPECT_EQ(c.kind, "log");
  EXPECT_EQ(c.gamma, 0.5);
  EXPECT_NO_THROW(io::validate_config(c));
  EXPECT_THROW(io::apply_config_json(json::parse(R"({"stepz": 8})"), c), ParseError);
  EXPECT_THROW(io::apply_config_json(json::parse(R"({"steps": "8"})"), c), ParseError);
  EXPECT_THROW(io::apply_config_json(json::parse(R"({"seed": -1})"), c), ParseError);
  EXPECT_THROW(io::apply_config_json(json::parse("[]"), c), ParseError);
  for (const char* bad : {R"({"steps": 0})", R"({"dt": -1.0})", R"({"kind": "sqrt"})",
                          R"({"backend": "sdp"})", R"({"stride": 0})"}) {
    io::JobConfig d;
    io::apply_config_json(json::parse(bad), d);
    EXPECT_THROW(io::validate_config(d), ParseError) << bad;
  }
}

TEST(Csv, FlowColumns) {
  const FlowTrace t = flow_log(LindbladBasis::pauli(), DensityMatrix::maximally_mixed(2),
                               0.2, 0.1);
  const std::string csv = io::flow_csv(t);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,entropy,trace_drift,min_eig,dist_to_uniform");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 5u);
    EXPECT_NEAR(v[1], std::log(2.0), 1e-15);
    EXPECT_NEAR(v[3], 0.5, 1e-15);
    EXPECT_NEAR(v[4], 0.0, 1e-15);
  }
  EXPECT_EQ(rows, 3);
}

TEST(Report, Fields) {
  SolveReport r;
  r.backend = "conic";
  r.distance = 0.5;
  r.step_energies = {0.25, 0.25};
  const json j = io::report_to_json(r);
  for (const char* key : {"backend", "distance", "action", "iterations", "primal_residual",
                          "dual_residual", "epigraph_gap", "step_energies", "optimality"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_FALSE(j.contains("wall_seconds"));
}

}  // namespace
}  // namespace qot
