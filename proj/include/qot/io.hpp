#pragma once

// File formats and job configuration: matrices as {"dim": n, "entries":
// [[re, im], ...]} in row-major order, fields as arrays of such records,
// reports as JSON and time series as CSV.

#include <optional>
#include <string>

#include <json.hpp>

#include "qot/entropy_flow.hpp"
#include "qot/geodesic.hpp"
#include "qot/spatial.hpp"

namespace qot::io {

using json = nlohmann::json;

/// Malformed input: bad JSON, wrong shapes, unknown keys.
class ParseError : public Error {
 public:
  using Error::Error;
};

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

/// Parses JSON text; syntax errors carry "line L, column C".
json parse_json(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

ComplexMatrix read_matrix_file(const std::string& path);
MatrixField read_field_file(const std::string& path);
void write_matrix_file(const std::string& path, const ComplexMatrix& m);

/// Named preset ("pauli", "gellmann:<n>") or a JSON file holding an array of
/// matrix records.
LindbladBasis load_basis(const std::string& spec);

json report_to_json(const SolveReport& r);
json path_to_json(const DiscretePath& path);

/// t, entropy, trace_drift, min_eig, dist_to_uniform
std::string flow_csv(const FlowTrace& trace);
/// Same columns; trace_drift is the drift of the total mass.
std::string spatial_flow_csv(const Grid& grid, const SpatialFlowTrace& trace);

struct JobConfig {
  std::string command;
  std::string marginal0;
  std::string marginal1;
  std::string basis = "pauli";
  std::string kind = "anticomm";
  std::string backend = "conic";
  int steps = 32;
  double gamma = 1.0;
  double dt = 1e-3;
  double tfinal = 1.0;
  unsigned long seed = 0;
  std::string out;
  int stride = 1;
  double tolerance = 1e-6;
  long max_iterations = 50000;
  std::string only;
  std::string tangent1;
  std::string tangent2;
};

/// Overlays the keys of `j` on `config`. Unknown keys and non-positive
/// numeric values are rejected.
void apply_config_json(const json& j, JobConfig& config);
void validate_config(const JobConfig& config);

}  // namespace qot::io
