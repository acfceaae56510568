#include "qot/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qot::io {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  return j.get<double>();
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix record must be square");
  json entries = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return json{{"dim", m.rows()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("matrix record must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "dim" && it.key() != "entries") {
      throw ParseError("matrix record: unknown key '" + it.key() + "'");
    }
  }
  if (!j.contains("dim") || !j.contains("entries")) {
    throw ParseError("matrix record needs 'dim' and 'entries'");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1) {
    throw ParseError("matrix record: 'dim' must be a positive integer");
  }
  const long n = j["dim"].get<long>();
  const json& e = j["entries"];
  if (!e.is_array() || static_cast<long>(e.size()) != n * n) {
    throw ParseError("matrix record: expected " + std::to_string(n * n) +
                     " entries");
  }
  ComplexMatrix m(n, n);
  for (long k = 0; k < n * n; ++k) {
    const json& pair = e[k];
    if (!pair.is_array() || pair.size() != 2) {
      throw ParseError("matrix record: entry " + std::to_string(k) +
                       " must be [re, im]");
    }
    m(k / n, k % n) = cplx(number(pair[0], "entry"), number(pair[1], "entry"));
  }
  return m;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0,
                                                  text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << source << ": line " << line << ", column " << col
        << ": malformed JSON (" << e.what() << ")";
    throw ParseError(msg.str());
  }
}

json read_json_file(const std::string& path) {
  return parse_json(read_text(path), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

ComplexMatrix read_matrix_file(const std::string& path) {
  try {
    return matrix_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + what);
  }
}

MatrixField read_field_file(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.is_array()) throw ParseError(path + ": field file must be an array");
  MatrixField f;
  try {
    for (const auto& rec : j) f.push_back(matrix_from_json(rec));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  return f;
}

void write_matrix_file(const std::string& path, const ComplexMatrix& m) {
  write_text_file(path, matrix_to_json(m).dump() + "\n");
}

LindbladBasis load_basis(const std::string& spec) {
  if (spec == "pauli" || spec.rfind("gellmann:", 0) == 0) {
    return LindbladBasis::from_name(spec);
  }
  const json j = read_json_file(spec);
  if (!j.is_array()) throw ParseError(spec + ": basis file must be an array");
  std::vector<HermitianMatrix> ops;
  int n = 0;
  for (const auto& rec : j) {
    const ComplexMatrix m = matrix_from_json(rec);
    n = static_cast<int>(m.rows());
    ops.emplace_back(m);
  }
  return LindbladBasis(std::move(ops), n == 0 ? 1 : n);
}

json report_to_json(const SolveReport& r) {
  return json{
      {"backend", r.backend},
      {"distance", r.distance},
      {"action", r.action},
      {"objective", r.objective},
      {"iterations", r.iterations},
      {"primal_residual", r.primal_residual},
      {"dual_residual", r.dual_residual},
      {"epigraph_gap", r.epigraph_gap},
      {"gradient_max", r.gradient_max},
      {"step_energies", r.step_energies},
      {"optimality",
       {{"hj_l2", r.optimality.hj_l2},
        {"hj_max", r.optimality.hj_max},
        {"continuity_l2", r.optimality.continuity_l2},
        {"continuity_max", r.optimality.continuity_max}}}};
}

json path_to_json(const DiscretePath& path) {
  json densities = json::array();
  for (const auto& d : path.densities) densities.push_back(matrix_to_json(d));
  json momenta = json::array();
  for (const auto& m : path.momenta) {
    json blocks = json::array();
    for (const auto& b : m.blocks) blocks.push_back(matrix_to_json(b));
    momenta.push_back(blocks);
  }
  return json{{"kind", to_string(path.kind)},
              {"steps", path.steps()},
              {"densities", densities},
              {"momenta", momenta}};
}

std::string flow_csv(const FlowTrace& trace) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "t,entropy,trace_drift,min_eig,dist_to_uniform\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const ComplexMatrix& s = trace.states[k].matrix();
    const int n = static_cast<int>(s.rows());
    const double dist =
        (s - ComplexMatrix::Identity(n, n) / static_cast<double>(n)).norm();
    out << trace.times[k] << ',' << trace.entropies[k] << ','
        << trace.trace_drift[k] << ',' << trace.min_eigenvalues[k] << ','
        << dist << '\n';
  }
  return out.str();
}

std::string spatial_flow_csv(const Grid& grid, const SpatialFlowTrace& trace) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "t,entropy,trace_drift,min_eig,dist_to_uniform\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const MatrixField& f = trace.states[k];
    const int n = static_cast<int>(f[0].rows());
    double d2 = 0.0;
    for (int x = 0; x < grid.size(); ++x) {
      d2 += grid.weights()(x) *
            (f[x] - ComplexMatrix::Identity(n, n) / static_cast<double>(n))
                .squaredNorm();
    }
    out << trace.times[k] << ',' << trace.entropies[k] << ','
        << trace.mass_drift[k] << ',' << trace.min_eigenvalues[k] << ','
        << std::sqrt(d2) << '\n';
  }
  return out.str();
}

void apply_config_json(const json& j, JobConfig& c) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    auto str = [&]() {
      if (!v.is_string()) throw ParseError("config '" + k + "' must be a string");
      return v.get<std::string>();
    };
    auto integer = [&]() {
      if (!v.is_number_integer()) {
        throw ParseError("config '" + k + "' must be an integer");
      }
      return v.get<long>();
    };
    if (k == "command") c.command = str();
    else if (k == "marginal0") c.marginal0 = str();
    else if (k == "marginal1") c.marginal1 = str();
    else if (k == "basis") c.basis = str();
    else if (k == "kind") c.kind = str();
    else if (k == "backend") c.backend = str();
    else if (k == "steps") c.steps = static_cast<int>(integer());
    else if (k == "gamma") c.gamma = number(v, k);
    else if (k == "dt") c.dt = number(v, k);
    else if (k == "tfinal") c.tfinal = number(v, k);
    else if (k == "seed") {
      const long s = integer();
      if (s < 0) throw ParseError("config 'seed' must be nonnegative");
      c.seed = static_cast<unsigned long>(s);
    }
    else if (k == "out") c.out = str();
    else if (k == "stride") c.stride = static_cast<int>(integer());
    else if (k == "tolerance") c.tolerance = number(v, k);
    else if (k == "max_iterations") c.max_iterations = integer();
    else if (k == "only") c.only = str();
    else if (k == "tangent1") c.tangent1 = str();
    else if (k == "tangent2") c.tangent2 = str();
    else throw ParseError("config: unknown key '" + k + "'");
  }
}

void validate_config(const JobConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw ParseError(std::string("'") + name + "' must be positive");
    }
  };
  positive(c.steps, "steps");
  positive(c.gamma, "gamma");
  positive(c.dt, "dt");
  positive(c.tfinal, "tfinal");
  positive(c.stride, "stride");
  positive(c.tolerance, "tolerance");
  positive(static_cast<double>(c.max_iterations), "max_iterations");
  if (c.kind != "anticomm" && c.kind != "log") {
    throw ParseError("'kind' must be anticomm or log");
  }
  if (c.backend != "conic" && c.backend != "direct") {
    throw ParseError("'backend' must be conic or direct");
  }
}

}  // namespace qot::io
