// qot: command-line front end.
//
// Exit codes: 0 success, 1 failed checks or internal error, 2 bad input,
// 3 solver non-convergence or loss of positivity.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qot/check.hpp"
#include "qot/io.hpp"

namespace {

using qot::io::json;
using qot::io::JobConfig;

constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("qot");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("QOT_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else spdlog::set_level(spdlog::level::err);
}

void emit(const JobConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    qot::io::write_text_file(c.out, text);
    spdlog::info("wrote {}", c.out);
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) {
    throw qot::io::ParseError(std::string("missing required ") + flag);
  }
}

qot::GeodesicOptions geodesic_options(const JobConfig& c) {
  qot::GeodesicOptions o;
  o.conic.tolerance = c.tolerance;
  o.conic.max_iterations = c.max_iterations;
  o.max_iterations = static_cast<int>(std::min<long>(c.max_iterations, 1L << 30));
  return o;
}

json header(const JobConfig& c) {
  return json{{"command", c.command}, {"basis", c.basis}, {"kind", c.kind},
              {"backend", c.backend}, {"steps", c.steps}};
}

qot::GeodesicResult solve_matrix(const JobConfig& c,
                                 const qot::LindbladBasis& basis) {
  require(c.marginal0, "--marginal0");
  require(c.marginal1, "--marginal1");
  const qot::DensityMatrix rho0(qot::io::read_matrix_file(c.marginal0));
  const qot::DensityMatrix rho1(qot::io::read_matrix_file(c.marginal1));
  const qot::MetricKind kind = qot::parse_metric_kind(c.kind);
  if (c.backend == "conic") {
    if (kind != qot::MetricKind::AntiCommutator) {
      throw qot::io::ParseError(
          "the conic backend supports only --kind anticomm");
    }
    return qot::solve_w2a_conic(basis, rho0, rho1, c.steps, geodesic_options(c));
  }
  return qot::solve_w2_direct(basis, rho0, rho1, c.steps, kind,
                              geodesic_options(c));
}

int cmd_distance(const JobConfig& c, bool with_path) {
  const qot::LindbladBasis basis = qot::io::load_basis(c.basis);
  const qot::GeodesicResult res = solve_matrix(c, basis);
  spdlog::info("{} backend: distance {:.12g}, {} iterations, {:.3f} s",
               res.report.backend, res.report.distance, res.report.iterations,
               res.report.wall_seconds);
  json out = header(c);
  out["report"] = qot::io::report_to_json(res.report);
  if (with_path) out["path"] = qot::io::path_to_json(res.path);
  emit(c, out.dump(2) + "\n");
  return 0;
}

int cmd_flow(const JobConfig& c) {
  require(c.marginal0, "--marginal0");
  const qot::LindbladBasis basis = qot::io::load_basis(c.basis);
  const qot::DensityMatrix rho0(qot::io::read_matrix_file(c.marginal0));
  const qot::MetricKind kind = qot::parse_metric_kind(c.kind);
  const auto start = std::chrono::steady_clock::now();
  const qot::FlowTrace trace =
      kind == qot::MetricKind::Logarithmic
          ? qot::flow_log(basis, rho0, c.tfinal, c.dt, c.stride)
          : qot::flow_anticomm(basis, rho0, c.tfinal, c.dt, c.stride);
  spdlog::info("flow: {} records, {:.3f} s", trace.times.size(),
               std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
                   .count());
  emit(c, qot::io::flow_csv(trace));
  return 0;
}

int cmd_innerprod(const JobConfig& c) {
  require(c.marginal0, "--marginal0");
  require(c.tangent1, "--tangent1");
  const qot::LindbladBasis basis = qot::io::load_basis(c.basis);
  const qot::DensityMatrix rho(qot::io::read_matrix_file(c.marginal0));
  const qot::TangentVector d1(qot::io::read_matrix_file(c.tangent1));
  const qot::TangentVector d2(
      qot::io::read_matrix_file(c.tangent2.empty() ? c.tangent1 : c.tangent2));
  const qot::MetricKind kind = qot::parse_metric_kind(c.kind);
  json out = {{"command", c.command}, {"basis", c.basis}, {"kind", c.kind}};
  out["value"] = qot::inner_product(basis, rho, d1, d2, kind);
  out["potential1"] =
      qot::io::matrix_to_json(qot::poisson_solve(basis, rho, d1, kind).lambda);
  out["potential2"] =
      qot::io::matrix_to_json(qot::poisson_solve(basis, rho, d2, kind).lambda);
  emit(c, out.dump(2) + "\n");
  return 0;
}

int cmd_spatial_distance(const JobConfig& c) {
  require(c.marginal0, "--marginal0");
  require(c.marginal1, "--marginal1");
  const qot::LindbladBasis basis = qot::io::load_basis(c.basis);
  const qot::MatrixField rho0 = qot::io::read_field_file(c.marginal0);
  const qot::MatrixField rho1 = qot::io::read_field_file(c.marginal1);
  if (rho0.size() != rho1.size()) {
    throw qot::io::ParseError("marginal fields differ in grid size");
  }
  if (rho0.size() < 3) throw qot::io::ParseError("fields need at least 3 points");
  const qot::Grid grid(static_cast<int>(rho0.size()));
  const qot::MetricKind kind = qot::parse_metric_kind(c.kind);
  const auto res = qot::solve_spatial_geodesic(grid, basis, rho0, rho1, c.gamma,
                                               c.steps, kind,
                                               geodesic_options(c));
  spdlog::info("spatial distance {:.12g}, {:.3f} s", res.report.base.distance,
               res.report.base.wall_seconds);
  json out = header(c);
  out["backend"] = res.report.base.backend;
  out["gamma"] = c.gamma;
  out["grid_points"] = grid.size();
  out["report"] = qot::io::report_to_json(res.report.base);
  out["report"]["q_action"] = res.report.q_action;
  out["report"]["u_action"] = res.report.u_action;
  emit(c, out.dump(2) + "\n");
  return 0;
}

int cmd_spatial_flow(const JobConfig& c) {
  require(c.marginal0, "--marginal0");
  const qot::LindbladBasis basis = qot::io::load_basis(c.basis);
  const qot::MatrixField rho0 = qot::io::read_field_file(c.marginal0);
  if (rho0.size() < 3) throw qot::io::ParseError("fields need at least 3 points");
  const qot::Grid grid(static_cast<int>(rho0.size()));
  const qot::MetricKind kind = qot::parse_metric_kind(c.kind);
  const qot::SpatialFlowTrace trace = qot::spatial_entropy_flow(
      grid, basis, rho0, c.gamma, kind, c.tfinal, c.dt, c.stride);
  emit(c, qot::io::spatial_flow_csv(grid, trace));
  return 0;
}

int cmd_check(const JobConfig& c) {
  const json report = qot::check::run(c.only, c.seed);
  for (const auto& s : report["suites"]) {
    spdlog::info("{}: {}", s["name"].get<std::string>(),
                 s["passed"].get<bool>() ? "pass" : "FAIL");
  }
  emit(c, report.dump(2) + "\n");
  return report["passed"].get<bool>() ? 0 : kExitFailed;
}

int dispatch(const JobConfig& c) {
  if (c.command == "distance") return cmd_distance(c, false);
  if (c.command == "geodesic") return cmd_distance(c, true);
  if (c.command == "flow") return cmd_flow(c);
  if (c.command == "innerprod") return cmd_innerprod(c);
  if (c.command == "spatial-distance") return cmd_spatial_distance(c);
  if (c.command == "spatial-flow") return cmd_spatial_flow(c);
  if (c.command == "check") return cmd_check(c);
  throw qot::io::ParseError("unknown command '" + c.command + "'");
}

// Flags shared by every subcommand; values given on the command line override
// those from --config.
void add_flags(CLI::App* sub, JobConfig& c) {
  sub->add_option("--marginal0", c.marginal0, "initial marginal / state file");
  sub->add_option("--marginal1", c.marginal1, "terminal marginal file");
  sub->add_option("--basis", c.basis, "pauli, gellmann:<n> or a JSON file");
  sub->add_option("--kind", c.kind, "anticomm or log");
  sub->add_option("--backend", c.backend, "conic or direct");
  sub->add_option("--steps", c.steps, "time steps T");
  sub->add_option("--gamma", c.gamma, "commutator weight");
  sub->add_option("--dt", c.dt, "flow time step");
  sub->add_option("--tfinal", c.tfinal, "flow final time");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--out", c.out, "output path (default stdout)");
  sub->add_option("--stride", c.stride, "record every k-th flow step");
  sub->add_option("--tolerance", c.tolerance, "solver tolerance");
  sub->add_option("--max-iterations", c.max_iterations, "solver iteration cap");
  sub->add_option("--only", c.only, "comma separated check suites");
  sub->add_option("--tangent1", c.tangent1, "tangent vector file");
  sub->add_option("--tangent2", c.tangent2, "second tangent vector file");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  JobConfig config;
  try {
    // --config is applied before the other flags are bound.
    for (int i = 1; i + 1 < argc; ++i) {
      if (std::string(argv[i]) == "--config") {
        qot::io::apply_config_json(qot::io::read_json_file(argv[i + 1]), config);
      }
    }
  } catch (const qot::Error& e) {
    std::cerr << "qot: " << e.what() << "\n";
    return kExitInput;
  }

  CLI::App app{"Matrix optimal mass transport"};
  app.require_subcommand(1);
  std::string config_path;
  for (const char* name : {"distance", "geodesic", "flow", "innerprod",
                           "spatial-distance", "spatial-flow", "check"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_flags(sub, config);
    sub->add_option("--config", config_path, "JSON job configuration");
    sub->callback([&config, sub] { config.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    qot::io::validate_config(config);
    return dispatch(config);
  } catch (const qot::PositivityError& e) {
    std::cerr << "qot: positivity lost at step " << e.step() << ": " << e.what()
              << "\n";
    return kExitSolver;
  } catch (const qot::ConvergenceError& e) {
    std::cerr << "qot: " << e.what() << "\n";
    return kExitSolver;
  } catch (const qot::io::ParseError& e) {
    std::cerr << "qot: " << e.what() << "\n";
    return kExitInput;
  } catch (const qot::DimensionError& e) {
    std::cerr << "qot: " << e.what() << "\n";
    return kExitInput;
  } catch (const qot::DomainError& e) {
    std::cerr << "qot: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "qot: " << e.what() << "\n";
    return kExitFailed;
  }
}
