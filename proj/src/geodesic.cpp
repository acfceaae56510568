#include "qot/geodesic.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "path_optimizer.hpp"

namespace qot {

namespace {

void check_marginals(const LindbladBasis& basis, const DensityMatrix& rho0,
                     const DensityMatrix& rho1, int steps) {
  if (rho0.dim() != basis.dim() || rho1.dim() != basis.dim()) {
    throw DimensionError("geodesic: marginals and basis differ in dimension");
  }
  if (steps < 1) throw DomainError("geodesic: steps must be positive");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Normalized exp(A) for a traceless Hermitian A given in frame coordinates.
ComplexMatrix exp_density(const HermitianFrame& frame, const double* c) {
  const int m = frame.size() - 1;
  const Eigen::VectorXd coords = Eigen::Map<const Eigen::VectorXd>(c, m);
  const EigenDecomposition eig = eigh(frame.compose_traceless(coords));
  const double top = eig.values.maxCoeff();
  Eigen::VectorXd w = (eig.values.array() - top).exp();
  w /= w.sum();
  return eig.vectors * w.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

// Adds the frame coordinates of d <g, exp_density(c)> / dc to out. The
// derivative of exp is taken in the eigenbasis with divided differences.
void exp_density_pullback(const HermitianFrame& frame, const double* c,
                          const ComplexMatrix& g, double* out) {
  const int m = frame.size() - 1;
  const Eigen::VectorXd coords = Eigen::Map<const Eigen::VectorXd>(c, m);
  const EigenDecomposition eig = eigh(frame.compose_traceless(coords));
  const Eigen::VectorXd& h = eig.values;
  const Eigen::VectorXd w = (h.array() - h.maxCoeff()).exp();
  const double z = w.sum();
  const ComplexMatrix gt = eig.vectors.adjoint() * g * eig.vectors;
  double mean = 0.0;
  for (int i = 0; i < h.size(); ++i) mean += gt(i, i).real() * w(i) / z;
  ComplexMatrix xt(h.size(), h.size());
  for (int i = 0; i < h.size(); ++i) {
    for (int j = 0; j < h.size(); ++j) {
      const double d = h(i) - h(j);
      const double divided = d == 0.0 ? w(j) : w(j) * std::expm1(d) / d;
      xt(i, j) = gt(i, j) * divided / z;
    }
    xt(i, i) -= mean * w(i) / z;
  }
  const Eigen::VectorXd grad =
      frame.traceless_coordinates(eig.vectors * xt * eig.vectors.adjoint());
  for (int p = 0; p < m; ++p) out[p] += grad(p);
}

DiscretePath finish_path(const LindbladBasis& basis,
                         const std::vector<ComplexMatrix>& rho,
                         MetricKind kind) {
  DiscretePath path;
  path.kind = kind;
  const int t = static_cast<int>(rho.size()) - 1;
  for (const auto& r : rho) path.densities.emplace_back(HermitianMatrix(r));
  for (int j = 0; j < t; ++j) {
    const ComplexMatrix bar = 0.5 * (rho[j] + rho[j + 1]);
    MetricOperator op(basis, bar, kind);
    const ComplexMatrix lambda = op.solve(t * (rho[j + 1] - rho[j]));
    path.momenta.push_back(op.multiply(-1.0 * grad_L(basis, lambda)));
  }
  return path;
}

// Equal marginals: the constant path, with zero action and zero momenta.
GeodesicResult constant_path(const LindbladBasis& basis,
                             const DensityMatrix& rho, int steps,
                             MetricKind kind, const std::string& backend) {
  GeodesicResult out;
  out.path.kind = kind;
  out.path.densities.assign(steps + 1, rho);
  out.path.momenta.assign(steps, BlockField::zero(basis.size(), basis.dim()));
  out.report.backend = backend;
  out.report.step_energies.assign(steps, 0.0);
  return out;
}

}  // namespace

double path_action(const LindbladBasis& basis,
                   const std::vector<ComplexMatrix>& densities,
                   MetricKind kind, std::vector<double>* step_energies) {
  const int t = static_cast<int>(densities.size()) - 1;
  if (t < 1) throw DomainError("path_action: need at least two densities");
  double total = 0.0;
  if (step_energies) step_energies->clear();
  for (int j = 0; j < t; ++j) {
    const ComplexMatrix delta = densities[j + 1] - densities[j];
    MetricOperator op(basis, 0.5 * (densities[j] + densities[j + 1]), kind);
    const double e = op.squared_norm(delta) * t * t;
    if (step_energies) step_energies->push_back(e);
    total += e / t;
  }
  return total;
}

GeodesicResult solve_w2a_conic(const LindbladBasis& basis,
                               const DensityMatrix& rho0,
                               const DensityMatrix& rho1, int steps,
                               const GeodesicOptions& options) {
  check_marginals(basis, rho0, rho1, steps);
  if (rho0.matrix() == rho1.matrix()) {
    return constant_path(basis, rho0, steps, MetricKind::AntiCommutator, "conic");
  }
  const auto start = std::chrono::steady_clock::now();
  ConicProblem problem;
  problem.n = basis.dim();
  problem.ops = basis.ops();
  problem.steps = steps;
  problem.weights = Eigen::VectorXd::Ones(1);
  problem.rho0 = {rho0.matrix()};
  problem.rho1 = {rho1.matrix()};
  const ConicSolution sol = solve_conic(problem, options.conic);

  GeodesicResult out;
  std::vector<ComplexMatrix> rho;
  for (const auto& node : sol.rho) rho.push_back(node[0]);
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double lo = min_eigenvalue(rho[j]);
    if (!(lo > tol::kPositive)) {
      std::ostringstream msg;
      msg << "conic geodesic: node " << j << " lost positivity (" << lo << ")";
      throw ConvergenceError(msg.str());
    }
  }
  out.path.kind = MetricKind::AntiCommutator;
  for (const auto& r : rho) out.path.densities.emplace_back(HermitianMatrix(r));
  for (const auto& step : sol.u) {
    BlockField m;
    for (const auto& b : step[0].blocks) m.blocks.push_back(0.5 * (b - b.adjoint()));
    out.path.momenta.push_back(std::move(m));
  }
  SolveReport& r = out.report;
  r.backend = "conic";
  r.action = path_action(basis, rho, MetricKind::AntiCommutator,
                         &r.step_energies);
  r.distance = std::sqrt(std::max(0.0, r.action));
  r.objective = sol.objective;
  r.iterations = sol.iterations;
  r.primal_residual = sol.primal_residual;
  r.dual_residual = sol.dual_residual;
  r.epigraph_gap = sol.epigraph_gap;
  r.optimality = verify_optimality(basis, out.path);
  r.wall_seconds = seconds_since(start);
  return out;
}

GeodesicResult solve_w2_direct(const LindbladBasis& basis,
                               const DensityMatrix& rho0,
                               const DensityMatrix& rho1, int steps,
                               MetricKind kind,
                               const GeodesicOptions& options) {
  check_marginals(basis, rho0, rho1, steps);
  if (rho0.matrix() == rho1.matrix()) {
    return constant_path(basis, rho0, steps, kind, "direct");
  }
  const auto start = std::chrono::steady_clock::now();
  const int n = basis.dim();
  const HermitianFrame& frame = frame_for(n);
  const int m = n * n - 1;

  detail::PathModel<ComplexMatrix> model;
  model.interior = steps - 1;
  model.params_per_node = m;
  model.first = rho0.matrix();
  model.last = rho1.matrix();
  model.decode = [&frame](const double* c) { return exp_density(frame, c); };
  model.step_energy = [&basis, kind, steps](const ComplexMatrix& a,
                                            const ComplexMatrix& b) {
    MetricOperator op(basis, 0.5 * (a + b), kind);
    return steps * op.squared_norm(b - a);
  };
  // e = T <d, d>_bar with d = b - a: de/dd = -2 T lambda and
  // de/dbar = -2 T H(bar, grad lambda), H the Hamilton-Jacobi term.
  if (options.exact_gradient) {
    model.step_gradient = [&basis, kind, steps](const ComplexMatrix& a,
                                                const ComplexMatrix& b) {
      const ComplexMatrix bar = 0.5 * (a + b);
      MetricOperator op(basis, bar, kind);
      const ComplexMatrix lambda = op.solve(b - a);
      const ComplexMatrix hj =
          hamilton_jacobi_term(bar, grad_L(basis, lambda), kind).matrix();
      return std::make_pair(ComplexMatrix(steps * (2.0 * lambda - hj)),
                            ComplexMatrix(steps * (-2.0 * lambda - hj)));
    };
    model.pullback = [&frame](const double* c, const ComplexMatrix& g, double* out) {
      exp_density_pullback(frame, c, g, out);
    };
  }

  std::vector<double> init;
  init.reserve(static_cast<std::size_t>(model.interior) * m);
  for (int j = 1; j < steps; ++j) {
    const double t = static_cast<double>(j) / steps;
    const ComplexMatrix lin = (1 - t) * rho0.matrix() + t * rho1.matrix();
    const Eigen::VectorXd c = frame.traceless_coordinates(matrix_log(lin));
    init.insert(init.end(), c.data(), c.data() + m);
  }
  detail::PathOptimizerOptions popts;
  popts.fd_step = options.fd_step;
  popts.max_iterations = options.max_iterations;
  popts.function_tolerance = options.function_tolerance;
  popts.gradient_tolerance = options.gradient_tolerance;
  const auto res = detail::optimize_path(model, init, popts);

  std::vector<ComplexMatrix> rho;
  rho.push_back(rho0.matrix());
  for (int j = 0; j < model.interior; ++j) {
    rho.push_back(exp_density(frame, res.params.data() + j * m));
  }
  rho.push_back(rho1.matrix());

  GeodesicResult out;
  out.path = finish_path(basis, rho, kind);
  SolveReport& r = out.report;
  r.backend = "direct";
  r.action = path_action(basis, rho, kind, &r.step_energies);
  r.distance = std::sqrt(std::max(0.0, r.action));
  r.objective = res.energy;
  r.iterations = res.iterations;
  r.gradient_max = res.gradient_max;
  r.optimality = verify_optimality(basis, out.path);
  r.wall_seconds = seconds_since(start);
  return out;
}

OptimalityReport verify_optimality(const LindbladBasis& basis,
                                   const DiscretePath& path) {
  OptimalityReport out;
  const int t = path.steps();
  if (t < 2) return out;
  const MetricKind kind = path.kind;
  std::vector<ComplexMatrix> lambda(t);
  for (int j = 0; j < t; ++j) {
    const ComplexMatrix& a = path.densities[j].matrix();
    const ComplexMatrix& b = path.densities[j + 1].matrix();
    MetricOperator op(basis, 0.5 * (a + b), kind);
    lambda[j] = op.solve(t * (b - a));
  }
  const double dt = 1.0 / t;
  double hj = 0.0;
  double cont = 0.0;
  for (int j = 1; j < t; ++j) {
    const ComplexMatrix& rho = path.densities[j].matrix();
    const ComplexMatrix lam = 0.5 * (lambda[j - 1] + lambda[j]);
    const ComplexMatrix dlam = t * (lambda[j] - lambda[j - 1]);
    const ComplexMatrix rhj =
        project_traceless_hermitian(
            dlam - hamilton_jacobi_rhs(basis, rho, lam, kind).matrix())
            .matrix();
    MetricOperator op(basis, rho, kind);
    const ComplexMatrix rc =
        0.5 * t *
            (path.densities[j + 1].matrix() - path.densities[j - 1].matrix()) -
        op.apply(lam);
    const double a = rhj.norm();
    const double b = rc.norm();
    hj += dt * a * a;
    cont += dt * b * b;
    out.hj_max = std::max(out.hj_max, a);
    out.continuity_max = std::max(out.continuity_max, b);
  }
  out.hj_l2 = std::sqrt(hj);
  out.continuity_l2 = std::sqrt(cont);
  return out;
}

}  // namespace qot
