#include "qot/spatial.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "path_optimizer.hpp"
#include "rk4.hpp"

namespace qot {

namespace {

constexpr double kLogFloor = 10.0 * tol::kPositive;

MatrixField apply_grid(const Eigen::MatrixXd& op, const MatrixField& f) {
  const int g = static_cast<int>(op.rows());
  if (static_cast<int>(f.size()) != g) {
    throw DimensionError("field size does not match the grid");
  }
  MatrixField out(g);
  for (int x = 0; x < g; ++x) {
    out[x] = ComplexMatrix::Zero(f[0].rows(), f[0].cols());
    for (int y = 0; y < g; ++y) {
      if (op(x, y) != 0.0) out[x] += op(x, y) * f[y];
    }
  }
  return out;
}

// M_rho(x) at every grid point, with Kubo-Mori kernels built once.
class PointMultiplication {
 public:
  PointMultiplication(const MatrixField& rho, MetricKind kind)
      : rho_(rho), kind_(kind) {
    if (kind == MetricKind::Logarithmic) {
      for (const auto& r : rho) kernels_.emplace_back(r);
    } else {
      for (const auto& r : rho) {
        if (!(min_eigenvalue(r) > tol::kPositive)) {
          throw DomainError("density field is not positive definite");
        }
      }
    }
  }

  ComplexMatrix apply(int x, const ComplexMatrix& m) const {
    if (kind_ == MetricKind::Logarithmic) return kernels_[x].apply(m);
    return 0.5 * (rho_[x] * m + m * rho_[x]);
  }
  BlockField apply(int x, const BlockField& v) const {
    if (kind_ == MetricKind::Logarithmic) return kernels_[x].apply(v);
    return mult_anticomm(rho_[x], v);
  }

 private:
  const MatrixField& rho_;
  MetricKind kind_;
  std::vector<KuboMoriKernel> kernels_;
};

MatrixField apply_operator(const Grid& grid, const LindbladBasis& basis,
                           const PointMultiplication& mult, double gamma,
                           const MatrixField& lambda) {
  const int g = grid.size();
  MatrixField dl = grad_x(grid, lambda);
  for (int x = 0; x < g; ++x) dl[x] = mult.apply(x, dl[x]);
  MatrixField out = div_x(grid, dl);
  for (int x = 0; x < g; ++x) {
    out[x] -= div_L(basis, mult.apply(x, grad_L(basis, lambda[x]))) / gamma;
  }
  return out;
}

MatrixField midpoint(const MatrixField& a, const MatrixField& b) {
  MatrixField out(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) out[x] = 0.5 * (a[x] + b[x]);
  return out;
}

MatrixField difference(const MatrixField& a, const MatrixField& b, double s) {
  MatrixField out(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) out[x] = s * (a[x] - b[x]);
  return out;
}

void check_field(const Grid& grid, const MatrixField& f, int n) {
  if (static_cast<int>(f.size()) != grid.size()) {
    throw DimensionError("field size does not match the grid");
  }
  for (const auto& m : f) {
    if (m.rows() != n || m.cols() != n) {
      throw DimensionError("field values differ in dimension");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int points) : g_(points) {
  if (points < 3) throw DimensionError("Grid: need at least 3 points");
  h_ = 1.0 / (points - 1);
  w_ = Eigen::VectorXd::Constant(points, h_);
  w_(0) = w_(points - 1) = 0.5 * h_;
  d_ = Eigen::MatrixXd::Zero(points, points);
  d_(0, 0) = -1.0 / h_;
  d_(0, 1) = 1.0 / h_;
  for (int i = 1; i < points - 1; ++i) {
    d_(i, i - 1) = -0.5 / h_;
    d_(i, i + 1) = 0.5 / h_;
  }
  d_(points - 1, points - 2) = -1.0 / h_;
  d_(points - 1, points - 1) = 1.0 / h_;
  const Eigen::MatrixXd hmat = w_.asDiagonal();
  div_ = -(w_.cwiseInverse().asDiagonal() * d_.transpose() * hmat);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(points, points);
  for (int i = 0; i + 1 < points; ++i) {
    k(i, i) += 1.0 / h_;
    k(i + 1, i + 1) += 1.0 / h_;
    k(i, i + 1) -= 1.0 / h_;
    k(i + 1, i) -= 1.0 / h_;
  }
  lap_ = -(w_.cwiseInverse().asDiagonal() * k);
}

MatrixField grad_x(const Grid& grid, const MatrixField& f) {
  return apply_grid(grid.gradient(), f);
}

MatrixField div_x(const Grid& grid, const MatrixField& f) {
  return apply_grid(grid.divergence(), f);
}

MatrixField laplacian_x(const Grid& grid, const MatrixField& f) {
  return apply_grid(grid.laplacian(), f);
}

double grid_inner(const Grid& grid, const MatrixField& f, const MatrixField& g) {
  if (static_cast<int>(f.size()) != grid.size() || g.size() != f.size()) {
    throw DimensionError("grid_inner: field sizes");
  }
  double s = 0.0;
  for (int x = 0; x < grid.size(); ++x) {
    s += grid.weights()(x) * hs_inner(f[x], g[x]).real();
  }
  return s;
}

double field_mass(const Grid& grid, const MatrixField& rho) {
  double s = 0.0;
  for (int x = 0; x < grid.size(); ++x) {
    s += grid.weights()(x) * rho[x].trace().real();
  }
  return s;
}

double field_entropy(const Grid& grid, const MatrixField& rho) {
  double s = 0.0;
  for (int x = 0; x < grid.size(); ++x) {
    const EigenDecomposition eig = eigh(HermitianMatrix(rho[x]).matrix());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      const double p = eig.values(i);
      if (!(p > tol::kPositive)) {
        throw DomainError("field_entropy: density is not positive definite");
      }
      s -= grid.weights()(x) * p * std::log(p);
    }
  }
  return s;
}

double field_min_eigenvalue(const MatrixField& rho) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : rho) lo = std::min(lo, min_eigenvalue(r));
  return lo;
}

void validate_density_field(const Grid& grid, const MatrixField& rho, int n) {
  check_field(grid, rho, n);
  for (std::size_t x = 0; x < rho.size(); ++x) {
    HermitianMatrix h(rho[x]);
    const double lo = min_eigenvalue(h.matrix());
    if (!(lo > tol::kPositive)) {
      std::ostringstream msg;
      msg << "density field: point " << x << " has eigenvalue " << lo;
      throw DomainError(msg.str());
    }
  }
  const double mass = field_mass(grid, rho);
  if (!(std::abs(mass - 1.0) <= tol::kTrace)) {
    std::ostringstream msg;
    msg << "density field: total mass " << mass << " differs from 1";
    throw DomainError(msg.str());
  }
}

MatrixField uniform_field(const Grid& grid, int n) {
  return MatrixField(grid.size(), ComplexMatrix::Identity(n, n) / double(n));
}

// ---------------------------------------------------------------------------
// Continuity equation

std::vector<MatrixField> continuity_residual(
    const Grid& grid, const LindbladBasis& basis,
    const std::vector<MatrixField>& rho,
    const std::vector<SpatialVelocity>& velocity, double dt, MetricKind kind) {
  if (rho.size() != velocity.size() + 1) {
    throw DimensionError("continuity_residual: need T + 1 densities and T fluxes");
  }
  if (!(dt > 0.0)) throw DomainError("continuity_residual: dt must be positive");
  const int g = grid.size();
  std::vector<MatrixField> out;
  for (std::size_t j = 0; j < velocity.size(); ++j) {
    check_field(grid, rho[j], basis.dim());
    check_field(grid, rho[j + 1], basis.dim());
    const MatrixField bar = midpoint(rho[j], rho[j + 1]);
    const PointMultiplication mult(bar, kind);
    const SpatialVelocity& vel = velocity[j];
    MatrixField r = difference(rho[j + 1], rho[j], 1.0 / dt);
    if (!vel.w.empty()) {
      MatrixField flux(g);
      for (int x = 0; x < g; ++x) flux[x] = mult.apply(x, vel.w[x]);
      const MatrixField d = div_x(grid, flux);
      for (int x = 0; x < g; ++x) r[x] += d[x];
    }
    if (!vel.v.empty()) {
      for (int x = 0; x < g; ++x) r[x] -= div_L(basis, mult.apply(x, vel.v[x]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

MatrixField continuity_update(const Grid& grid, const LindbladBasis& basis,
                              const MatrixField& rho,
                              const SpatialVelocity& velocity, double dt,
                              MetricKind kind) {
  check_field(grid, rho, basis.dim());
  const int g = grid.size();
  const PointMultiplication mult(rho, kind);
  MatrixField out = rho;
  if (!velocity.w.empty()) {
    MatrixField flux(g);
    for (int x = 0; x < g; ++x) flux[x] = mult.apply(x, velocity.w[x]);
    const MatrixField d = div_x(grid, flux);
    for (int x = 0; x < g; ++x) out[x] -= dt * d[x];
  }
  if (!velocity.v.empty()) {
    for (int x = 0; x < g; ++x) {
      out[x] += dt * div_L(basis, mult.apply(x, velocity.v[x]));
    }
  }
  return out;
}

MatrixField spatial_apply(const Grid& grid, const LindbladBasis& basis,
                          const MatrixField& rho, double gamma, MetricKind kind,
                          const MatrixField& lambda) {
  check_field(grid, rho, basis.dim());
  check_field(grid, lambda, basis.dim());
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  const PointMultiplication mult(rho, kind);
  return apply_operator(grid, basis, mult, gamma, lambda);
}

// ---------------------------------------------------------------------------
// Spatial metric

SpatialMetric::SpatialMetric(const Grid& grid, const LindbladBasis& basis,
                             const MatrixField& rho, double gamma,
                             MetricKind kind)
    : grid_(&grid), basis_(&basis), rho_(rho), gamma_(gamma), kind_(kind) {
  const int n = basis.dim();
  check_field(grid, rho, n);
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  const int g = grid.size();
  const int n2 = n * n;
  const int size = g * n2;
  const HermitianFrame& frame = frame_for(n);
  const PointMultiplication mult(rho_, kind);
  Eigen::MatrixXd s(size, size);
  MatrixField unit(g, ComplexMatrix::Zero(n, n));
  for (int y = 0; y < g; ++y) {
    const double scale = 1.0 / std::sqrt(grid.weights()(y));
    for (int k = 0; k < n2; ++k) {
      unit[y] = scale * frame.element(k);
      s.col(y * n2 + k) =
          -coordinates(apply_operator(grid, basis, mult, gamma, unit));
    }
    unit[y].setZero();
  }
  null_ = coordinates(MatrixField(g, ComplexMatrix::Identity(n, n)));
  null_.normalize();
  s = 0.5 * (s + s.transpose()).eval();
  s += null_ * null_.transpose();
  llt_.compute(s);
  if (llt_.info() != Eigen::Success) {
    throw DomainError("SpatialMetric: Poisson system is singular");
  }
}

Eigen::VectorXd SpatialMetric::coordinates(const MatrixField& f) const {
  const int n = basis_->dim();
  const int n2 = n * n;
  const HermitianFrame& frame = frame_for(n);
  Eigen::VectorXd c(grid_->size() * n2);
  for (int x = 0; x < grid_->size(); ++x) {
    c.segment(x * n2, n2) =
        std::sqrt(grid_->weights()(x)) * frame.coordinates(f[x]);
  }
  return c;
}

MatrixField SpatialMetric::compose(const Eigen::VectorXd& c) const {
  const int n = basis_->dim();
  const int n2 = n * n;
  const HermitianFrame& frame = frame_for(n);
  MatrixField f(grid_->size());
  for (int x = 0; x < grid_->size(); ++x) {
    f[x] = frame.compose(c.segment(x * n2, n2)) / std::sqrt(grid_->weights()(x));
  }
  return f;
}

MatrixField SpatialMetric::apply(const MatrixField& lambda) const {
  return spatial_apply(*grid_, *basis_, rho_, gamma_, kind_, lambda);
}

MatrixField SpatialMetric::solve(const MatrixField& delta) const {
  check_field(*grid_, delta, basis_->dim());
  return compose(llt_.solve(-coordinates(delta)));
}

double SpatialMetric::squared_norm(const MatrixField& delta) const {
  return -grid_inner(*grid_, solve(delta), delta);
}

std::pair<double, double> SpatialMetric::split_energy(
    const MatrixField& lambda) const {
  const PointMultiplication mult(rho_, kind_);
  const MatrixField dl = grad_x(*grid_, lambda);
  double spatial = 0.0;
  double matrix = 0.0;
  for (int x = 0; x < grid_->size(); ++x) {
    const double h = grid_->weights()(x);
    spatial += h * hs_inner(dl[x], mult.apply(x, dl[x])).real();
    const BlockField gl = grad_L(*basis_, lambda[x]);
    matrix += h * hs_inner(gl, mult.apply(x, gl)).real();
  }
  return {spatial, matrix / (gamma_ * gamma_)};
}

// ---------------------------------------------------------------------------
// Geodesics

double spatial_path_action(const Grid& grid, const LindbladBasis& basis,
                           double gamma, const std::vector<MatrixField>& path,
                           MetricKind kind, double* q_action, double* u_action,
                           std::vector<double>* step_energies) {
  const int t = static_cast<int>(path.size()) - 1;
  if (t < 1) throw DomainError("spatial_path_action: need two fields");
  double total = 0.0;
  double qa = 0.0;
  double ua = 0.0;
  if (step_energies) step_energies->clear();
  for (int j = 0; j < t; ++j) {
    SpatialMetric metric(grid, basis, midpoint(path[j], path[j + 1]), gamma,
                         kind);
    const MatrixField delta = difference(path[j + 1], path[j], t);
    const MatrixField lambda = metric.solve(delta);
    const double e = -grid_inner(grid, lambda, delta);
    if (step_energies) step_energies->push_back(e);
    total += e / t;
    if (q_action || u_action) {
      const auto [sp, mx] = metric.split_energy(lambda);
      qa += sp / t;
      ua += mx / t;
    }
  }
  if (q_action) *q_action = qa;
  if (u_action) *u_action = ua;
  return total;
}

OptimalityReport verify_spatial_optimality(const Grid& grid,
                                           const LindbladBasis& basis,
                                           double gamma,
                                           const std::vector<MatrixField>& path,
                                           MetricKind kind) {
  OptimalityReport out;
  const int t = static_cast<int>(path.size()) - 1;
  if (t < 2) return out;
  const int g = grid.size();
  const int n = basis.dim();
  double total_weight = grid.weights().sum();
  std::vector<MatrixField> lambda(t);
  for (int j = 0; j < t; ++j) {
    SpatialMetric metric(grid, basis, midpoint(path[j], path[j + 1]), gamma,
                         kind);
    lambda[j] = metric.solve(difference(path[j + 1], path[j], t));
  }
  const double dt = 1.0 / t;
  double hj = 0.0;
  double cont = 0.0;
  for (int j = 1; j < t; ++j) {
    const MatrixField lam = midpoint(lambda[j - 1], lambda[j]);
    const MatrixField dlam = difference(lambda[j], lambda[j - 1], t);
    const MatrixField dl = grad_x(grid, lam);
    MatrixField r(g);
    for (int x = 0; x < g; ++x) {
      const BlockField spatial({dl[x]});
      r[x] = dlam[x] -
             hamilton_jacobi_term(path[j][x], spatial, kind).matrix() -
             hamilton_jacobi_term(path[j][x], grad_L(basis, lam[x]), kind)
                     .matrix() /
                 gamma;
    }
    // Potentials are defined up to a global multiple of I at each time.
    const double shift = field_mass(grid, r) / (n * total_weight);
    for (int x = 0; x < g; ++x) r[x] -= shift * ComplexMatrix::Identity(n, n);
    const MatrixField a = spatial_apply(grid, basis, path[j], gamma, kind, lam);
    MatrixField c = difference(path[j + 1], path[j - 1], 0.5 * t);
    for (int x = 0; x < g; ++x) c[x] -= a[x];
    double rn = 0.0;
    double cn = 0.0;
    for (int x = 0; x < g; ++x) {
      rn += grid.weights()(x) * r[x].squaredNorm();
      cn += grid.weights()(x) * c[x].squaredNorm();
    }
    hj += dt * rn;
    cont += dt * cn;
    out.hj_max = std::max(out.hj_max, std::sqrt(rn));
    out.continuity_max = std::max(out.continuity_max, std::sqrt(cn));
  }
  out.hj_l2 = std::sqrt(hj);
  out.continuity_l2 = std::sqrt(cont);
  return out;
}

SpatialGeodesicResult solve_spatial_geodesic(
    const Grid& grid, const LindbladBasis& basis, const MatrixField& rho0,
    const MatrixField& rho1, double gamma, int steps, MetricKind kind,
    const GeodesicOptions& options) {
  const int n = basis.dim();
  validate_density_field(grid, rho0, n);
  validate_density_field(grid, rho1, n);
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (steps < 1) throw DomainError("steps must be positive");
  const auto start = std::chrono::steady_clock::now();
  const int g = grid.size();
  SpatialGeodesicResult out;
  SolveReport& r = out.report.base;

  if (kind == MetricKind::AntiCommutator) {
    ConicProblem problem;
    problem.n = n;
    problem.ops = basis.ops();
    problem.steps = steps;
    problem.weights = grid.weights();
    problem.divergence = grid.divergence();
    problem.gamma = gamma;
    problem.rho0 = rho0;
    problem.rho1 = rho1;
    const ConicSolution sol = solve_conic(problem, options.conic);
    out.densities = sol.rho;
    r.backend = "conic";
    r.objective = sol.objective;
    r.iterations = sol.iterations;
    r.primal_residual = sol.primal_residual;
    r.dual_residual = sol.dual_residual;
    r.epigraph_gap = sol.epigraph_gap;
  } else {
    const HermitianFrame& frame = frame_for(n);
    const int n2 = n * n;
    detail::PathModel<MatrixField> model;
    model.interior = steps - 1;
    model.params_per_node = g * n2;
    model.first = rho0;
    model.last = rho1;
    model.decode = [&](const double* c) {
      std::vector<EigenDecomposition> eig;
      double top = -std::numeric_limits<double>::infinity();
      for (int x = 0; x < g; ++x) {
        eig.push_back(eigh(frame.compose(
            Eigen::Map<const Eigen::VectorXd>(c + x * n2, n2))));
        top = std::max(top, eig.back().values.maxCoeff());
      }
      MatrixField f(g);
      double mass = 0.0;
      for (int x = 0; x < g; ++x) {
        const Eigen::VectorXd w = (eig[x].values.array() - top).exp();
        f[x] = eig[x].vectors * w.cast<cplx>().asDiagonal() *
               eig[x].vectors.adjoint();
        mass += grid.weights()(x) * w.sum();
      }
      for (auto& m : f) m /= mass;
      return f;
    };
    model.step_energy = [&](const MatrixField& a, const MatrixField& b) {
      SpatialMetric metric(grid, basis, midpoint(a, b), gamma, kind);
      return steps * metric.squared_norm(difference(b, a, 1.0));
    };
    std::vector<double> init;
    for (int j = 1; j < steps; ++j) {
      const double t = static_cast<double>(j) / steps;
      for (int x = 0; x < g; ++x) {
        const ComplexMatrix lin = (1 - t) * rho0[x] + t * rho1[x];
        const Eigen::VectorXd c = frame.coordinates(matrix_log(lin));
        init.insert(init.end(), c.data(), c.data() + n2);
      }
    }
    detail::PathOptimizerOptions popts;
    popts.fd_step = options.fd_step;
    popts.max_iterations = options.max_iterations;
    popts.function_tolerance = options.function_tolerance;
    popts.gradient_tolerance = options.gradient_tolerance;
    const auto res = detail::optimize_path(model, init, popts);
    out.densities.push_back(rho0);
    for (int j = 0; j < model.interior; ++j) {
      out.densities.push_back(model.decode(res.params.data() + j * g * n2));
    }
    out.densities.push_back(rho1);
    r.backend = "direct";
    r.objective = res.energy;
    r.iterations = res.iterations;
    r.gradient_max = res.gradient_max;
  }
  for (std::size_t j = 0; j < out.densities.size(); ++j) {
    const double lo = field_min_eigenvalue(out.densities[j]);
    if (!(lo > tol::kPositive)) {
      std::ostringstream msg;
      msg << "spatial geodesic: node " << j << " lost positivity (" << lo << ")";
      throw ConvergenceError(msg.str());
    }
  }
  r.action = spatial_path_action(grid, basis, gamma, out.densities, kind,
                                 &out.report.q_action, &out.report.u_action,
                                 &r.step_energies);
  r.distance = std::sqrt(std::max(0.0, r.action));
  r.optimality =
      verify_spatial_optimality(grid, basis, gamma, out.densities, kind);
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

// ---------------------------------------------------------------------------
// Flows

SpatialFlowTrace spatial_entropy_flow(const Grid& grid,
                                      const LindbladBasis& basis,
                                      const MatrixField& rho0, double gamma,
                                      MetricKind kind, double t_final,
                                      double dt, int stride) {
  const int n = basis.dim();
  validate_density_field(grid, rho0, n);
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(dt > 0.0)) throw DomainError("flow: dt must be positive");
  if (!(t_final >= 0.0)) throw DomainError("flow: t_final must be nonnegative");
  if (stride < 1) throw DomainError("flow: stride must be positive");
  const int g = grid.size();
  detail::GuardedRk4 rk;
  if (kind == MetricKind::Logarithmic) {
    rk.rhs = [&](const detail::MatrixList& f) {
      MatrixField out = laplacian_x(grid, f);
      for (int x = 0; x < g; ++x) out[x] += laplacian_L(basis, f[x]) / gamma;
      return out;
    };
  } else {
    rk.rhs = [&](const detail::MatrixList& f) {
      MatrixField log_rho(g);
      for (int x = 0; x < g; ++x) log_rho[x] = matrix_log(f[x], kLogFloor).matrix();
      return spatial_apply(grid, basis, f, gamma, kind, log_rho);
    };
  }
  const int steps = static_cast<int>(std::ceil(t_final / dt - 1e-9));
  const double h = steps > 0 ? t_final / steps : 0.0;
  SpatialFlowTrace trace;
  trace.min_entropy_increment = std::numeric_limits<double>::infinity();
  const double mass0 = field_mass(grid, rho0);
  auto record = [&](double t, const MatrixField& f, double ent) {
    trace.times.push_back(t);
    trace.states.push_back(f);
    trace.entropies.push_back(ent);
    trace.min_eigenvalues.push_back(field_min_eigenvalue(f));
    trace.mass_drift.push_back(std::abs(field_mass(grid, f) - mass0));
  };
  MatrixField state = rho0;
  double ent = field_entropy(grid, state);
  record(0.0, state, ent);
  for (int k = 1; k <= steps; ++k) {
    try {
      state = rk.step(state, h);
    } catch (const PositivityError& e) {
      std::ostringstream msg;
      msg << "spatial flow step " << k << " (t = " << (k - 1) * h
          << "): " << e.what();
      throw PositivityError(msg.str(), k);
    }
    const double e_next = field_entropy(grid, state);
    trace.min_entropy_increment =
        std::min(trace.min_entropy_increment, e_next - ent);
    ent = e_next;
    if (k % stride == 0 || k == steps) record(k * h, state, ent);
  }
  return trace;
}

ComplexMatrix spatial_heat_superoperator(const Grid& grid,
                                         const LindbladBasis& basis,
                                         double gamma) {
  const int n2 = basis.dim() * basis.dim();
  const int g = grid.size();
  const ComplexMatrix local = laplacian_superoperator(basis).matrix / gamma;
  ComplexMatrix s = ComplexMatrix::Zero(g * n2, g * n2);
  for (int x = 0; x < g; ++x) {
    s.block(x * n2, x * n2, n2, n2) += local;
    for (int y = 0; y < g; ++y) {
      const double l = grid.laplacian()(x, y);
      if (l == 0.0) continue;
      s.block(x * n2, y * n2, n2, n2).diagonal().array() += l;
    }
  }
  return s;
}

MatrixField spatial_heat_exact(const Grid& grid, const LindbladBasis& basis,
                               double gamma, const MatrixField& rho0, double t) {
  const int n = basis.dim();
  const int n2 = n * n;
  const int g = grid.size();
  check_field(grid, rho0, n);
  if (!(t >= 0.0)) throw DomainError("spatial_heat_exact: t must be nonnegative");
  const ComplexMatrix prop =
      (t * spatial_heat_superoperator(grid, basis, gamma)).exp();
  Eigen::VectorXcd v(g * n2);
  for (int x = 0; x < g; ++x) v.segment(x * n2, n2) = vec(rho0[x]);
  const Eigen::VectorXcd r = prop * v;
  MatrixField out(g);
  for (int x = 0; x < g; ++x) {
    out[x] = HermitianMatrix::symmetrize(unvec(r.segment(x * n2, n2), n)).matrix();
  }
  return out;
}

}  // namespace qot
