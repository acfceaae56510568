#include "qot/entropy_flow.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rk4.hpp"

namespace qot {

namespace {

constexpr double kLogFloor = 10.0 * tol::kPositive;

int step_count(double t_final, double dt) {
  if (!(dt > 0.0)) throw DomainError("flow: dt must be positive");
  if (!(t_final >= 0.0)) throw DomainError("flow: t_final must be nonnegative");
  return static_cast<int>(std::ceil(t_final / dt - 1e-9));
}

FlowTrace run_flow(const DensityMatrix& rho0, double t_final, double dt,
                   int stride, const detail::GuardedRk4& rk) {
  if (stride < 1) throw DomainError("flow: stride must be positive");
  const int steps = step_count(t_final, dt);
  const double h = steps > 0 ? t_final / steps : 0.0;
  FlowTrace trace;
  trace.min_entropy_increment = std::numeric_limits<double>::infinity();
  auto record = [&trace](double t, const DensityMatrix& s, double ent) {
    trace.times.push_back(t);
    trace.states.push_back(s);
    trace.entropies.push_back(ent);
    trace.min_eigenvalues.push_back(s.min_eigenvalue());
    trace.trace_drift.push_back(std::abs(s.hermitian().trace() - 1.0));
  };
  DensityMatrix state = rho0;
  double ent = entropy(state);
  record(0.0, state, ent);
  for (int k = 1; k <= steps; ++k) {
    detail::MatrixList next;
    try {
      next = rk.step({state.matrix()}, h);
    } catch (const PositivityError& e) {
      std::ostringstream msg;
      msg << "flow step " << k << " (t = " << (k - 1) * h << "): " << e.what();
      throw PositivityError(msg.str(), k);
    }
    state = DensityMatrix(HermitianMatrix::symmetrize(next[0]));
    const double e_next = entropy(state);
    trace.min_entropy_increment =
        std::min(trace.min_entropy_increment, e_next - ent);
    ent = e_next;
    if (k % stride == 0 || k == steps) record(k * h, state, ent);
  }
  return trace;
}

}  // namespace

double entropy(const ComplexMatrix& rho) {
  const EigenDecomposition eig = eigh(HermitianMatrix(rho).matrix());
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double p = eig.values(i);
    if (!(p > tol::kPositive)) {
      throw DomainError("entropy: density is not positive definite");
    }
    s -= p * std::log(p);
  }
  return s;
}

Multiplication multiplication_for(MetricKind kind) {
  if (kind == MetricKind::AntiCommutator) return mult_anticomm;
  return mult_kubo_mori;
}

ComplexMatrix entropy_flow_rhs(const LindbladBasis& basis,
                               const ComplexMatrix& rho,
                               const Multiplication& mult) {
  const HermitianMatrix h = HermitianMatrix::symmetrize(rho);
  const HermitianMatrix log_rho = matrix_log(h.matrix(), kLogFloor);
  return -div_L(basis, mult(h.matrix(), grad_L(basis, log_rho.matrix())));
}

DensityMatrix flow_step_generic(const LindbladBasis& basis,
                                const DensityMatrix& rho, double dt,
                                const Multiplication& mult) {
  if (!(dt > 0.0)) throw DomainError("flow_step_generic: dt must be positive");
  detail::GuardedRk4 rk;
  rk.rhs = [&](const detail::MatrixList& x) {
    return detail::MatrixList{entropy_flow_rhs(basis, x[0], mult)};
  };
  const auto next = rk.step({rho.matrix()}, dt);
  return DensityMatrix(HermitianMatrix::symmetrize(next[0]));
}

DensityMatrix heat_step(const LindbladBasis& basis, const DensityMatrix& rho,
                        double dt) {
  if (!(dt > 0.0)) throw DomainError("heat_step: dt must be positive");
  detail::GuardedRk4 rk;
  rk.rhs = [&](const detail::MatrixList& x) {
    return detail::MatrixList{laplacian_L(basis, x[0])};
  };
  const auto next = rk.step({rho.matrix()}, dt);
  return DensityMatrix(HermitianMatrix::symmetrize(next[0]));
}

FlowTrace flow_anticomm(const LindbladBasis& basis, const DensityMatrix& rho0,
                        double t_final, double dt, int stride) {
  if (rho0.dim() != basis.dim()) throw DimensionError("flow: dimensions");
  detail::GuardedRk4 rk;
  const Multiplication mult = mult_anticomm;
  rk.rhs = [&](const detail::MatrixList& x) {
    return detail::MatrixList{entropy_flow_rhs(basis, x[0], mult)};
  };
  return run_flow(rho0, t_final, dt, stride, rk);
}

FlowTrace flow_log(const LindbladBasis& basis, const DensityMatrix& rho0,
                   double t_final, double dt, int stride) {
  if (rho0.dim() != basis.dim()) throw DimensionError("flow: dimensions");
  detail::GuardedRk4 rk;
  rk.rhs = [&](const detail::MatrixList& x) {
    return detail::MatrixList{laplacian_L(basis, x[0])};
  };
  return run_flow(rho0, t_final, dt, stride, rk);
}

}  // namespace qot
