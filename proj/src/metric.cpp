#include "qot/metric.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace qot {

std::string to_string(MetricKind kind) {
  return kind == MetricKind::AntiCommutator ? "anticomm" : "log";
}

MetricKind parse_metric_kind(const std::string& name) {
  if (name == "anticomm") return MetricKind::AntiCommutator;
  if (name == "log") return MetricKind::Logarithmic;
  throw DomainError("unknown metric kind '" + name +
                    "' (expected anticomm or log)");
}

const HermitianFrame& frame_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<HermitianFrame>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<HermitianFrame>(n);
  return *slot;
}

BlockField multiply(const ComplexMatrix& rho, const BlockField& v,
                    MetricKind kind) {
  if (kind == MetricKind::AntiCommutator) return mult_anticomm(rho, v);
  return mult_kubo_mori(rho, v);
}

MetricOperator::MetricOperator(const LindbladBasis& basis,
                               const ComplexMatrix& rho, MetricKind kind)
    : basis_(&basis), rho_(rho), kind_(kind) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim()) {
    throw DimensionError("MetricOperator: rho and basis differ in dimension");
  }
  if (kind == MetricKind::Logarithmic) {
    kernel_.emplace(rho);
  } else {
    const double lo = min_eigenvalue(rho);
    if (!(lo > tol::kPositive)) {
      std::ostringstream msg;
      msg << "MetricOperator: rho is not positive definite (min eigenvalue "
          << lo << ")";
      throw DomainError(msg.str());
    }
  }
  const int n = basis.dim();
  const int m = n * n - 1;
  const HermitianFrame& frame = frame_for(n);
  stiffness_.resize(m, m);
  for (int i = 0; i < m; ++i) {
    stiffness_.col(i) = -frame.traceless_coordinates(apply(frame.element(i + 1)));
  }
  stiffness_ = 0.5 * (stiffness_ + stiffness_.transpose()).eval();
  if (m > 0) {
    llt_.compute(stiffness_);
    if (llt_.info() != Eigen::Success) {
      throw DomainError(
          "MetricOperator: Poisson system is singular (invalid basis?)");
    }
  }
}

BlockField MetricOperator::multiply(const BlockField& v) const {
  if (kernel_) return kernel_->apply(v);
  return mult_anticomm(rho_, v);
}

ComplexMatrix MetricOperator::apply(const ComplexMatrix& lambda) const {
  return -div_L(*basis_, multiply(grad_L(*basis_, lambda)));
}

ComplexMatrix MetricOperator::solve(const ComplexMatrix& delta) const {
  const int n = dim();
  if (delta.rows() != n || delta.cols() != n) {
    throw DimensionError("poisson: delta dimension");
  }
  if (n == 1) return ComplexMatrix::Zero(1, 1);
  const HermitianFrame& frame = frame_for(n);
  const Eigen::VectorXd c = llt_.solve(-frame.traceless_coordinates(delta));
  return frame.compose_traceless(c);
}

double MetricOperator::squared_norm(const ComplexMatrix& delta) const {
  return -hs_inner(solve(delta), delta).real();
}

Potential poisson_solve(const LindbladBasis& basis, const DensityMatrix& rho,
                        const TangentVector& delta, MetricKind kind) {
  MetricOperator op(basis, rho, kind);
  return Potential{HermitianMatrix::symmetrize(op.solve(delta))};
}

double inner_product(const LindbladBasis& basis, const DensityMatrix& rho,
                     const TangentVector& d1, const TangentVector& d2,
                     MetricKind kind) {
  MetricOperator op(basis, rho, kind);
  const BlockField g1 = grad_L(basis, op.solve(d1));
  const BlockField g2 = grad_L(basis, op.solve(d2));
  if (kind == MetricKind::AntiCommutator) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < g1.size(); ++k) {
      s += hs_inner(g1[k], g2[k] * rho.matrix());
    }
    return s.real();
  }
  return hs_inner(g1, op.multiply(g2)).real();
}

BlockField min_norm_velocity(const LindbladBasis& basis,
                             const DensityMatrix& rho,
                             const TangentVector& delta, MetricKind kind) {
  MetricOperator op(basis, rho, kind);
  return -1.0 * grad_L(basis, op.solve(delta));
}

double velocity_action(const ComplexMatrix& rho, const BlockField& v,
                       MetricKind kind) {
  return hs_inner(v, multiply(rho, v, kind)).real();
}

ComplexMatrix continuity_image(const LindbladBasis& basis,
                               const ComplexMatrix& rho, const BlockField& v,
                               MetricKind kind) {
  return div_L(basis, multiply(rho, v, kind));
}

double log_mean_divided_difference(double a, double b, double p) {
  if (std::abs(a - b) < 1e-5 * std::max(a, b)) {
    return log_mean_derivative(0.5 * (a + b), p);
  }
  return (log_mean(a, p) - log_mean(b, p)) / (a - b);
}

HermitianMatrix hamilton_jacobi_term(const ComplexMatrix& rho,
                                     const BlockField& g, MetricKind kind) {
  const int n = static_cast<int>(rho.rows());
  if (kind == MetricKind::AntiCommutator) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (const auto& b : g.blocks) out += 0.5 * b.adjoint() * b;
    return HermitianMatrix::symmetrize(out);
  }
  const KuboMoriKernel kernel(rho);
  const Eigen::VectorXd& p = kernel.eig().values;
  const ComplexMatrix& u = kernel.eig().vectors;
  // dd[m](i, j) = Lambda^[1]_m(p_i, p_j)
  std::vector<Eigen::MatrixXd> dd(n, Eigen::MatrixXd(n, n));
  for (int m = 0; m < n; ++m) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        dd[m](i, j) = log_mean_divided_difference(p(i), p(j), p(m));
      }
    }
  }
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& b : g.blocks) {
    const ComplexMatrix gt = u.adjoint() * b * u;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int m = 0; m < n; ++m) {
          s += std::conj(gt(m, i)) * gt(m, j) * dd[m](i, j);
        }
        out(i, j) += s;
      }
    }
  }
  return HermitianMatrix::symmetrize(u * out * u.adjoint());
}

HermitianMatrix hamilton_jacobi_rhs(const LindbladBasis& basis,
                                    const ComplexMatrix& rho,
                                    const ComplexMatrix& lambda,
                                    MetricKind kind) {
  return hamilton_jacobi_term(rho, grad_L(basis, lambda), kind);
}

}  // namespace qot
