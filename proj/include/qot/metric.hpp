#pragma once

// Poisson solves identifying tangent vectors with potentials, and the two
// Riemannian inner products on strictly positive density matrices.

#include <optional>
#include <string>

#include "qot/herm.hpp"
#include "qot/lindblad.hpp"

namespace qot {

enum class MetricKind { AntiCommutator, Logarithmic };

/// "anticomm" / "log".
std::string to_string(MetricKind kind);
MetricKind parse_metric_kind(const std::string& name);

/// Traceless representative of the potential lambda.
struct Potential {
  HermitianMatrix lambda;
};

/// Apply the multiplication M_rho of the given geometry.
BlockField multiply(const ComplexMatrix& rho, const BlockField& v,
                    MetricKind kind);

/// The operator A_rho(lambda) = -div_L M_rho(grad_L lambda) at a fixed rho,
/// with its matrix in orthonormal traceless coordinates factorized once.
///
/// A_rho is negative definite on traceless Hermitians; `stiffness()` returns
/// the matrix of -A_rho, which is symmetric positive definite.
class MetricOperator {
 public:
  MetricOperator(const LindbladBasis& basis, const ComplexMatrix& rho,
                 MetricKind kind);

  MetricKind kind() const { return kind_; }
  int dim() const { return basis_->dim(); }

  BlockField multiply(const BlockField& v) const;
  ComplexMatrix apply(const ComplexMatrix& lambda) const;
  const Eigen::MatrixXd& stiffness() const { return stiffness_; }

  /// Traceless lambda with apply(lambda) = delta. delta must be traceless.
  ComplexMatrix solve(const ComplexMatrix& delta) const;

  /// <delta, delta>_rho = -tr(lambda delta), using a previously solved lambda.
  double squared_norm(const ComplexMatrix& delta) const;

 private:
  const LindbladBasis* basis_;
  ComplexMatrix rho_;
  MetricKind kind_;
  std::optional<KuboMoriKernel> kernel_;
  Eigen::MatrixXd stiffness_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

Potential poisson_solve(const LindbladBasis& basis, const DensityMatrix& rho,
                        const TangentVector& delta, MetricKind kind);

/// AntiCommutator: Re tr(rho sum_k G1_k* G2_k); Logarithmic:
/// <G1, M_rho(G2)>, with G_i = grad_L lambda_i.
double inner_product(const LindbladBasis& basis, const DensityMatrix& rho,
                     const TangentVector& d1, const TangentVector& d2,
                     MetricKind kind);

/// v = -grad_L lambda; satisfies delta = div_L M_rho(v).
BlockField min_norm_velocity(const LindbladBasis& basis,
                             const DensityMatrix& rho,
                             const TangentVector& delta, MetricKind kind);

/// Kinetic energy <v, M_rho(v)> of a velocity field.
double velocity_action(const ComplexMatrix& rho, const BlockField& v,
                       MetricKind kind);

/// Residual-free continuity image div_L M_rho(v).
ComplexMatrix continuity_image(const LindbladBasis& basis,
                               const ComplexMatrix& rho, const BlockField& v,
                               MetricKind kind);

/// (Lambda(a, p) - Lambda(b, p)) / (a - b), falling back to the derivative at
/// the midpoint when a and b are within 1e-5 relative of each other.
double log_mean_divided_difference(double a, double b, double p);

/// Right-hand side of the Hamilton-Jacobi equation for the potential:
/// lambda' = (1/2) d/drho <G, M_rho G> with G = grad_L lambda, i.e.
/// (1/2) sum_k G_k* G_k for the anticommutator geometry and its Kubo-Mori
/// counterpart (evaluated in the eigenbasis of rho) otherwise.
HermitianMatrix hamilton_jacobi_rhs(const LindbladBasis& basis,
                                    const ComplexMatrix& rho,
                                    const ComplexMatrix& lambda,
                                    MetricKind kind);

/// (1/2) d/drho <G, M_rho G> for a field G whose blocks are all Hermitian or
/// all skew-Hermitian.
HermitianMatrix hamilton_jacobi_term(const ComplexMatrix& rho,
                                     const BlockField& g, MetricKind kind);

/// Cached orthonormal frame for dimension n.
const HermitianFrame& frame_for(int n);

}  // namespace qot
