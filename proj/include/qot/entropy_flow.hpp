#pragma once

// von Neumann entropy and its gradient flows in both geometries.

#include <functional>
#include <vector>

#include "qot/lindblad.hpp"
#include "qot/metric.hpp"

namespace qot {

/// -tr(rho log rho).
double entropy(const ComplexMatrix& rho);

/// Multiplication handle M_rho(v).
using Multiplication =
    std::function<BlockField(const ComplexMatrix& rho, const BlockField& v)>;

Multiplication multiplication_for(MetricKind kind);

/// -div_L M_rho(grad_L log rho). Throws DomainError when rho has an
/// eigenvalue below 10 * kPositive.
ComplexMatrix entropy_flow_rhs(const LindbladBasis& basis,
                               const ComplexMatrix& rho,
                               const Multiplication& mult);

/// One RK4 step of rho' = -div_L M_rho(grad_L log rho), halving dt locally
/// (up to 20 times) when positivity is lost.
DensityMatrix flow_step_generic(const LindbladBasis& basis,
                                const DensityMatrix& rho, double dt,
                                const Multiplication& mult);

/// One RK4 step of rho' = Delta_L rho.
DensityMatrix heat_step(const LindbladBasis& basis, const DensityMatrix& rho,
                        double dt);

struct FlowTrace {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> entropies;
  std::vector<double> min_eigenvalues;
  std::vector<double> trace_drift;
  /// Smallest entropy increment over all steps (not only recorded ones).
  double min_entropy_increment = 0.0;
};

/// States are recorded every `stride` steps and at t_final.
FlowTrace flow_anticomm(const LindbladBasis& basis, const DensityMatrix& rho0,
                        double t_final, double dt, int stride = 1);
FlowTrace flow_log(const LindbladBasis& basis, const DensityMatrix& rho0,
                   double t_final, double dt, int stride = 1);

}  // namespace qot
