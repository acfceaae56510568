#pragma once

// Distances and geodesics between density matrices: a convex splitting
// backend for the anticommutator geometry, a direct geodesic-energy backend
// for both geometries, and discrete optimality residuals.

#include <string>
#include <vector>

#include "qot/conic.hpp"
#include "qot/lindblad.hpp"
#include "qot/metric.hpp"

namespace qot {

struct GeodesicOptions {
  ConicOptions conic;
  // direct backend
  /// Exact energy gradients followed by Newton steps; false selects central
  /// finite differences with step fd_step throughout.
  bool exact_gradient = true;
  double fd_step = 1e-5;
  int max_iterations = 5000;
  double function_tolerance = 1e-15;
  double gradient_tolerance = 1e-11;
};

/// Time-staggered path: densities at t_j = j/T, and per step the
/// skew-Hermitian flux blocks m_j with rho_{j+1} - rho_j = dt div_L(m_j).
struct DiscretePath {
  MetricKind kind = MetricKind::AntiCommutator;
  std::vector<DensityMatrix> densities;
  std::vector<BlockField> momenta;

  int steps() const { return static_cast<int>(densities.size()) - 1; }
};

struct OptimalityReport {
  double hj_l2 = 0.0;
  double hj_max = 0.0;
  double continuity_l2 = 0.0;
  double continuity_max = 0.0;
};

struct SolveReport {
  std::string backend;
  double distance = 0.0;
  /// Discrete action T sum_j <drho_j, drho_j>_{rho_bar_j} of the returned path.
  double action = 0.0;
  /// Value of the backend's own objective.
  double objective = 0.0;
  long iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double epigraph_gap = 0.0;
  double gradient_max = 0.0;
  /// Squared speed T^2 <drho_j, drho_j> per step; constant on a geodesic.
  std::vector<double> step_energies;
  OptimalityReport optimality;
  double wall_seconds = 0.0;
};

struct GeodesicResult {
  DiscretePath path;
  SolveReport report;
};

/// T sum_j <rho_{j+1} - rho_j, rho_{j+1} - rho_j>_{rho_bar_j}.
double path_action(const LindbladBasis& basis,
                   const std::vector<ComplexMatrix>& densities,
                   MetricKind kind,
                   std::vector<double>* step_energies = nullptr);

GeodesicResult solve_w2a_conic(const LindbladBasis& basis,
                               const DensityMatrix& rho0,
                               const DensityMatrix& rho1, int steps,
                               const GeodesicOptions& options = {});

GeodesicResult solve_w2_direct(const LindbladBasis& basis,
                               const DensityMatrix& rho0,
                               const DensityMatrix& rho1, int steps,
                               MetricKind kind,
                               const GeodesicOptions& options = {});

/// Residuals of the Hamilton-Jacobi and continuity equations at interior
/// nodes, with potentials recovered from the per-step Poisson problems.
/// Norms are the discrete L2 norm sqrt(dt sum_j ||r_j||^2) and the max.
OptimalityReport verify_optimality(const LindbladBasis& basis,
                                   const DiscretePath& path);

}  // namespace qot
