#pragma once

// Operator-splitting solver for the convex (Schur-complement) form of the
// anticommutator transport problem, optionally with a 1-D spatial channel.
//
// Per time step j and grid point x there is one Hermitian 2n x 2n block
//   [[rho_bar, B], [B*, S]] >= 0
// for every basis element (B = u_k) and, in the spatial case, one more for
// the spatial momentum (B = q). The affine set ties every A-part to the
// midpoint density and enforces the discrete continuity equation
//   rho_{j+1} - rho_j = dt [ sum_k [L_k, (u_k - u_k*)/2] - div (q + q*)/2 ].

#include <vector>

#include "qot/herm.hpp"

namespace qot {

struct ConicProblem {
  int n = 0;
  std::vector<ComplexMatrix> ops;  // L_1..L_N
  int steps = 0;                   // T
  /// Quadrature weight per grid point; a single weight 1 for the matrix-only
  /// problem.
  Eigen::VectorXd weights;
  /// G x G divergence matrix, empty for the matrix-only problem.
  Eigen::MatrixXd divergence;
  double gamma = 1.0;
  std::vector<ComplexMatrix> rho0;  // per grid point
  std::vector<ComplexMatrix> rho1;
};

struct ConicOptions {
  long max_iterations = 50000;
  /// Bound on the per-block RMS primal and dual residuals.
  double tolerance = 1e-6;
  double relaxation = 1.6;
  double sigma = 1.0;
  int adapt_interval = 25;
};

struct ConicSolution {
  std::vector<std::vector<ComplexMatrix>> rho;  // [j][x], j = 0..T
  std::vector<std::vector<BlockField>> u;       // [j][x], j = 0..T-1
  std::vector<std::vector<ComplexMatrix>> q;    // [j][x], spatial only
  long iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// sum of weighted tr(S) over the PSD iterate.
  double objective = 0.0;
  /// max over blocks of tr(S) - tr(B* A^-1 B) on the PSD iterate.
  double epigraph_gap = 0.0;
};

/// Throws ConvergenceError when the iteration cap is reached.
ConicSolution solve_conic(const ConicProblem& problem,
                          const ConicOptions& options = {});

}  // namespace qot
