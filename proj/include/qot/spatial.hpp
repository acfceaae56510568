#pragma once

// Matrix-valued densities on a uniform vertex grid over E = [0, 1] with
// zero-flux boundaries: grid operators, the combined spatial / commutator
// continuity equation, transport distances and entropy flows.

#include <vector>

#include "qot/geodesic.hpp"
#include "qot/lindblad.hpp"
#include "qot/metric.hpp"

namespace qot {

/// One Hermitian matrix per grid point.
using MatrixField = std::vector<ComplexMatrix>;

/// Vertices x_i = i / (G - 1) with trapezoid weights H = h diag(1/2, 1, ..., 1/2).
///
/// gradient(): centered differences inside, one-sided at the ends
/// (D = H^-1 Q with Q + Q^T = diag(-1, 0, ..., 0, 1)).
/// divergence(): -H^-1 D^T H, the exact negative H-adjoint of D; it carries
/// the zero-flux closure.
/// laplacian(): compact three-point Neumann Laplacian -H^-1 K.
class Grid {
 public:
  explicit Grid(int points);

  int size() const { return g_; }
  double spacing() const { return h_; }
  double x(int i) const { return i * h_; }
  const Eigen::VectorXd& weights() const { return w_; }
  const Eigen::MatrixXd& gradient() const { return d_; }
  const Eigen::MatrixXd& divergence() const { return div_; }
  const Eigen::MatrixXd& laplacian() const { return lap_; }

 private:
  int g_;
  double h_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd d_, div_, lap_;
};

MatrixField grad_x(const Grid& grid, const MatrixField& f);
MatrixField div_x(const Grid& grid, const MatrixField& f);
MatrixField laplacian_x(const Grid& grid, const MatrixField& f);

/// sum_x H_x Re tr(f(x)* g(x)).
double grid_inner(const Grid& grid, const MatrixField& f, const MatrixField& g);
/// sum_x H_x tr rho(x).
double field_mass(const Grid& grid, const MatrixField& rho);
/// -sum_x H_x tr(rho log rho).
double field_entropy(const Grid& grid, const MatrixField& rho);
double field_min_eigenvalue(const MatrixField& rho);
/// Checks dimensions, positive definiteness and unit mass.
void validate_density_field(const Grid& grid, const MatrixField& rho, int n);
/// I / n at every point.
MatrixField uniform_field(const Grid& grid, int n);

/// Flux of one time step: w per grid point (Hermitian) and v per grid point
/// (skew-Hermitian blocks).
struct SpatialVelocity {
  MatrixField w;
  std::vector<BlockField> v;
};

/// drho/dt + div_x M(w) - div_L M(v) at every (step, point), evaluated with
/// forward differences in time (step dt) and M taken at the midpoint density.
std::vector<MatrixField> continuity_residual(
    const Grid& grid, const LindbladBasis& basis,
    const std::vector<MatrixField>& rho,
    const std::vector<SpatialVelocity>& velocity, double dt, MetricKind kind);

/// rho + dt (-div_x M_rho(w) + div_L M_rho(v)).
MatrixField continuity_update(const Grid& grid, const LindbladBasis& basis,
                              const MatrixField& rho,
                              const SpatialVelocity& velocity, double dt,
                              MetricKind kind);

/// A(lambda) = div_x M_rho(D lambda) - (1/gamma) div_L M_rho(grad_L lambda).
MatrixField spatial_apply(const Grid& grid, const LindbladBasis& basis,
                          const MatrixField& rho, double gamma, MetricKind kind,
                          const MatrixField& lambda);

/// Poisson operator of the spatial metric at a fixed density field,
/// factorized in H-weighted orthonormal coordinates. The constant field I
/// spans its kernel; potentials are normalized to sum_x H_x tr lambda = 0.
class SpatialMetric {
 public:
  SpatialMetric(const Grid& grid, const LindbladBasis& basis,
                const MatrixField& rho, double gamma, MetricKind kind);

  MatrixField apply(const MatrixField& lambda) const;
  /// delta must have zero mass.
  MatrixField solve(const MatrixField& delta) const;
  double squared_norm(const MatrixField& delta) const;

  /// Spatial and commutator parts of -<lambda, A lambda>:
  /// sum H <D lambda, M D lambda> and (1/gamma^2) sum H <grad lambda, M grad lambda>.
  std::pair<double, double> split_energy(const MatrixField& lambda) const;

 private:
  Eigen::VectorXd coordinates(const MatrixField& f) const;
  MatrixField compose(const Eigen::VectorXd& c) const;

  const Grid* grid_;
  const LindbladBasis* basis_;
  MatrixField rho_;
  double gamma_;
  MetricKind kind_;
  Eigen::VectorXd null_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct SpatialReport {
  SolveReport base;
  /// sum_j dt sum_x H_x tr(q* rho_bar^-1 q)
  double q_action = 0.0;
  /// sum_j dt sum_x H_x tr(u* rho_bar^-1 u), not weighted by gamma
  double u_action = 0.0;
};

struct SpatialGeodesicResult {
  std::vector<MatrixField> densities;  // T + 1 fields
  SpatialReport report;
};

/// T sum_j |rho_{j+1} - rho_j|^2 in the spatial metric at the midpoint.
double spatial_path_action(const Grid& grid, const LindbladBasis& basis,
                           double gamma, const std::vector<MatrixField>& path,
                           MetricKind kind, double* q_action = nullptr,
                           double* u_action = nullptr,
                           std::vector<double>* step_energies = nullptr);

/// Anticommutator geometry uses the conic backend, the logarithmic geometry
/// the direct path optimizer.
SpatialGeodesicResult solve_spatial_geodesic(
    const Grid& grid, const LindbladBasis& basis, const MatrixField& rho0,
    const MatrixField& rho1, double gamma, int steps, MetricKind kind,
    const GeodesicOptions& options = {});

OptimalityReport verify_spatial_optimality(const Grid& grid,
                                           const LindbladBasis& basis,
                                           double gamma,
                                           const std::vector<MatrixField>& path,
                                           MetricKind kind);

struct SpatialFlowTrace {
  std::vector<double> times;
  std::vector<MatrixField> states;
  std::vector<double> entropies;
  std::vector<double> min_eigenvalues;
  std::vector<double> mass_drift;
  double min_entropy_increment = 0.0;
};

/// Logarithmic: rho' = Delta_L rho / gamma + Delta_x rho.
/// Anticommutator: rho' = A_rho(log rho).
SpatialFlowTrace spatial_entropy_flow(const Grid& grid,
                                      const LindbladBasis& basis,
                                      const MatrixField& rho0, double gamma,
                                      MetricKind kind, double t_final,
                                      double dt, int stride = 1);

/// (G n^2) x (G n^2) matrix of Delta_L / gamma + Delta_x acting on the
/// concatenated column-major vectorization of the field.
ComplexMatrix spatial_heat_superoperator(const Grid& grid,
                                         const LindbladBasis& basis,
                                         double gamma);
MatrixField spatial_heat_exact(const Grid& grid, const LindbladBasis& basis,
                               double gamma, const MatrixField& rho0, double t);

}  // namespace qot
