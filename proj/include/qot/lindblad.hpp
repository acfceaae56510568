#pragma once

// Commutator calculus generated by a set of Hermitian matrices L_1..L_N:
// gradient, divergence, Laplacian, the two non-commutative multiplications and
// the exact heat semigroup.

#include <string>
#include <vector>

#include "qot/herm.hpp"

namespace qot {

/// Hermitian operators L_1..L_N whose joint commutant is span{I}.
class LindbladBasis {
 public:
  /// Validates hermiticity, N <= n^2, and that the stacked commutator map
  /// X -> ([L_k, X])_k has a one-dimensional kernel (second-smallest singular
  /// value above kNullSpaceGap).
  explicit LindbladBasis(std::vector<HermitianMatrix> ops, int n = 0);

  static constexpr double kNullSpaceGap = 1e-8;

  static LindbladBasis pauli();
  /// Generalized Gell-Mann matrices (all n^2 - 1 of them, identity dropped).
  static LindbladBasis gell_mann(int n);
  /// "pauli" or "gellmann:<n>".
  static LindbladBasis from_name(const std::string& name);

  int dim() const { return n_; }
  std::size_t size() const { return ops_.size(); }
  const ComplexMatrix& op(std::size_t k) const { return ops_[k]; }
  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  /// Second-smallest singular value of the stacked commutator map.
  double null_space_gap() const { return gap_; }

  /// {U L_k U*}.
  LindbladBasis conjugated(const ComplexMatrix& unitary) const;

 private:
  int n_ = 0;
  std::vector<ComplexMatrix> ops_;
  std::vector<ComplexMatrix> squares_;
  double gap_ = 0.0;

  friend ComplexMatrix laplacian_L(const LindbladBasis&, const ComplexMatrix&);
};

/// (L_k X - X L_k)_k.
BlockField grad_L(const LindbladBasis& basis, const ComplexMatrix& x);
/// sum_k L_k Y_k - Y_k L_k.
ComplexMatrix div_L(const LindbladBasis& basis, const BlockField& y);
/// sum_k 2 L_k X L_k - X L_k^2 - L_k^2 X  (= -div_L grad_L X).
ComplexMatrix laplacian_L(const LindbladBasis& basis, const ComplexMatrix& x);

/// Logarithmic mean (a - b) / (log a - log b), with the arithmetic mean used
/// when |a - b| < 1e-12 max(a, b).
double log_mean(double a, double b);

/// d/da of log_mean(a, c).
double log_mean_derivative(double a, double c);

/// (1/2)(rho v_k + v_k rho).
BlockField mult_anticomm(const ComplexMatrix& rho, const BlockField& v);

/// Kubo-Mori multiplication int_0^1 rho^s v rho^(1-s) ds, evaluated in the
/// eigenbasis of rho where it scales entry (i, j) by log_mean(p_i, p_j).
class KuboMoriKernel {
 public:
  explicit KuboMoriKernel(const ComplexMatrix& rho);
  explicit KuboMoriKernel(EigenDecomposition eig);

  const EigenDecomposition& eig() const { return eig_; }
  const Eigen::MatrixXd& weights() const { return weights_; }

  ComplexMatrix apply(const ComplexMatrix& v) const;
  ComplexMatrix apply_inverse(const ComplexMatrix& v) const;
  BlockField apply(const BlockField& v) const;
  BlockField apply_inverse(const BlockField& v) const;

 private:
  void build();
  EigenDecomposition eig_;
  Eigen::MatrixXd weights_;
};

BlockField mult_kubo_mori(const ComplexMatrix& rho, const BlockField& v);
BlockField mult_kubo_mori_inverse(const ComplexMatrix& rho, const BlockField& u);

/// Linear map on vectorized n x n matrices (column-major vec).
struct Superoperator {
  int n = 0;
  ComplexMatrix matrix;  // n^2 x n^2

  ComplexMatrix apply(const ComplexMatrix& x) const;
};

Eigen::VectorXcd vec(const ComplexMatrix& x);
ComplexMatrix unvec(const Eigen::VectorXcd& v, int n);

Superoperator laplacian_superoperator(const LindbladBasis& basis);

/// exp(t Delta_L) rho0 via the superoperator exponential.
DensityMatrix heat_semigroup(const LindbladBasis& basis,
                             const DensityMatrix& rho0, double t);
DensityMatrix heat_semigroup(const Superoperator& laplacian,
                             const DensityMatrix& rho0, double t);

/// One RK4 step of rho' = -i[H, rho] + (1/2) Delta_L rho. An empty basis
/// (n >= 1) switches the dissipator off. Throws PositivityError when the
/// result has an eigenvalue below kPositive.
DensityMatrix lindblad_step(const std::vector<ComplexMatrix>& dissipators,
                            const ComplexMatrix& hamiltonian,
                            const DensityMatrix& rho, double dt);
DensityMatrix lindblad_step(const LindbladBasis& basis,
                            const ComplexMatrix& hamiltonian,
                            const DensityMatrix& rho, double dt);

}  // namespace qot
