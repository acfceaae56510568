#pragma once

// Dense complex linear algebra shared by every other part of the library:
// Hermitian / skew-Hermitian / density-matrix value types, block fields,
// eigendecompositions and spectral matrix functions.

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qot {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

namespace tol {
inline constexpr double kHermitian = 1e-10;  // relative
inline constexpr double kTrace = 1e-9;
inline constexpr double kPositive = 1e-12;
inline constexpr double kReconstruction = 1e-10;
}  // namespace tol

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operation (not Hermitian, not positive
/// definite, eigenvalue outside the domain of a matrix function, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Positivity of a density was lost during time stepping.
class PositivityError : public Error {
 public:
  PositivityError(const std::string& what, long step)
      : Error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Validates ||A - A*||_F <= kHermitian * max(1, ||A||_F) and stores the
  /// exact symmetrization (A + A*) / 2.
  explicit HermitianMatrix(const ComplexMatrix& a);

  /// Symmetrizes without validating. For values that are Hermitian by
  /// construction and only carry rounding noise.
  static HermitianMatrix symmetrize(const ComplexMatrix& a);
  static HermitianMatrix zero(int n);
  static HermitianMatrix identity(int n);

  const ComplexMatrix& matrix() const { return m_; }
  operator const ComplexMatrix&() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double trace() const { return m_.trace().real(); }

 private:
  ComplexMatrix m_;
};

class SkewHermitianMatrix {
 public:
  SkewHermitianMatrix() = default;
  explicit SkewHermitianMatrix(const ComplexMatrix& a);
  static SkewHermitianMatrix antisymmetrize(const ComplexMatrix& a);

  const ComplexMatrix& matrix() const { return m_; }
  operator const ComplexMatrix&() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  ComplexMatrix m_;
};

/// Strictly positive-definite Hermitian matrix with unit trace.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(const HermitianMatrix& h);
  explicit DensityMatrix(const ComplexMatrix& a)
      : DensityMatrix(HermitianMatrix(a)) {}

  static DensityMatrix maximally_mixed(int n);

  const HermitianMatrix& hermitian() const { return h_; }
  const ComplexMatrix& matrix() const { return h_.matrix(); }
  operator const ComplexMatrix&() const { return h_.matrix(); }
  int dim() const { return h_.dim(); }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  HermitianMatrix h_;
  double min_eigenvalue_ = 0.0;
};

/// Traceless Hermitian matrix: an element of the tangent space at any
/// density matrix.
class TangentVector {
 public:
  TangentVector() = default;
  explicit TangentVector(const HermitianMatrix& h);
  explicit TangentVector(const ComplexMatrix& a)
      : TangentVector(HermitianMatrix(a)) {}

  const HermitianMatrix& hermitian() const { return h_; }
  const ComplexMatrix& matrix() const { return h_.matrix(); }
  operator const ComplexMatrix&() const { return h_.matrix(); }
  int dim() const { return h_.dim(); }

 private:
  HermitianMatrix h_;
};

/// Ordered list of N equally sized blocks. Velocities and momenta have
/// skew-Hermitian blocks, spatial velocities Hermitian ones.
struct BlockField {
  std::vector<ComplexMatrix> blocks;

  BlockField() = default;
  explicit BlockField(std::vector<ComplexMatrix> b);
  static BlockField zero(std::size_t count, int n);

  std::size_t size() const { return blocks.size(); }
  int dim() const {
    return blocks.empty() ? 0 : static_cast<int>(blocks.front().rows());
  }
  const ComplexMatrix& operator[](std::size_t k) const { return blocks[k]; }
  ComplexMatrix& operator[](std::size_t k) { return blocks[k]; }

  BlockField& operator+=(const BlockField& o);
  BlockField& operator-=(const BlockField& o);
  BlockField& operator*=(double s);
  double norm() const;
};

BlockField operator+(BlockField a, const BlockField& b);
BlockField operator-(BlockField a, const BlockField& b);
BlockField operator*(double s, BlockField a);

bool is_skew_hermitian(const BlockField& f, double tolerance = tol::kHermitian);

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // unitary, columns are eigenvectors

  ComplexMatrix reconstruct() const;
};

/// <X, Y> = tr(X* Y).
cplx hs_inner(const ComplexMatrix& x, const ComplexMatrix& y);
/// Sum over blocks of tr(X_k* Y_k).
cplx hs_inner(const BlockField& x, const BlockField& y);

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending; each
/// eigenvector is rotated so that its largest-magnitude component (lowest row
/// index on ties) is real and positive.
EigenDecomposition eigh(const ComplexMatrix& a);

/// U diag(f(lambda)) U*. Throws DomainError when f is not finite on the
/// spectrum.
HermitianMatrix matrix_function(const ComplexMatrix& a,
                                const std::function<double(double)>& f);
HermitianMatrix matrix_function(const EigenDecomposition& eig,
                                const std::function<double(double)>& f);

/// Matrix logarithm of a positive-definite matrix; throws DomainError when an
/// eigenvalue is below `floor`.
HermitianMatrix matrix_log(const ComplexMatrix& a,
                           double floor = tol::kPositive);

/// (A + A*)/2 - tr((A + A*)/2)/n * I.
TangentVector project_traceless_hermitian(const ComplexMatrix& a);

double min_eigenvalue(const ComplexMatrix& hermitian);
double relative_frobenius(const ComplexMatrix& value,
                          const ComplexMatrix& reference);

/// Pauli matrices.
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();

/// Orthonormal (under tr(X* Y)) real coordinates on the n x n Hermitian
/// matrices. Element 0 is I / sqrt(n); the remaining n^2 - 1 elements are the
/// generalized Gell-Mann matrices scaled to unit norm and span the traceless
/// subspace.
class HermitianFrame {
 public:
  explicit HermitianFrame(int n);

  int dim() const { return n_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const ComplexMatrix& element(int i) const { return elements_[i]; }

  /// Coordinates with respect to all n^2 elements.
  Eigen::VectorXd coordinates(const ComplexMatrix& h) const;
  ComplexMatrix compose(const Eigen::VectorXd& c) const;

  /// Coordinates on the traceless subspace (n^2 - 1 entries).
  Eigen::VectorXd traceless_coordinates(const ComplexMatrix& h) const;
  ComplexMatrix compose_traceless(const Eigen::VectorXd& c) const;

 private:
  int n_;
  std::vector<ComplexMatrix> elements_;
};

/// Generalized Gell-Mann matrices with the conventional normalization
/// tr(G_a G_b) = 2 delta_ab; for n = 2 these are the Pauli matrices.
std::vector<ComplexMatrix> gell_mann_matrices(int n);

}  // namespace qot
