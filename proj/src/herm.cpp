#include "qot/herm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qot {

namespace {

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << a.rows()
        << "x" << a.cols();
    throw DimensionError(msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Value types

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a) {
  require_square(a, "HermitianMatrix");
  const double asym = (a - a.adjoint()).norm();
  if (!(asym <= tol::kHermitian * std::max(1.0, a.norm()))) {
    std::ostringstream msg;
    msg << "HermitianMatrix: ||A - A*||_F = " << asym << " exceeds tolerance";
    throw DomainError(msg.str());
  }
  m_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::symmetrize(const ComplexMatrix& a) {
  require_square(a, "HermitianMatrix::symmetrize");
  HermitianMatrix h;
  h.m_ = 0.5 * (a + a.adjoint());
  return h;
}

HermitianMatrix HermitianMatrix::zero(int n) {
  return symmetrize(ComplexMatrix::Zero(n, n));
}

HermitianMatrix HermitianMatrix::identity(int n) {
  return symmetrize(ComplexMatrix::Identity(n, n));
}

SkewHermitianMatrix::SkewHermitianMatrix(const ComplexMatrix& a) {
  require_square(a, "SkewHermitianMatrix");
  const double sym = (a + a.adjoint()).norm();
  if (!(sym <= tol::kHermitian * std::max(1.0, a.norm()))) {
    std::ostringstream msg;
    msg << "SkewHermitianMatrix: ||A + A*||_F = " << sym
        << " exceeds tolerance";
    throw DomainError(msg.str());
  }
  m_ = 0.5 * (a - a.adjoint());
}

SkewHermitianMatrix SkewHermitianMatrix::antisymmetrize(const ComplexMatrix& a) {
  require_square(a, "SkewHermitianMatrix::antisymmetrize");
  SkewHermitianMatrix s;
  s.m_ = 0.5 * (a - a.adjoint());
  return s;
}

DensityMatrix::DensityMatrix(const HermitianMatrix& h) : h_(h) {
  const double tr = h_.trace();
  if (!(std::abs(tr - 1.0) <= tol::kTrace)) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << tr << " differs from 1";
    throw DomainError(msg.str());
  }
  min_eigenvalue_ = qot::min_eigenvalue(h_.matrix());
  if (!(min_eigenvalue_ > tol::kPositive)) {
    std::ostringstream msg;
    msg << "DensityMatrix: smallest eigenvalue " << min_eigenvalue_
        << " is not positive";
    throw DomainError(msg.str());
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  return DensityMatrix(HermitianMatrix::symmetrize(
      ComplexMatrix::Identity(n, n) / static_cast<double>(n)));
}

TangentVector::TangentVector(const HermitianMatrix& h) : h_(h) {
  if (!(std::abs(h_.trace()) <= tol::kTrace)) {
    std::ostringstream msg;
    msg << "TangentVector: trace " << h_.trace() << " is not zero";
    throw DomainError(msg.str());
  }
}

// ---------------------------------------------------------------------------
// BlockField

BlockField::BlockField(std::vector<ComplexMatrix> b) : blocks(std::move(b)) {
  for (const auto& m : blocks) {
    if (m.rows() != m.cols() || m.rows() != blocks.front().rows()) {
      throw DimensionError("BlockField: blocks must share one square shape");
    }
  }
}

BlockField BlockField::zero(std::size_t count, int n) {
  BlockField f;
  f.blocks.assign(count, ComplexMatrix::Zero(n, n));
  return f;
}

BlockField& BlockField::operator+=(const BlockField& o) {
  if (o.size() != size()) throw DimensionError("BlockField: size mismatch");
  for (std::size_t k = 0; k < size(); ++k) blocks[k] += o.blocks[k];
  return *this;
}

BlockField& BlockField::operator-=(const BlockField& o) {
  if (o.size() != size()) throw DimensionError("BlockField: size mismatch");
  for (std::size_t k = 0; k < size(); ++k) blocks[k] -= o.blocks[k];
  return *this;
}

BlockField& BlockField::operator*=(double s) {
  for (auto& b : blocks) b *= s;
  return *this;
}

double BlockField::norm() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

BlockField operator+(BlockField a, const BlockField& b) { return a += b; }
BlockField operator-(BlockField a, const BlockField& b) { return a -= b; }
BlockField operator*(double s, BlockField a) { return a *= s; }

bool is_skew_hermitian(const BlockField& f, double tolerance) {
  for (const auto& b : f.blocks) {
    if ((b + b.adjoint()).norm() > tolerance * std::max(1.0, b.norm())) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Inner products and spectral calculus

cplx hs_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("hs_inner: dimension mismatch");
  }
  // tr(X* Y) = sum_ij conj(X_ij) Y_ij
  return (x.array().conjugate() * y.array()).sum();
}

cplx hs_inner(const BlockField& x, const BlockField& y) {
  if (x.size() != y.size()) throw DimensionError("hs_inner: block count");
  cplx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += hs_inner(x[k], y[k]);
  return s;
}

ComplexMatrix EigenDecomposition::reconstruct() const {
  return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
}

EigenDecomposition eigh(const ComplexMatrix& a) {
  require_square(a, "eigh");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigh: eigensolver did not converge");
  }
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = std::abs(out.vectors(i, j));
      if (m > best * (1.0 + 1e-12)) {
        best = m;
        pivot = i;
      }
    }
    const cplx c = out.vectors(pivot, j);
    if (std::abs(c) > 0.0) out.vectors.col(j) *= std::conj(c) / std::abs(c);
  }
  return out;
}

HermitianMatrix matrix_function(const EigenDecomposition& eig,
                                const std::function<double(double)>& f) {
  Eigen::VectorXd fv(eig.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv(i) = f(eig.values(i));
    if (!std::isfinite(fv(i))) {
      std::ostringstream msg;
      msg << "matrix_function: eigenvalue " << eig.values(i)
          << " is outside the domain of f";
      throw DomainError(msg.str());
    }
  }
  return HermitianMatrix::symmetrize(eig.vectors * fv.cast<cplx>().asDiagonal() *
                                     eig.vectors.adjoint());
}

HermitianMatrix matrix_function(const ComplexMatrix& a,
                                const std::function<double(double)>& f) {
  return matrix_function(eigh(HermitianMatrix(a).matrix()), f);
}

HermitianMatrix matrix_log(const ComplexMatrix& a, double floor) {
  const EigenDecomposition eig = eigh(a);
  if (!(eig.values(0) > floor)) {
    std::ostringstream msg;
    msg << "matrix_log: eigenvalue " << eig.values(0) << " below " << floor;
    throw DomainError(msg.str());
  }
  return matrix_function(eig, [](double x) { return std::log(x); });
}

TangentVector project_traceless_hermitian(const ComplexMatrix& a) {
  require_square(a, "project_traceless_hermitian");
  ComplexMatrix h = 0.5 * (a + a.adjoint());
  const cplx shift = h.trace() / static_cast<double>(h.rows());
  h.diagonal().array() -= shift.real();
  // Diagonal entries of a Hermitian matrix are real; clear rounding residue.
  h.diagonal() = h.diagonal().real().cast<cplx>();
  return TangentVector(HermitianMatrix::symmetrize(h));
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian,
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("min_eigenvalue: eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

double relative_frobenius(const ComplexMatrix& value,
                          const ComplexMatrix& reference) {
  const double r = reference.norm();
  const double d = (value - reference).norm();
  return r > 0.0 ? d / r : d;
}

ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// ---------------------------------------------------------------------------
// Coordinates

std::vector<ComplexMatrix> gell_mann_matrices(int n) {
  if (n < 1) throw DimensionError("gell_mann_matrices: n must be positive");
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n * n - 1));
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      out.push_back(s);
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(j, k) = cplx(0, -1);
      a(k, j) = cplx(0, 1);
      out.push_back(a);
    }
  }
  for (int l = 1; l < n; ++l) {
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) d(j, j) = scale;
    d(l, l) = -l * scale;
    out.push_back(d);
  }
  return out;
}

HermitianFrame::HermitianFrame(int n) : n_(n) {
  if (n < 1) throw DimensionError("HermitianFrame: n must be positive");
  elements_.push_back(ComplexMatrix::Identity(n, n) / std::sqrt(double(n)));
  for (auto& g : gell_mann_matrices(n)) {
    elements_.push_back(g / std::sqrt(2.0));
  }
}

Eigen::VectorXd HermitianFrame::coordinates(const ComplexMatrix& h) const {
  if (h.rows() != n_ || h.cols() != n_) {
    throw DimensionError("HermitianFrame: dimension mismatch");
  }
  Eigen::VectorXd c(size());
  for (int i = 0; i < size(); ++i) c(i) = hs_inner(elements_[i], h).real();
  return c;
}

ComplexMatrix HermitianFrame::compose(const Eigen::VectorXd& c) const {
  if (c.size() != size()) throw DimensionError("HermitianFrame: coordinates");
  ComplexMatrix h = ComplexMatrix::Zero(n_, n_);
  for (int i = 0; i < size(); ++i) h += c(i) * elements_[i];
  return h;
}

Eigen::VectorXd HermitianFrame::traceless_coordinates(
    const ComplexMatrix& h) const {
  return coordinates(h).tail(size() - 1);
}

ComplexMatrix HermitianFrame::compose_traceless(const Eigen::VectorXd& c) const {
  if (c.size() != size() - 1) {
    throw DimensionError("HermitianFrame: traceless coordinates");
  }
  ComplexMatrix h = ComplexMatrix::Zero(n_, n_);
  for (int i = 1; i < size(); ++i) h += c(i - 1) * elements_[i];
  return h;
}

}  // namespace qot
