#include "qot/lindblad.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qot {

namespace {

void require_dim(const LindbladBasis& basis, const ComplexMatrix& x,
                 const char* what) {
  if (x.rows() != basis.dim() || x.cols() != basis.dim()) {
    std::ostringstream msg;
    msg << what << ": expected " << basis.dim() << "x" << basis.dim()
        << " matrix, got " << x.rows() << "x" << x.cols();
    throw DimensionError(msg.str());
  }
}

// Stacked commutator map vec(X) -> (vec([L_k, X]))_k, column-major.
ComplexMatrix commutator_map(const std::vector<ComplexMatrix>& ops, int n) {
  const int n2 = n * n;
  ComplexMatrix c(static_cast<Eigen::Index>(ops.size()) * n2, n2);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    // vec(L X - X L) = (I (x) L - L^T (x) I) vec(X)
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int r = 0; r < n; ++r) {
          for (int s = 0; s < n; ++s) {
            c(k * n2 + a * n + r, b * n + s) =
                id(a, b) * ops[k](r, s) - ops[k](b, a) * id(r, s);
          }
        }
      }
    }
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Basis

LindbladBasis::LindbladBasis(std::vector<HermitianMatrix> ops, int n) {
  if (ops.empty()) {
    if (n != 1) {
      throw DomainError(
          "LindbladBasis: an empty basis is only valid for n = 1");
    }
    n_ = 1;
    gap_ = std::numeric_limits<double>::infinity();
    return;
  }
  n_ = ops.front().dim();
  if (n != 0 && n != n_) throw DimensionError("LindbladBasis: dimension");
  for (const auto& h : ops) {
    if (h.dim() != n_) {
      throw DimensionError("LindbladBasis: operators differ in dimension");
    }
    ops_.push_back(h.matrix());
    squares_.push_back(h.matrix() * h.matrix());
  }
  if (static_cast<int>(ops_.size()) > n_ * n_) {
    throw DomainError("LindbladBasis: more than n^2 operators");
  }
  if (n_ == 1) {
    gap_ = std::numeric_limits<double>::infinity();
    return;
  }
  const ComplexMatrix c = commutator_map(ops_, n_);
  Eigen::JacobiSVD<ComplexMatrix> svd(c);
  const Eigen::VectorXd sv = svd.singularValues();  // descending
  gap_ = sv(sv.size() - 2);
  if (!(gap_ > kNullSpaceGap)) {
    std::ostringstream msg;
    msg << "LindbladBasis: commutant is larger than span{I} (second-smallest "
           "singular value "
        << gap_ << ")";
    throw DomainError(msg.str());
  }
}

LindbladBasis LindbladBasis::pauli() {
  return LindbladBasis({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_y()),
                        HermitianMatrix(sigma_z())});
}

LindbladBasis LindbladBasis::gell_mann(int n) {
  std::vector<HermitianMatrix> ops;
  for (auto& g : gell_mann_matrices(n)) ops.emplace_back(g);
  return LindbladBasis(std::move(ops), n);
}

LindbladBasis LindbladBasis::from_name(const std::string& name) {
  if (name == "pauli") return pauli();
  const std::string prefix = "gellmann:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string rest = name.substr(prefix.size());
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || n < 1) {
      throw DomainError("unknown basis preset '" + name + "'");
    }
    return gell_mann(n);
  }
  throw DomainError("unknown basis preset '" + name + "'");
}

LindbladBasis LindbladBasis::conjugated(const ComplexMatrix& unitary) const {
  std::vector<HermitianMatrix> ops;
  for (const auto& l : ops_) {
    ops.push_back(HermitianMatrix::symmetrize(unitary * l * unitary.adjoint()));
  }
  return LindbladBasis(std::move(ops), n_);
}

// ---------------------------------------------------------------------------
// Gradient, divergence, Laplacian

BlockField grad_L(const LindbladBasis& basis, const ComplexMatrix& x) {
  require_dim(basis, x, "grad_L");
  BlockField out;
  out.blocks.reserve(basis.size());
  for (const auto& l : basis.ops()) out.blocks.push_back(l * x - x * l);
  return out;
}

ComplexMatrix div_L(const LindbladBasis& basis, const BlockField& y) {
  if (y.size() != basis.size()) {
    throw DimensionError("div_L: block count differs from basis size");
  }
  ComplexMatrix out = ComplexMatrix::Zero(basis.dim(), basis.dim());
  for (std::size_t k = 0; k < y.size(); ++k) {
    require_dim(basis, y[k], "div_L");
    out += basis.op(k) * y[k] - y[k] * basis.op(k);
  }
  return out;
}

ComplexMatrix laplacian_L(const LindbladBasis& basis, const ComplexMatrix& x) {
  require_dim(basis, x, "laplacian_L");
  ComplexMatrix out = ComplexMatrix::Zero(basis.dim(), basis.dim());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const ComplexMatrix& l = basis.ops_[k];
    const ComplexMatrix& l2 = basis.squares_[k];
    out += 2.0 * (l * x * l) - x * l2 - l2 * x;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multiplications

double log_mean(double a, double b) {
  const double d = a - b;
  if (std::abs(d) < 1e-12 * std::max(a, b)) return 0.5 * (a + b);
  return d / std::log1p(d / b);
}

double log_mean_derivative(double a, double c) {
  // With a = c e^L: d/da [(a - c) / log(a / c)] = (L - 1 + e^-L) / L^2.
  const double l = std::log1p((a - c) / c);
  if (std::abs(l) < 1e-3) {
    return 0.5 + l * (-1.0 / 6.0 + l * (1.0 / 24.0 + l * (-1.0 / 120.0 + l / 720.0)));
  }
  return (l + std::expm1(-l)) / (l * l);
}

BlockField mult_anticomm(const ComplexMatrix& rho, const BlockField& v) {
  BlockField out;
  out.blocks.reserve(v.size());
  for (const auto& b : v.blocks) {
    if (b.rows() != rho.rows()) throw DimensionError("mult_anticomm: dims");
    out.blocks.push_back(0.5 * (rho * b + b * rho));
  }
  return out;
}

KuboMoriKernel::KuboMoriKernel(const ComplexMatrix& rho)
    : eig_(eigh(HermitianMatrix(rho).matrix())) {
  build();
}

KuboMoriKernel::KuboMoriKernel(EigenDecomposition eig) : eig_(std::move(eig)) {
  build();
}

void KuboMoriKernel::build() {
  const Eigen::Index n = eig_.values.size();
  if (!(eig_.values(0) > tol::kPositive)) {
    std::ostringstream msg;
    msg << "KuboMoriKernel: eigenvalue " << eig_.values(0)
        << " is not positive";
    throw DomainError(msg.str());
  }
  weights_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      weights_(i, j) = log_mean(eig_.values(i), eig_.values(j));
    }
  }
}

ComplexMatrix KuboMoriKernel::apply(const ComplexMatrix& v) const {
  const ComplexMatrix& u = eig_.vectors;
  ComplexMatrix t = u.adjoint() * v * u;
  t.array() *= weights_.array().cast<cplx>();
  return u * t * u.adjoint();
}

ComplexMatrix KuboMoriKernel::apply_inverse(const ComplexMatrix& v) const {
  const ComplexMatrix& u = eig_.vectors;
  ComplexMatrix t = u.adjoint() * v * u;
  t.array() /= weights_.array().cast<cplx>();
  return u * t * u.adjoint();
}

BlockField KuboMoriKernel::apply(const BlockField& v) const {
  BlockField out;
  out.blocks.reserve(v.size());
  for (const auto& b : v.blocks) {
    if (b.rows() != eig_.values.size()) throw DimensionError("KuboMori: dims");
    out.blocks.push_back(apply(b));
  }
  return out;
}

BlockField KuboMoriKernel::apply_inverse(const BlockField& v) const {
  BlockField out;
  out.blocks.reserve(v.size());
  for (const auto& b : v.blocks) {
    if (b.rows() != eig_.values.size()) throw DimensionError("KuboMori: dims");
    out.blocks.push_back(apply_inverse(b));
  }
  return out;
}

BlockField mult_kubo_mori(const ComplexMatrix& rho, const BlockField& v) {
  return KuboMoriKernel(rho).apply(v);
}

BlockField mult_kubo_mori_inverse(const ComplexMatrix& rho,
                                  const BlockField& u) {
  return KuboMoriKernel(rho).apply_inverse(u);
}

// ---------------------------------------------------------------------------
// Superoperators and the heat semigroup

Eigen::VectorXcd vec(const ComplexMatrix& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

ComplexMatrix unvec(const Eigen::VectorXcd& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n) {
    throw DimensionError("unvec: length is not n^2");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& x) const {
  if (x.rows() != n || x.cols() != n) throw DimensionError("Superoperator");
  return unvec(matrix * vec(x), n);
}

Superoperator laplacian_superoperator(const LindbladBasis& basis) {
  const int n = basis.dim();
  Superoperator s{n, ComplexMatrix(n * n, n * n)};
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      ComplexMatrix e = ComplexMatrix::Zero(n, n);
      e(r, c) = 1.0;
      s.matrix.col(c * n + r) = vec(laplacian_L(basis, e));
    }
  }
  return s;
}

DensityMatrix heat_semigroup(const Superoperator& laplacian,
                             const DensityMatrix& rho0, double t) {
  if (!(t >= 0.0)) throw DomainError("heat_semigroup: t must be nonnegative");
  if (rho0.dim() != laplacian.n) throw DimensionError("heat_semigroup: dims");
  const ComplexMatrix prop = (t * laplacian.matrix).exp();
  return DensityMatrix(
      HermitianMatrix(unvec(prop * vec(rho0.matrix()), laplacian.n)));
}

DensityMatrix heat_semigroup(const LindbladBasis& basis,
                             const DensityMatrix& rho0, double t) {
  return heat_semigroup(laplacian_superoperator(basis), rho0, t);
}

DensityMatrix lindblad_step(const std::vector<ComplexMatrix>& dissipators,
                            const ComplexMatrix& hamiltonian,
                            const DensityMatrix& rho, double dt) {
  if (!(dt > 0.0)) throw DomainError("lindblad_step: dt must be positive");
  const int n = rho.dim();
  if (hamiltonian.rows() != n || hamiltonian.cols() != n) {
    throw DimensionError("lindblad_step: Hamiltonian dimension");
  }
  std::vector<ComplexMatrix> squares;
  for (const auto& l : dissipators) {
    if (l.rows() != n) throw DimensionError("lindblad_step: basis dimension");
    squares.push_back(l * l);
  }
  const cplx minus_i(0.0, -1.0);
  auto rhs = [&](const ComplexMatrix& x) {
    ComplexMatrix out = minus_i * (hamiltonian * x - x * hamiltonian);
    for (std::size_t k = 0; k < dissipators.size(); ++k) {
      const auto& l = dissipators[k];
      out += l * x * l - 0.5 * (x * squares[k] + squares[k] * x);
    }
    return out;
  };
  const ComplexMatrix& x = rho.matrix();
  const ComplexMatrix k1 = rhs(x);
  const ComplexMatrix k2 = rhs(x + 0.5 * dt * k1);
  const ComplexMatrix k3 = rhs(x + 0.5 * dt * k2);
  const ComplexMatrix k4 = rhs(x + dt * k3);
  const HermitianMatrix next = HermitianMatrix::symmetrize(
      x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  const double lo = min_eigenvalue(next.matrix());
  if (!(lo > tol::kPositive)) {
    std::ostringstream msg;
    msg << "lindblad_step: smallest eigenvalue " << lo
        << " after step; dt is too large";
    throw PositivityError(msg.str(), 0);
  }
  return DensityMatrix(next);
}

DensityMatrix lindblad_step(const LindbladBasis& basis,
                            const ComplexMatrix& hamiltonian,
                            const DensityMatrix& rho, double dt) {
  return lindblad_step(basis.ops(), hamiltonian, rho, dt);
}

}  // namespace qot
