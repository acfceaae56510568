#include "qot/conic.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

#include "qot/metric.hpp"

namespace qot {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Real coordinates of a complex n x n matrix: (re, im) per row-major entry.
ComplexMatrix unit_matrix(int n, int e) {
  ComplexMatrix x = ComplexMatrix::Zero(n, n);
  const int entry = e / 2;
  x(entry / n, entry % n) = (e % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
  return x;
}

Eigen::VectorXd complex_coordinates(const ComplexMatrix& b) {
  const int n = static_cast<int>(b.rows());
  Eigen::VectorXd c(2 * n * n);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      c(2 * (r * n + s)) = b(r, s).real();
      c(2 * (r * n + s) + 1) = b(r, s).imag();
    }
  }
  return c;
}

ComplexMatrix complex_compose(const double* c, int n) {
  ComplexMatrix b(n, n);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      b(r, s) = cplx(c[2 * (r * n + s)], c[2 * (r * n + s) + 1]);
    }
  }
  return b;
}

class Splitting {
 public:
  Splitting(const ConicProblem& p, const ConicOptions& o)
      : p_(p), o_(o), frame_(frame_for(p.n)) {
    n_ = p.n;
    n2_ = n_ * n_;
    ne_ = 2 * n2_;
    g_ = static_cast<int>(p.weights.size());
    t_ = p.steps;
    nk_ = static_cast<int>(p.ops.size());
    spatial_ = p.divergence.size() > 0;
    nb_ = nk_ + (spatial_ ? 1 : 0);
    dt_ = 1.0 / t_;
    validate();
    nrho_ = (t_ - 1) * g_ * n2_;
    nunk_ = nrho_ + t_ * g_ * nb_ * ne_;
    nrows_ = t_ * g_ * n2_ - 1;
    c0_.resize(g_);
    c1_.resize(g_);
    for (int x = 0; x < g_; ++x) {
      c0_[x] = frame_.coordinates(p.rho0[x]);
      c1_[x] = frame_.coordinates(p.rho1[x]);
    }
    build_maps();
    factorize();
  }

  ConicSolution run();

 private:
  int block_index(int j, int x, int b) const { return (j * g_ + x) * nb_ + b; }
  int rho_index(int j, int x) const { return ((j - 1) * g_ + x) * n2_; }
  int b_index(int j, int x, int b) const {
    return nrho_ + block_index(j, x, b) * ne_;
  }
  int row_index(int j, int x, int i) const {
    return (j * g_ + x) * n2_ + i - 1;
  }
  double cost(int x, int b) const {
    return p_.weights(x) * dt_ * (b < nk_ ? p_.gamma : 1.0);
  }

  void validate() const;
  void build_maps();
  void factorize();
  void project_affine(const std::vector<ComplexMatrix>& y,
                      std::vector<ComplexMatrix>& x);
  ComplexMatrix node_density(int j, int x) const;

  const ConicProblem& p_;
  const ConicOptions& o_;
  const HermitianFrame& frame_;
  int n_, n2_, ne_, g_, t_, nk_, nb_;
  bool spatial_;
  double dt_;
  int nrho_, nunk_, nrows_;
  std::vector<Eigen::VectorXd> c0_, c1_;
  std::vector<Eigen::MatrixXd> ku_;  // n2 x ne per basis element
  Eigen::MatrixXd kq_;               // n2 x ne
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::VectorXd sol_;
};

void Splitting::validate() const {
  if (n_ < 1) throw DimensionError("conic: n must be positive");
  if (t_ < 1) throw DomainError("conic: steps must be positive");
  if (g_ < 1) throw DimensionError("conic: empty grid");
  if (static_cast<int>(p_.rho0.size()) != g_ ||
      static_cast<int>(p_.rho1.size()) != g_) {
    throw DimensionError("conic: marginals do not match the grid");
  }
  if (spatial_ && (p_.divergence.rows() != g_ || p_.divergence.cols() != g_)) {
    throw DimensionError("conic: divergence matrix does not match the grid");
  }
  if (!spatial_ && g_ != 1) {
    throw DimensionError("conic: a grid needs a divergence matrix");
  }
  if (nb_ == 0) throw DomainError("conic: no momentum blocks");
  if (!(p_.gamma > 0.0)) throw DomainError("conic: gamma must be positive");
}

void Splitting::build_maps() {
  ku_.assign(nk_, Eigen::MatrixXd(n2_, ne_));
  kq_.resize(n2_, ne_);
  for (int e = 0; e < ne_; ++e) {
    const ComplexMatrix xe = unit_matrix(n_, e);
    const ComplexMatrix skew = 0.5 * (xe - xe.adjoint());
    const ComplexMatrix herm = 0.5 * (xe + xe.adjoint());
    for (int k = 0; k < nk_; ++k) {
      const ComplexMatrix& l = p_.ops[k];
      ku_[k].col(e) = frame_.coordinates(l * skew - skew * l);
    }
    kq_.col(e) = frame_.coordinates(herm);
  }
}

void Splitting::factorize() {
  std::vector<Triplet> trip;
  const double half = 0.5 * nb_;
  for (int j = 0; j < t_; ++j) {
    for (int x = 0; x < g_; ++x) {
      const bool lo = j >= 1;
      const bool hi = j + 1 <= t_ - 1;
      for (int i = 0; i < n2_; ++i) {
        if (lo) trip.emplace_back(rho_index(j, x) + i, rho_index(j, x) + i, half);
        if (hi) {
          trip.emplace_back(rho_index(j + 1, x) + i, rho_index(j + 1, x) + i,
                            half);
        }
        if (lo && hi) {
          trip.emplace_back(rho_index(j, x) + i, rho_index(j + 1, x) + i, half);
          trip.emplace_back(rho_index(j + 1, x) + i, rho_index(j, x) + i, half);
        }
      }
    }
  }
  for (int i = nrho_; i < nunk_; ++i) trip.emplace_back(i, i, 4.0);

  auto constraint = [&](int row, int col, double v) {
    trip.emplace_back(nunk_ + row, col, v);
    trip.emplace_back(col, nunk_ + row, v);
  };
  for (int j = 0; j < t_; ++j) {
    for (int x = 0; x < g_; ++x) {
      for (int i = 0; i < n2_; ++i) {
        if (j == 0 && x == 0 && i == 0) continue;
        const int row = row_index(j, x, i);
        if (j + 1 <= t_ - 1) constraint(row, rho_index(j + 1, x) + i, 1.0);
        if (j >= 1) constraint(row, rho_index(j, x) + i, -1.0);
        for (int k = 0; k < nk_; ++k) {
          for (int e = 0; e < ne_; ++e) {
            const double v = -dt_ * ku_[k](i, e);
            if (v != 0.0) constraint(row, b_index(j, x, k) + e, v);
          }
        }
        if (spatial_) {
          for (int y = 0; y < g_; ++y) {
            const double d = p_.divergence(x, y);
            if (d == 0.0) continue;
            for (int e = 0; e < ne_; ++e) {
              const double v = dt_ * d * kq_(i, e);
              if (v != 0.0) constraint(row, b_index(j, y, nk_) + e, v);
            }
          }
        }
      }
    }
  }
  SparseMatrix kkt(nunk_ + nrows_, nunk_ + nrows_);
  kkt.setFromTriplets(trip.begin(), trip.end());
  kkt.makeCompressed();
  lu_.analyzePattern(kkt);
  lu_.factorize(kkt);
  if (lu_.info() != Eigen::Success) {
    throw DomainError("conic: KKT factorization failed (" +
                      lu_.lastErrorMessage() + ")");
  }
}

ComplexMatrix Splitting::node_density(int j, int x) const {
  if (j == 0) return p_.rho0[x];
  if (j == t_) return p_.rho1[x];
  return frame_.compose(sol_.segment(rho_index(j, x), n2_));
}

void Splitting::project_affine(const std::vector<ComplexMatrix>& y,
                               std::vector<ComplexMatrix>& out) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nunk_ + nrows_);
  for (int j = 0; j < t_; ++j) {
    for (int x = 0; x < g_; ++x) {
      Eigen::VectorXd abar = Eigen::VectorXd::Zero(n2_);
      for (int b = 0; b < nb_; ++b) {
        const ComplexMatrix& yb = y[block_index(j, x, b)];
        abar += frame_.coordinates(yb.topLeftCorner(n_, n_));
        rhs.segment(b_index(j, x, b), ne_) =
            4.0 * complex_coordinates(yb.topRightCorner(n_, n_));
      }
      abar /= nb_;
      if (j >= 1) {
        Eigen::VectorXd t = nb_ * abar;
        if (j + 1 == t_) t -= 0.5 * nb_ * c1_[x];
        rhs.segment(rho_index(j, x), n2_) += t;
      }
      if (j + 1 <= t_ - 1) {
        Eigen::VectorXd t = nb_ * abar;
        if (j == 0) t -= 0.5 * nb_ * c0_[x];
        rhs.segment(rho_index(j + 1, x), n2_) += t;
      }
    }
  }
  for (int x = 0; x < g_; ++x) {
    for (int i = 0; i < n2_; ++i) {
      if (x == 0 && i == 0) {
        if (t_ > 1) rhs(nunk_ + row_index(t_ - 1, x, i)) -= c1_[x](i);
        continue;
      }
      rhs(nunk_ + row_index(0, x, i)) += c0_[x](i);
      rhs(nunk_ + row_index(t_ - 1, x, i)) -= c1_[x](i);
    }
  }
  sol_ = lu_.solve(rhs);

  for (int j = 0; j < t_; ++j) {
    for (int x = 0; x < g_; ++x) {
      const ComplexMatrix bar = 0.5 * (node_density(j, x) + node_density(j + 1, x));
      for (int b = 0; b < nb_; ++b) {
        const int idx = block_index(j, x, b);
        ComplexMatrix& o = out[idx];
        o.resize(2 * n_, 2 * n_);
        const ComplexMatrix bb = complex_compose(sol_.data() + b_index(j, x, b), n_);
        o.topLeftCorner(n_, n_) = bar;
        o.topRightCorner(n_, n_) = bb;
        o.bottomLeftCorner(n_, n_) = bb.adjoint();
        o.bottomRightCorner(n_, n_) = y[idx].bottomRightCorner(n_, n_);
      }
    }
  }
}

void project_psd(ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev(0) >= 0.0) return;
  const Eigen::VectorXd clamped = ev.cwiseMax(0.0);
  m = es.eigenvectors() * clamped.cast<cplx>().asDiagonal() *
      es.eigenvectors().adjoint();
}

ConicSolution Splitting::run() {
  const int nblocks = t_ * g_ * nb_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(nblocks));
  std::vector<ComplexMatrix> z(nblocks), w(nblocks), x(nblocks), y(nblocks);
  for (int j = 0; j < t_; ++j) {
    for (int gx = 0; gx < g_; ++gx) {
      const double t0 = static_cast<double>(j) / t_;
      const double t1 = static_cast<double>(j + 1) / t_;
      const ComplexMatrix bar =
          0.5 * ((1 - t0) * p_.rho0[gx] + t0 * p_.rho1[gx] +
                 (1 - t1) * p_.rho0[gx] + t1 * p_.rho1[gx]);
      for (int b = 0; b < nb_; ++b) {
        ComplexMatrix& zb = z[block_index(j, gx, b)];
        zb = ComplexMatrix::Zero(2 * n_, 2 * n_);
        zb.topLeftCorner(n_, n_) = bar;
        w[block_index(j, gx, b)] = ComplexMatrix::Zero(2 * n_, 2 * n_);
      }
    }
  }

  double sigma = o_.sigma;
  const double alpha = o_.relaxation;
  ConicSolution out;
  long it = 0;
  for (it = 1; it <= o_.max_iterations; ++it) {
    for (int j = 0; j < t_; ++j) {
      for (int gx = 0; gx < g_; ++gx) {
        for (int b = 0; b < nb_; ++b) {
          const int idx = block_index(j, gx, b);
          y[idx] = z[idx] - w[idx];
          y[idx].bottomRightCorner(n_, n_).diagonal().array() -=
              cost(gx, b) / sigma;
        }
      }
    }
    project_affine(y, x);
    double primal = 0.0;
    double dual = 0.0;
    for (int idx = 0; idx < nblocks; ++idx) {
      const ComplexMatrix xh = alpha * x[idx] + (1.0 - alpha) * z[idx];
      ComplexMatrix zn = xh + w[idx];
      project_psd(zn);
      w[idx] += xh - zn;
      primal += (x[idx] - zn).squaredNorm();
      dual += (zn - z[idx]).squaredNorm();
      z[idx] = std::move(zn);
    }
    primal = std::sqrt(primal) * scale;
    dual = sigma * std::sqrt(dual) * scale;
    out.primal_residual = primal;
    out.dual_residual = dual;
    if (std::max(primal, dual) < o_.tolerance) break;
    if (o_.adapt_interval > 0 && it % o_.adapt_interval == 0) {
      double factor = 1.0;
      if (primal > 10.0 * dual) factor = 2.0;
      if (dual > 10.0 * primal) factor = 0.5;
      if (factor != 1.0) {
        sigma *= factor;
        for (auto& wb : w) wb /= factor;
      }
    }
  }
  if (it > o_.max_iterations) {
    std::ostringstream msg;
    msg << "conic solver did not converge in " << o_.max_iterations
        << " iterations (primal " << out.primal_residual << ", dual "
        << out.dual_residual << ")";
    throw ConvergenceError(msg.str());
  }
  out.iterations = it;

  out.rho.assign(t_ + 1, std::vector<ComplexMatrix>(g_));
  for (int j = 0; j <= t_; ++j) {
    for (int gx = 0; gx < g_; ++gx) {
      out.rho[j][gx] = HermitianMatrix::symmetrize(node_density(j, gx)).matrix();
    }
  }
  out.u.assign(t_, std::vector<BlockField>(g_));
  if (spatial_) out.q.assign(t_, std::vector<ComplexMatrix>(g_));
  double gap = 0.0;
  double objective = 0.0;
  for (int j = 0; j < t_; ++j) {
    for (int gx = 0; gx < g_; ++gx) {
      for (int b = 0; b < nb_; ++b) {
        const int idx = block_index(j, gx, b);
        const ComplexMatrix bb = x[idx].topRightCorner(n_, n_);
        if (b < nk_) {
          out.u[j][gx].blocks.push_back(bb);
        } else {
          out.q[j][gx] = bb;
        }
        const ComplexMatrix& zb = z[idx];
        const double trs = zb.bottomRightCorner(n_, n_).trace().real();
        objective += cost(gx, b) * trs;
        Eigen::LLT<ComplexMatrix> llt(zb.topLeftCorner(n_, n_));
        const ComplexMatrix zbb = zb.topRightCorner(n_, n_);
        const double schur =
            (zbb.adjoint() * llt.solve(zbb)).trace().real();
        gap = std::max(gap, trs - schur);
      }
    }
  }
  out.objective = objective;
  out.epigraph_gap = gap;
  return out;
}

}  // namespace

ConicSolution solve_conic(const ConicProblem& problem,
                          const ConicOptions& options) {
  Splitting s(problem, options);
  return s.run();
}

}  // namespace qot
