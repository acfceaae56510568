#pragma once

// Classical RK4 on a list of Hermitian matrices with step-local recursive
// halving when a stage or the result leaves the positive-definite cone.

#include <functional>
#include <vector>

#include "qot/herm.hpp"

namespace qot::detail {

using MatrixList = std::vector<ComplexMatrix>;

struct GuardedRk4 {
  /// Throws DomainError when the state is (nearly) singular.
  std::function<MatrixList(const MatrixList&)> rhs;
  int max_halvings = 20;

  MatrixList step(const MatrixList& x, double dt) const {
    return step(x, dt, 0);
  }

 private:
  static MatrixList axpy(const MatrixList& x, double a, const MatrixList& k) {
    MatrixList out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = HermitianMatrix::symmetrize(x[i] + a * k[i]).matrix();
    }
    return out;
  }

  MatrixList attempt(const MatrixList& x, double dt) const {
    const MatrixList k1 = rhs(x);
    const MatrixList k2 = rhs(axpy(x, 0.5 * dt, k1));
    const MatrixList k3 = rhs(axpy(x, 0.5 * dt, k2));
    const MatrixList k4 = rhs(axpy(x, dt, k3));
    MatrixList out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = HermitianMatrix::symmetrize(
                   x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                   .matrix();
      if (!(min_eigenvalue(out[i]) > tol::kPositive)) {
        throw DomainError("RK4 step left the positive-definite cone");
      }
    }
    return out;
  }

  MatrixList step(const MatrixList& x, double dt, int depth) const {
    try {
      return attempt(x, dt);
    } catch (const DomainError& e) {
      if (depth >= max_halvings) {
        throw PositivityError(
            std::string("positivity lost after repeated step halving: ") +
                e.what(),
            -1);
      }
      const MatrixList half = step(x, 0.5 * dt, depth + 1);
      return step(half, 0.5 * dt, depth + 1);
    }
  }
};

}  // namespace qot::detail
