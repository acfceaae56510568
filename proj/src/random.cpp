#include "qot/random.hpp"

namespace qot {

ComplexMatrix random_ginibre(Rng& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = cplx(re, im);
    }
  }
  return g;
}

ComplexMatrix random_hermitian(Rng& rng, int n) {
  const ComplexMatrix g = random_ginibre(rng, n);
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_traceless_hermitian(Rng& rng, int n) {
  return project_traceless_hermitian(random_ginibre(rng, n)).matrix();
}

ComplexMatrix random_unitary(Rng& rng, int n) {
  const ComplexMatrix g = random_ginibre(rng, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

DensityMatrix random_density(Rng& rng, int n, double mix) {
  const ComplexMatrix g = random_ginibre(rng, n);
  ComplexMatrix w = g * g.adjoint();
  w /= w.trace().real();
  const ComplexMatrix rho =
      (1.0 - mix) * w + mix * ComplexMatrix::Identity(n, n) / double(n);
  return DensityMatrix(HermitianMatrix::symmetrize(rho));
}

}  // namespace qot
