#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "qot/herm.hpp"
#include "support.hpp"

namespace qot {
namespace {

using test::close;
using test::diag2;
using test::I1;

TEST(HsInner, PauliValues) {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  EXPECT_NEAR(std::abs(hs_inner(id, id) - cplx(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(hs_inner(sigma_x(), sigma_z())), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(hs_inner(sigma_y(), sigma_y()) - cplx(2.0)), 0.0, 1e-15);
}

TEST(HsInner, ConjugateSymmetricAndLinearInSecond) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix x = random_ginibre(rng, 3);
    const ComplexMatrix y = random_ginibre(rng, 3);
    const ComplexMatrix z = random_ginibre(rng, 3);
    const cplx a(0.4, -2.0);
    EXPECT_LT(std::abs(hs_inner(x, y) - std::conj(hs_inner(y, x))), 1e-12);
    EXPECT_LT(std::abs(hs_inner(x, a * y + z) - a * hs_inner(x, y) -
                       hs_inner(x, z)),
              1e-12);
  }
}

TEST(Eigh, IdentityAndDiagonal) {
  const EigenDecomposition e = eigh(ComplexMatrix::Identity(2, 2));
  EXPECT_NEAR(e.values(0), 1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
  EXPECT_TRUE(close(e.vectors, ComplexMatrix::Identity(2, 2), 1e-15));
  const EigenDecomposition z = eigh(sigma_z());
  EXPECT_NEAR(z.values(0), -1.0, 1e-15);
  EXPECT_NEAR(z.values(1), 1.0, 1e-15);
}

TEST(Eigh, SigmaXVectors) {
  const EigenDecomposition e = eigh(sigma_x());
  EXPECT_NEAR(e.values(0), -1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
  // largest component real positive, lowest row index on ties
  ComplexMatrix expected(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  expected << s, s, -s, s;
  EXPECT_TRUE(close(e.vectors, expected, 1e-14));
}

TEST(Eigh, RandomReconstructionAndPhase) {
  Rng rng(3);
  for (int n = 1; n <= 6; ++n) {
    const ComplexMatrix a = random_hermitian(rng, n);
    const EigenDecomposition e = eigh(a);
    EXPECT_LE(relative_frobenius(e.reconstruct(), a), tol::kReconstruction);
    for (int i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
    for (int c = 0; c < n; ++c) {
      Eigen::Index r;
      e.vectors.col(c).cwiseAbs().maxCoeff(&r);
      EXPECT_GT(e.vectors(r, c).real(), 0.0);
      EXPECT_NEAR(e.vectors(r, c).imag(), 0.0, 1e-15);
    }
  }
}

TEST(MatrixFunction, Examples) {
  EXPECT_TRUE(close(matrix_function(ComplexMatrix::Identity(3, 3),
                                    [](double x) { return std::log(x); }),
                    ComplexMatrix::Zero(3, 3), 1e-15));
  EXPECT_TRUE(close(matrix_function(diag2(4, 1), [](double x) { return std::sqrt(x); }),
                    diag2(2, 1), 1e-15));
  const ComplexMatrix expected =
      std::cosh(1.0) * ComplexMatrix::Identity(2, 2) + std::sinh(1.0) * sigma_x();
  EXPECT_TRUE(close(matrix_function(sigma_x(), [](double x) { return std::exp(x); }),
                    expected, 1e-14));
}

TEST(MatrixFunction, ExpMatchesPade) {
  Rng rng(5);
  for (int n = 2; n <= 5; ++n) {
    const ComplexMatrix a = random_hermitian(rng, n);
    const ComplexMatrix pade = a.exp();
    EXPECT_LE(relative_frobenius(
                  matrix_function(a, [](double x) { return std::exp(x); }), pade),
              1e-12);
  }
}

TEST(MatrixFunction, LogInvertsExp) {
  Rng rng(6);
  for (int n = 2; n <= 5; ++n) {
    const DensityMatrix rho = random_density(rng, n);
    const ComplexMatrix back = matrix_log(rho.matrix()).matrix().exp();
    EXPECT_LE(relative_frobenius(back, rho.matrix()), 1e-10);
  }
}

TEST(MatrixFunction, RejectsNonFiniteValues) {
  EXPECT_THROW(matrix_log(diag2(1.0, -1.0)), DomainError);
  EXPECT_THROW(matrix_function(diag2(0.0, 1.0), [](double x) { return 1.0 / x; }),
               DomainError);
}

TEST(ProjectTraceless, Examples) {
  EXPECT_TRUE(close(project_traceless_hermitian(ComplexMatrix::Identity(2, 2)).matrix(),
                    ComplexMatrix::Zero(2, 2), 1e-15));
  EXPECT_TRUE(close(project_traceless_hermitian(sigma_z()).matrix(), sigma_z(), 1e-15));
  EXPECT_TRUE(close(project_traceless_hermitian(I1 * sigma_z()).matrix(),
                    ComplexMatrix::Zero(2, 2), 1e-15));
}

TEST(Types, Validation) {
  ComplexMatrix a = sigma_x();
  a(0, 1) = 2.0;
  EXPECT_THROW(HermitianMatrix{a}, DomainError);
  EXPECT_THROW(DensityMatrix{diag2(0.6, 0.6)}, DomainError);
  EXPECT_THROW(DensityMatrix{diag2(1.5, -0.5)}, DomainError);
  EXPECT_THROW(TangentVector{diag2(1.0, 0.0)}, DomainError);
  EXPECT_NO_THROW(TangentVector{sigma_z()});
  EXPECT_NO_THROW(SkewHermitianMatrix{ComplexMatrix(I1 * sigma_y())});
  EXPECT_THROW(SkewHermitianMatrix{sigma_y()}, DomainError);
  const DensityMatrix rho(diag2(0.75, 0.25));
  EXPECT_NEAR(rho.min_eigenvalue(), 0.25, 1e-15);
}

TEST(Frame, OrthonormalWithIdentityFirst) {
  for (int n = 1; n <= 4; ++n) {
    const HermitianFrame f(n);
    ASSERT_EQ(f.size(), n * n);
    EXPECT_TRUE(close(f.element(0),
                      ComplexMatrix::Identity(n, n) / std::sqrt(double(n)), 1e-15));
    for (int a = 0; a < f.size(); ++a) {
      for (int b = 0; b < f.size(); ++b) {
        EXPECT_NEAR(std::abs(hs_inner(f.element(a), f.element(b)) -
                             cplx(a == b ? 1.0 : 0.0)),
                    0.0, 1e-14);
      }
    }
  }
}

TEST(Frame, CoordinatesRoundTrip) {
  Rng rng(8);
  const HermitianFrame f(3);
  const ComplexMatrix a = random_hermitian(rng, 3);
  EXPECT_TRUE(close(f.compose(f.coordinates(a)), a, 1e-13));
  const ComplexMatrix t = random_traceless_hermitian(rng, 3);
  EXPECT_TRUE(close(f.compose_traceless(f.traceless_coordinates(t)), t, 1e-13));
}

TEST(GellMann, Normalization) {
  for (int n = 2; n <= 4; ++n) {
    const auto g = gell_mann_matrices(n);
    ASSERT_EQ(static_cast<int>(g.size()), n * n - 1);
    for (std::size_t a = 0; a < g.size(); ++a) {
      EXPECT_NEAR(std::abs(g[a].trace()), 0.0, 1e-15);
      for (std::size_t b = 0; b < g.size(); ++b) {
        EXPECT_NEAR(std::abs(hs_inner(g[a], g[b]) - cplx(a == b ? 2.0 : 0.0)), 0.0,
                    1e-14);
      }
    }
  }
  const auto p = gell_mann_matrices(2);
  EXPECT_TRUE(close(p[0], sigma_x(), 0.0));
  EXPECT_TRUE(close(p[1], sigma_y(), 0.0));
  EXPECT_TRUE(close(p[2], sigma_z(), 0.0));
}

TEST(BlockField, Arithmetic) {
  BlockField a = BlockField::zero(2, 2);
  a[0] = I1 * sigma_x();
  BlockField b = a + a;
  EXPECT_NEAR(b.norm(), 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(is_skew_hermitian(b));
  EXPECT_NEAR((b - 2.0 * a).norm(), 0.0, 1e-15);
}

}  // namespace
}  // namespace qot
