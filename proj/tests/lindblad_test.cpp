#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qot/lindblad.hpp"
#include "support.hpp"

namespace qot {
namespace {

using test::close;
using test::diag2;
using test::I1;

LindbladBasis single(const ComplexMatrix& l) {
  // {L} alone has a two-dimensional commutant; build the fields by hand
  // through a valid basis that starts with L.
  return LindbladBasis({HermitianMatrix(l), HermitianMatrix(sigma_z())});
}

TEST(Basis, Presets) {
  EXPECT_EQ(LindbladBasis::pauli().size(), 3u);
  EXPECT_EQ(LindbladBasis::gell_mann(3).size(), 8u);
  EXPECT_EQ(LindbladBasis::from_name("gellmann:4").dim(), 4);
  EXPECT_EQ(LindbladBasis::from_name("pauli").dim(), 2);
  EXPECT_THROW(LindbladBasis::from_name("gellmann:x"), Error);
  EXPECT_THROW(LindbladBasis::from_name("nope"), Error);
}

TEST(Basis, RejectsLargeCommutant) {
  EXPECT_THROW(LindbladBasis({HermitianMatrix(sigma_x())}), DomainError);
  EXPECT_THROW(LindbladBasis({HermitianMatrix(sigma_z()),
                              HermitianMatrix(ComplexMatrix(diag2(2.0, -1.0)))}),
               DomainError);
  const LindbladBasis xz({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_z())});
  EXPECT_GT(xz.null_space_gap(), LindbladBasis::kNullSpaceGap);
}

TEST(Basis, EmptyOnlyForScalars) {
  EXPECT_NO_THROW(LindbladBasis({}, 1));
  EXPECT_THROW(LindbladBasis({}, 2), DomainError);
}

TEST(Gradient, Examples) {
  const LindbladBasis b = single(sigma_x());
  EXPECT_NEAR(grad_L(b, ComplexMatrix::Identity(2, 2)).norm(), 0.0, 1e-15);
  EXPECT_TRUE(close(grad_L(b, sigma_z())[0], -2.0 * I1 * sigma_y(), 1e-15));
  const LindbladBasis xz({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_z())});
  const BlockField g = grad_L(xz, sigma_y());
  EXPECT_TRUE(close(g[0], 2.0 * I1 * sigma_z(), 1e-15));
  EXPECT_TRUE(close(g[1], -2.0 * I1 * sigma_x(), 1e-15));
}

TEST(Divergence, Examples) {
  const LindbladBasis b = single(sigma_x());
  EXPECT_NEAR(div_L(b, BlockField::zero(2, 2)).norm(), 0.0, 0.0);
  BlockField y = BlockField::zero(2, 2);
  y[0] = -2.0 * I1 * sigma_y();
  // sum_k L_k Y_k - Y_k L_k = [sigma_x, -2i sigma_y]
  EXPECT_TRUE(close(div_L(b, y), 4.0 * sigma_z(), 1e-15));
}

TEST(Divergence, AdjointOfGradient) {
  Rng rng(21);
  for (const auto& b : {LindbladBasis::pauli(), LindbladBasis::gell_mann(3)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const ComplexMatrix x = random_hermitian(rng, b.dim());
      BlockField y;
      for (std::size_t k = 0; k < b.size(); ++k) {
        y.blocks.push_back(I1 * random_hermitian(rng, b.dim()));
      }
      EXPECT_LT(std::abs(hs_inner(grad_L(b, x), y) - hs_inner(x, div_L(b, y))),
                1e-12 * x.norm() * y.norm());
    }
  }
}

TEST(Laplacian, Examples) {
  const LindbladBasis xonly = single(sigma_x());
  // the sigma_z member adds nothing on sigma_z
  EXPECT_TRUE(close(laplacian_L(xonly, sigma_z()), -4.0 * sigma_z(), 1e-15));
  EXPECT_NEAR(laplacian_L(LindbladBasis::pauli(), ComplexMatrix::Identity(2, 2)).norm(),
              0.0, 1e-15);
  const LindbladBasis xz({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_z())});
  EXPECT_TRUE(close(laplacian_L(xz, sigma_y()), -8.0 * sigma_y(), 1e-14));
}

TEST(Laplacian, EqualsMinusDivGrad) {
  Rng rng(2);
  const LindbladBasis b = LindbladBasis::gell_mann(4);
  const ComplexMatrix x = random_hermitian(rng, 4);
  EXPECT_TRUE(close(laplacian_L(b, x), -div_L(b, grad_L(b, x)), 1e-12));
}

TEST(ProductRule, RandomPairs) {
  Rng rng(4);
  const LindbladBasis b = LindbladBasis::gell_mann(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix x = random_hermitian(rng, 3);
    const ComplexMatrix y = random_hermitian(rng, 3);
    const BlockField lhs = grad_L(b, x * y + y * x);
    const BlockField gx = grad_L(b, x), gy = grad_L(b, y);
    for (std::size_t k = 0; k < b.size(); ++k) {
      EXPECT_TRUE(close(lhs[k], gx[k] * y + x * gy[k] + gy[k] * x + y * gx[k],
                        1e-12 * lhs.norm()));
    }
  }
}

TEST(LogMean, Values) {
  EXPECT_NEAR(log_mean(0.75, 0.25), 0.5 / std::log(3.0), 1e-15);
  EXPECT_NEAR(log_mean(0.3, 0.3), 0.3, 0.0);
  EXPECT_NEAR(log_mean(0.3, 0.3 * (1 + 1e-13)), 0.3 * (1 + 0.5e-13), 1e-16);
  EXPECT_NEAR(log_mean(2.0, 1.0), 1.0 / std::log(2.0), 1e-15);
  // symmetric, between geometric and arithmetic means
  EXPECT_NEAR(log_mean(0.1, 0.9), log_mean(0.9, 0.1), 1e-16);
  EXPECT_GT(log_mean(0.1, 0.9), std::sqrt(0.09));
  EXPECT_LT(log_mean(0.1, 0.9), 0.5);
}

TEST(LogMean, DerivativeMatchesDifferences) {
  for (double a : {0.2, 0.5, 0.50001, 0.9}) {
    const double c = 0.5;
    const double h = 1e-6;
    const double fd = (log_mean(a + h, c) - log_mean(a - h, c)) / (2 * h);
    EXPECT_NEAR(log_mean_derivative(a, c), fd, 1e-8);
  }
  EXPECT_NEAR(log_mean_derivative(0.4, 0.4), 0.5, 1e-14);
}

TEST(Multiplication, AntiCommutatorExamples) {
  BlockField v = BlockField::zero(1, 2);
  v[0] = I1 * sigma_x();
  EXPECT_TRUE(close(mult_anticomm(ComplexMatrix::Identity(2, 2) / 2.0, v)[0],
                    v[0] / 2.0, 1e-15));
  EXPECT_TRUE(close(mult_anticomm(diag2(0.75, 0.25), v)[0], 0.5 * I1 * sigma_x(),
                    1e-15));
  EXPECT_NEAR(mult_anticomm(diag2(0.75, 0.25), BlockField::zero(1, 2)).norm(), 0.0,
              0.0);
}

TEST(Multiplication, KuboMoriExamples) {
  Rng rng(9);
  const ComplexMatrix v0 = random_ginibre(rng, 3);
  const BlockField v({v0});
  EXPECT_TRUE(close(mult_kubo_mori(ComplexMatrix::Identity(3, 3) / 3.0, v)[0],
                    v0 / 3.0, 1e-15));
  const BlockField x({ComplexMatrix(I1 * sigma_x())});
  const double factor = 0.5 / std::log(3.0);
  EXPECT_NEAR(factor, 0.455120, 1e-6);
  EXPECT_TRUE(close(mult_kubo_mori(diag2(0.75, 0.25), x)[0], factor * x[0], 1e-15));
  EXPECT_TRUE(close(mult_kubo_mori_inverse(diag2(0.75, 0.25), x)[0], x[0] / factor,
                    1e-14));
  EXPECT_NEAR(1.0 / factor, 2.197225, 1e-6);
  EXPECT_TRUE(close(mult_kubo_mori_inverse(ComplexMatrix::Identity(3, 3) / 3.0, v)[0],
                    3.0 * v0, 1e-14));
}

TEST(Multiplication, KuboMoriInverseComposition) {
  Rng rng(10);
  for (int n = 2; n <= 4; ++n) {
    const DensityMatrix rho = random_density(rng, n);
    const BlockField v({random_ginibre(rng, n), random_ginibre(rng, n)});
    const BlockField back =
        mult_kubo_mori_inverse(rho.matrix(), mult_kubo_mori(rho.matrix(), v));
    EXPECT_LE((back - v).norm(), 1e-10 * v.norm());
  }
}

TEST(Multiplication, KuboMoriMatchesIntegral) {
  // int_0^1 rho^s v rho^(1-s) ds by Gauss-Legendre on matrix exponentials
  Rng rng(12);
  const DensityMatrix rho = random_density(rng, 3, 0.2);
  const ComplexMatrix v = random_ginibre(rng, 3);
  const ComplexMatrix logr = rho.matrix().log();
  const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
  const double weights[5] = {0.2369268850561891, 0.4786286704993665,
                             0.5688888888888889, 0.4786286704993665,
                             0.2369268850561891};
  ComplexMatrix acc = ComplexMatrix::Zero(3, 3);
  const int panels = 40;
  for (int p = 0; p < panels; ++p) {
    for (int q = 0; q < 5; ++q) {
      const double s = (p + 0.5 + 0.5 * nodes[q]) / panels;
      acc += 0.5 / panels * weights[q] *
             ComplexMatrix((s * logr).exp()) * v * ComplexMatrix(((1 - s) * logr).exp());
    }
  }
  EXPECT_LE(relative_frobenius(KuboMoriKernel(rho.matrix()).apply(v), acc), 1e-11);
}

TEST(Multiplication, LogIdentity) {
  Rng rng(13);
  for (const auto& b : {LindbladBasis::pauli(), LindbladBasis::gell_mann(3),
                        LindbladBasis::gell_mann(4)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const DensityMatrix rho = random_density(rng, b.dim());
      const BlockField lhs =
          mult_kubo_mori(rho.matrix(), grad_L(b, matrix_log(rho.matrix())));
      const BlockField rhs = grad_L(b, rho.matrix());
      EXPECT_LE((lhs - rhs).norm(), 1e-10 * rhs.norm());
    }
  }
}

TEST(KuboMori, RejectsSingular) {
  EXPECT_THROW(KuboMoriKernel(diag2(1.0, 0.0)), DomainError);
}

TEST(Superoperator, LaplacianExamples) {
  const LindbladBasis xonly = single(sigma_x());
  const Superoperator s = laplacian_superoperator(xonly);
  EXPECT_NEAR(s.apply(ComplexMatrix::Identity(2, 2)).norm(), 0.0, 1e-15);
  EXPECT_TRUE(close(s.apply(sigma_z()), -4.0 * sigma_z(), 1e-15));
  Rng rng(14);
  const LindbladBasis b = LindbladBasis::gell_mann(3);
  const Superoperator s3 = laplacian_superoperator(b);
  const ComplexMatrix x = random_ginibre(rng, 3);
  EXPECT_TRUE(close(s3.apply(x), laplacian_L(b, x), 1e-12));
  EXPECT_TRUE(close(unvec(s3.matrix * vec(x), 3), laplacian_L(b, x), 1e-12));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s3.matrix);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-12);
}

TEST(HeatSemigroup, Limits) {
  Rng rng(15);
  const LindbladBasis xz({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_z())});
  const DensityMatrix rho0 = random_density(rng, 2);
  EXPECT_TRUE(close(heat_semigroup(xz, rho0, 0.0).matrix(), rho0.matrix(), 1e-15));
  EXPECT_TRUE(close(heat_semigroup(xz, rho0, 10.0).matrix(),
                    ComplexMatrix::Identity(2, 2) / 2.0, 1e-8));
  for (double t : {0.01, 0.3, 2.0}) {
    EXPECT_NEAR(heat_semigroup(LindbladBasis::gell_mann(3), random_density(rng, 3), t)
                    .matrix()
                    .trace()
                    .real(),
                1.0, 1e-10);
  }
}

TEST(LindbladStep, RelaxesToMaximallyMixed) {
  Rng rng(16);
  const LindbladBasis xz({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_z())});
  DensityMatrix rho = random_density(rng, 2);
  for (int k = 0; k < 4000; ++k) {
    rho = lindblad_step(xz, ComplexMatrix::Zero(2, 2), rho, 5e-3);
  }
  EXPECT_TRUE(close(rho.matrix(), ComplexMatrix::Identity(2, 2) / 2.0, 1e-8));
}

TEST(LindbladStep, UnitaryKeepsPurity) {
  Rng rng(17);
  DensityMatrix rho = random_density(rng, 2);
  const double purity = (rho.matrix() * rho.matrix()).trace().real();
  for (int k = 0; k < 1000; ++k) rho = lindblad_step({}, sigma_z(), rho, 1e-2);
  EXPECT_NEAR((rho.matrix() * rho.matrix()).trace().real(), purity, 1e-9);
}

TEST(LindbladStep, FifthOrderLocalError) {
  Rng rng(18);
  const LindbladBasis b = LindbladBasis::pauli();
  const DensityMatrix rho = random_density(rng, 2);
  double prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const ComplexMatrix step = lindblad_step(b, ComplexMatrix::Zero(2, 2), rho, dt).matrix();
    // rho' = (1/2) Delta_L rho
    const double err =
        (step - heat_semigroup(b, rho, 0.5 * dt).matrix()).norm();
    if (prev > 0.0) EXPECT_GT(prev / err, 24.0);  // 2^5 = 32
    prev = err;
  }
}

}  // namespace
}  // namespace qot
