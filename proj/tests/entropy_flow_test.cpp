#include <cmath>

#include "qot/entropy_flow.hpp"
#include "support.hpp"

namespace qot {
namespace {

using test::close;
using test::diag2;

TEST(Entropy, Values) {
  EXPECT_NEAR(entropy(ComplexMatrix::Identity(2, 2) / 2.0), std::log(2.0), 1e-14);
  EXPECT_NEAR(entropy(diag2(0.75, 0.25)), 0.562335144618808, 1e-12);
  EXPECT_NEAR(entropy(ComplexMatrix::Identity(3, 3) / 3.0), std::log(3.0), 1e-14);
  EXPECT_THROW(entropy(diag2(1.0, 0.0)), DomainError);
}

TEST(Entropy, UnitarilyInvariant) {
  Rng rng(1);
  for (int n : {2, 3, 4}) {
    const DensityMatrix rho = random_density(rng, n);
    const ComplexMatrix u = random_unitary(rng, n);
    EXPECT_NEAR(entropy(u * rho.matrix() * u.adjoint()), entropy(rho), 1e-12);
    EXPECT_LE(entropy(rho), std::log(double(n)));
  }
}

TEST(EntropyFlow, MaximallyMixedIsFixed) {
  for (MetricKind kind : {MetricKind::AntiCommutator, MetricKind::Logarithmic}) {
    const ComplexMatrix r = entropy_flow_rhs(
        LindbladBasis::gell_mann(3), ComplexMatrix::Identity(3, 3) / 3.0,
        multiplication_for(kind));
    EXPECT_LE(r.norm(), 1e-14);
  }
  const FlowTrace t = flow_anticomm(LindbladBasis::pauli(),
                                    DensityMatrix::maximally_mixed(2), 1.0, 0.1);
  for (const auto& s : t.states) {
    EXPECT_TRUE(close(s.matrix(), ComplexMatrix::Identity(2, 2) / 2.0, 1e-15));
  }
}

// Kubo-Mori multiplication turns grad log rho into grad rho, so the
// logarithmic entropy flow is the heat flow.
TEST(EntropyFlow, LogFlowIsHeatFlow) {
  Rng rng(2);
  const LindbladBasis b = LindbladBasis::gell_mann(3);
  const DensityMatrix rho = random_density(rng, 3);
  EXPECT_TRUE(close(entropy_flow_rhs(b, rho, multiplication_for(MetricKind::Logarithmic)),
                    laplacian_L(b, rho), 1e-10));
  const DensityMatrix g = flow_step_generic(
      b, rho, 0.01, multiplication_for(MetricKind::Logarithmic));
  EXPECT_TRUE(close(g.matrix(), heat_step(b, rho, 0.01).matrix(), 1e-10));
}

TEST(EntropyFlow, LogMatchesSemigroup) {
  Rng rng(3);
  const LindbladBasis b = LindbladBasis::gell_mann(3);
  const DensityMatrix rho = random_density(rng, 3);
  const FlowTrace t = flow_log(b, rho, 1.0, 1e-3, 100);
  ASSERT_EQ(t.times.size(), 11u);
  EXPECT_DOUBLE_EQ(t.times.back(), 1.0);
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    EXPECT_TRUE(close(t.states[k].matrix(),
                      heat_semigroup(b, rho, t.times[k]).matrix(), 1e-10));
  }
}

// dS/dt = -tr(rho' log rho) = sum_k <grad_k log rho, M_rho(grad log rho)_k>.
TEST(EntropyFlow, EntropyProductionIsFisherInformation) {
  Rng rng(4);
  const LindbladBasis b = LindbladBasis::pauli();
  for (MetricKind kind : {MetricKind::AntiCommutator, MetricKind::Logarithmic}) {
    const DensityMatrix rho = random_density(rng, 2, 0.2);
    const Multiplication mult = multiplication_for(kind);
    const ComplexMatrix log_rho = matrix_log(rho.matrix()).matrix();
    const BlockField g = grad_L(b, log_rho);
    const BlockField m = mult(rho.matrix(), g);
    double fisher = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      fisher += (g[k].adjoint() * m[k]).trace().real();
    }
    EXPECT_GT(fisher, 0.0);
    const ComplexMatrix rate = entropy_flow_rhs(b, rho, mult);
    EXPECT_NEAR(-(rate * log_rho).trace().real(), fisher, 1e-10);
    auto forward = [&](double h) {
      return (entropy(flow_step_generic(b, rho, h, mult)) - entropy(rho)) / h;
    };
    const double fd = 2.0 * forward(5e-5) - forward(1e-4);
    EXPECT_NEAR(fd, fisher, 1e-6 * fisher);
  }
}

TEST(EntropyFlow, AntiCommutatorMonotoneAndConverges) {
  Rng rng(5);
  const LindbladBasis b = LindbladBasis::gell_mann(3);
  const DensityMatrix rho = random_density(rng, 3);
  const FlowTrace early = flow_anticomm(b, rho, 1.0, 1e-3, 100);
  EXPECT_GT(early.min_entropy_increment, 0.0);
  for (std::size_t k = 1; k < early.entropies.size(); ++k) {
    EXPECT_GT(early.entropies[k], early.entropies[k - 1]);
  }
  // Near the maximally mixed state increments reach rounding level.
  const FlowTrace t = flow_anticomm(b, rho, 5.0, 1e-3, 500);
  EXPECT_GE(t.min_entropy_increment, -1e-14);
  for (double d : t.trace_drift) EXPECT_LE(d, tol::kTrace);
  for (double m : t.min_eigenvalues) EXPECT_GT(m, 0.0);
  EXPECT_LE((t.states.back().matrix() - ComplexMatrix::Identity(3, 3) / 3.0).norm(),
            1e-6);
}

TEST(EntropyFlow, LogLongTimeLimit) {
  Rng rng(6);
  const FlowTrace t =
      flow_log(LindbladBasis::pauli(), random_density(rng, 2), 10.0, 1e-2, 1000);
  EXPECT_LE((t.states.back().matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm(),
            1e-6);
}

// dt is shrunk so that a whole number of steps reaches t_final.
TEST(EntropyFlow, StrideRecordsFinalTime) {
  Rng rng(7);
  const FlowTrace t =
      flow_log(LindbladBasis::pauli(), random_density(rng, 2), 0.35, 0.1, 2);
  ASSERT_EQ(t.times.size(), 3u);
  EXPECT_NEAR(t.times[1], 2 * 0.35 / 4, 1e-15);
  EXPECT_NEAR(t.times[2], 0.35, 1e-15);
}

TEST(EntropyFlow, OversizedStepLosesPositivity) {
  Rng rng(8);
  const DensityMatrix rho = random_density(rng, 2);
  for (MetricKind kind : {MetricKind::AntiCommutator, MetricKind::Logarithmic}) {
    try {
      if (kind == MetricKind::Logarithmic) {
        flow_log(LindbladBasis::pauli(), rho, 1e6, 1e6);
      } else {
        flow_anticomm(LindbladBasis::pauli(), rho, 1e6, 1e6);
      }
      ADD_FAILURE() << "no PositivityError for " << to_string(kind);
    } catch (const PositivityError& e) {
      EXPECT_EQ(e.step(), 1);
    }
  }
}

TEST(EntropyFlow, ModerateStepIsRescuedByHalving) {
  Rng rng(9);
  const FlowTrace t =
      flow_anticomm(LindbladBasis::pauli(), random_density(rng, 2), 2.0, 1.0);
  for (double m : t.min_eigenvalues) EXPECT_GT(m, 0.0);
}

TEST(EntropyFlow, RejectsBadArguments) {
  Rng rng(10);
  const DensityMatrix rho = random_density(rng, 2);
  EXPECT_THROW(flow_log(LindbladBasis::pauli(), rho, 1.0, 0.0), DomainError);
  EXPECT_THROW(flow_log(LindbladBasis::pauli(), rho, 1.0, 0.1, 0), DomainError);
  EXPECT_THROW(flow_log(LindbladBasis::gell_mann(3), rho, 1.0, 0.1), DimensionError);
}

}  // namespace
}  // namespace qot
