#include "qot/check.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qot/entropy_flow.hpp"
#include "qot/geodesic.hpp"
#include "qot/random.hpp"
#include "qot/spatial.hpp"

namespace qot::check {

namespace {

using io::json;

class Record {
 public:
  void at_most(const std::string& key, double value, double limit) {
    metrics_[key] = {{"value", value}, {"max", limit}};
    if (!(value <= limit)) passed_ = false;
  }
  void at_least(const std::string& key, double value, double limit) {
    metrics_[key] = {{"value", value}, {"min", limit}};
    if (!(value >= limit)) passed_ = false;
  }
  void expect(const std::string& key, bool ok) {
    metrics_[key] = ok;
    if (!ok) passed_ = false;
  }
  void note(const std::string& key, double value) { metrics_[key] = value; }

  bool passed() const { return passed_; }
  const json& metrics() const { return metrics_; }

 private:
  json metrics_ = json::object();
  bool passed_ = true;
};

using SuiteFn = std::function<void(Rng&, Record&)>;

struct Entry {
  Suite info;
  SuiteFn fn;
};

const std::vector<std::string> kCalculusBases = {"pauli", "gellmann:3",
                                                 "gellmann:4"};

BlockField random_blocks(Rng& rng, std::size_t count, int n) {
  BlockField f;
  for (std::size_t k = 0; k < count; ++k) f.blocks.push_back(random_ginibre(rng, n));
  return f;
}

MatrixField random_density_field(Rng& rng, const Grid& grid, int n) {
  MatrixField f;
  for (int x = 0; x < grid.size(); ++x) f.push_back(random_density(rng, n).matrix());
  const double mass = field_mass(grid, f);
  for (auto& m : f) m /= mass;
  return f;
}

// ---------------------------------------------------------------------------

void suite_herm(Rng& rng, Record& rec) {
  double recon = 0.0, explog = 0.0, conj_sym = 0.0, linear = 0.0;
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix a = random_hermitian(rng, n);
      recon = std::max(recon, relative_frobenius(eigh(a).reconstruct(), a));
      const DensityMatrix rho = random_density(rng, n);
      const ComplexMatrix back = matrix_function(
          matrix_log(rho.matrix()).matrix(), [](double v) { return std::exp(v); });
      explog = std::max(explog, relative_frobenius(back, rho.matrix()));
      const ComplexMatrix x = random_ginibre(rng, n);
      const ComplexMatrix y = random_ginibre(rng, n);
      const ComplexMatrix z = random_ginibre(rng, n);
      const cplx alpha(0.3, -1.2), beta(-0.7, 0.4);
      const double scale = x.norm() * (y.norm() + z.norm());
      conj_sym = std::max(
          conj_sym, std::abs(hs_inner(x, y) - std::conj(hs_inner(y, x))) / scale);
      linear = std::max(linear, std::abs(hs_inner(x, alpha * y + beta * z) -
                                         alpha * hs_inner(x, y) -
                                         beta * hs_inner(x, z)) /
                                    scale);
    }
  }
  rec.at_most("reconstruction", recon, tol::kReconstruction);
  rec.at_most("exp_log", explog, 1e-10);
  rec.at_most("conjugate_symmetry", conj_sym, 1e-14);
  rec.at_most("linearity", linear, 1e-14);
}

void suite_adjointness(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (const auto& name : kCalculusBases) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexMatrix x = random_ginibre(rng, n);
      const BlockField y = random_blocks(rng, basis.size(), n);
      const cplx lhs = hs_inner(grad_L(basis, x), y);
      const cplx rhs = hs_inner(x, div_L(basis, y));
      worst = std::max(worst, std::abs(lhs - rhs) / (x.norm() * y.norm()));
    }
  }
  rec.at_most("relative_error", worst, 1e-12);
}

void suite_product_rule(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (const auto& name : kCalculusBases) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexMatrix x = random_hermitian(rng, n);
      const ComplexMatrix y = random_hermitian(rng, n);
      const BlockField lhs = grad_L(basis, x * y + y * x);
      const BlockField gx = grad_L(basis, x);
      const BlockField gy = grad_L(basis, y);
      BlockField rhs;
      for (std::size_t k = 0; k < basis.size(); ++k) {
        rhs.blocks.push_back(gx[k] * y + x * gy[k] + gy[k] * x + y * gx[k]);
      }
      worst = std::max(worst, (lhs - rhs).norm() / lhs.norm());
    }
  }
  rec.at_most("relative_error", worst, 1e-12);
}

void suite_identity28(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const LindbladBasis basis =
        LindbladBasis::from_name(kCalculusBases[trial % kCalculusBases.size()]);
    const DensityMatrix rho = random_density(rng, basis.dim());
    const BlockField lhs =
        mult_kubo_mori(rho.matrix(), grad_L(basis, matrix_log(rho.matrix())));
    const BlockField rhs = grad_L(basis, rho.matrix());
    worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
  }
  rec.at_most("relative_error", worst, 1e-10);
}

// Midpoint rule for int_0^1 rho^s v rho^(1-s) ds with powers taken from an
// independent eigensolver.
ComplexMatrix kubo_mori_quadrature(const ComplexMatrix& rho,
                                   const ComplexMatrix& v, int nodes) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  const ComplexMatrix& u = es.eigenvectors();
  const Eigen::VectorXd& p = es.eigenvalues();
  auto power = [&](double s) {
    const Eigen::VectorXcd d = p.array().pow(s).cast<cplx>();
    return ComplexMatrix(u * d.asDiagonal() * u.adjoint());
  };
  const int n = static_cast<int>(rho.rows());
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < nodes; ++k) {
    const double s = (k + 0.5) / nodes;
    acc += power(s) * v * power(1.0 - s);
  }
  return acc / static_cast<double>(nodes);
}

void suite_quadrature(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const DensityMatrix rho = random_density(rng, n, 0.3);
    const ComplexMatrix v = random_ginibre(rng, n);
    const ComplexMatrix quad = kubo_mori_quadrature(rho.matrix(), v, 10000);
    const ComplexMatrix kernel = KuboMoriKernel(rho.matrix()).apply(v);
    worst = std::max(worst, relative_frobenius(kernel, quad));
  }
  rec.at_most("relative_error", worst, 1e-8);
}

// Matrix of a real-linear map on Hermitians in orthonormal frame coordinates.
Eigen::MatrixXd frame_matrix(int n,
                             const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  const HermitianFrame& frame = frame_for(n);
  Eigen::MatrixXd r(frame.size(), frame.size());
  for (int b = 0; b < frame.size(); ++b) {
    r.col(b) = frame.coordinates(f(frame.element(b)));
  }
  return r;
}

void suite_laplacian_kernel(Rng& rng, Record& rec) {
  std::vector<LindbladBasis> bases = {
      LindbladBasis::pauli(), LindbladBasis::gell_mann(3),
      LindbladBasis::gell_mann(4),
      LindbladBasis({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_z())})};
  bases.push_back(LindbladBasis::gell_mann(3).conjugated(random_unitary(rng, 3)));
  double top = -1.0, overlap = 1.0, gap = 1e300;
  bool single = true;
  for (const auto& basis : bases) {
    const int n = basis.dim();
    const Eigen::MatrixXd r = frame_matrix(
        n, [&basis](const ComplexMatrix& x) { return laplacian_L(basis, x); });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (r + r.transpose()));
    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
    const double scale = ev.cwiseAbs().maxCoeff();
    top = std::max(top, ev(ev.size() - 1) / scale);
    int zeros = 0;
    for (int i = 0; i < ev.size(); ++i) zeros += std::abs(ev(i)) <= 1e-10 * scale;
    single = single && zeros == 1;
    overlap = std::min(overlap, std::abs(es.eigenvectors()(0, ev.size() - 1)));
    gap = std::min(gap, -ev(ev.size() - 2) / scale);
  }
  rec.at_most("largest_eigenvalue_relative", top, 1e-12);
  rec.expect("one_dimensional_kernel", single);
  rec.at_least("kernel_identity_overlap", overlap, 1.0 - 1e-12);
  rec.note("smallest_relative_gap", gap);
}

void suite_heat_flow(Rng& rng, Record& rec) {
  double worst = 0.0, terminal = 0.0;
  for (const std::string name : {"pauli", "gellmann:3"}) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    const DensityMatrix rho0 = random_density(rng, n);
    const FlowTrace trace = flow_log(basis, rho0, 10.0, 1e-3, 100);
    const Superoperator lap = laplacian_superoperator(basis);
    for (double t : {0.1, 0.5, 1.0}) {
      const auto it = std::find_if(trace.times.begin(), trace.times.end(),
                                   [t](double s) { return std::abs(s - t) < 1e-9; });
      if (it == trace.times.end()) {
        rec.expect("time_grid", false);
        return;
      }
      const ComplexMatrix& got = trace.states[it - trace.times.begin()].matrix();
      worst = std::max(worst, relative_frobenius(
                                  got, heat_semigroup(lap, rho0, t).matrix()));
    }
    terminal = std::max(
        terminal, (trace.states.back().matrix() -
                   ComplexMatrix::Identity(n, n) / static_cast<double>(n))
                      .norm());
  }
  rec.at_most("relative_error", worst, 1e-6);
  rec.at_most("terminal_distance", terminal, 1e-6);
}

void suite_entropy_monotone(Rng& rng, Record& rec) {
  double increment = 1e300, drift = 0.0, lowest = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const LindbladBasis basis =
        LindbladBasis::from_name(trial % 2 ? "gellmann:3" : "pauli");
    const DensityMatrix rho0 = random_density(rng, basis.dim());
    for (const FlowTrace& tr : {flow_anticomm(basis, rho0, 0.5, 1e-3, 50),
                                flow_log(basis, rho0, 0.5, 1e-3, 50)}) {
      increment = std::min(increment, tr.min_entropy_increment);
      for (double d : tr.trace_drift) drift = std::max(drift, d);
      for (double e : tr.min_eigenvalues) lowest = std::min(lowest, e);
    }
  }
  rec.at_least("min_entropy_increment", increment, -1e-12);
  rec.at_most("trace_drift", drift, tol::kTrace);
  rec.at_least("min_eigenvalue", lowest, tol::kPositive);
}

void suite_flow_identity28(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (const std::string name : {"pauli", "gellmann:3"}) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const FlowTrace tr =
        flow_log(basis, random_density(rng, basis.dim()), 0.5, 1e-3, 10);
    const Multiplication km = multiplication_for(MetricKind::Logarithmic);
    for (const auto& s : tr.states) {
      const ComplexMatrix heat = laplacian_L(basis, s.matrix());
      const ComplexMatrix flow = entropy_flow_rhs(basis, s.matrix(), km);
      worst = std::max(worst, (flow - heat).norm() / heat.norm());
    }
  }
  rec.at_most("relative_error", worst, 1e-10);
}

void suite_convergence_rate(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (const std::string name : {"pauli", "gellmann:3"}) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    const Eigen::MatrixXd r = frame_matrix(
        n, [&basis](const ComplexMatrix& x) { return laplacian_L(basis, x); });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (r + r.transpose()));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double slowest = ev(ev.size() - 2);  // largest nonzero
    const double fastest = -ev(0);
    const double dt = 0.05 / fastest;
    const double t_final = 18.0 / -slowest;
    const FlowTrace tr =
        flow_log(basis, random_density(rng, n), t_final, dt, 10);
    std::vector<double> ts, ls;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      ts.push_back(tr.times[k]);
      ls.push_back(std::log((tr.states[k].matrix() -
                             ComplexMatrix::Identity(n, n) / static_cast<double>(n))
                                .norm()));
    }
    // least-squares slope over the final decade of decay
    const double end = ls.back();
    double st = 0, sl = 0, stt = 0, stl = 0;
    int m = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (ls[k] > end + std::log(10.0)) continue;
      st += ts[k];
      sl += ls[k];
      stt += ts[k] * ts[k];
      stl += ts[k] * ls[k];
      ++m;
    }
    const double slope = (m * stl - st * sl) / (m * stt - st * st);
    const double err = std::abs(slope - slowest) / std::abs(slowest);
    rec.note(name + "_slope", slope);
    rec.note(name + "_eigenvalue", slowest);
    worst = std::max(worst, err);
  }
  rec.at_most("relative_slope_error", worst, 0.05);
}

void suite_poisson_spd(Rng& rng, Record& rec) {
  double asym = 0.0, lowest = 1e300, gauge = 0.0;
  for (const auto& name : kCalculusBases) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    for (MetricKind kind : {MetricKind::AntiCommutator, MetricKind::Logarithmic}) {
      const DensityMatrix rho = random_density(rng, n);
      const MetricOperator op(basis, rho.matrix(), kind);
      const HermitianFrame& frame = frame_for(n);
      const int m = n * n - 1;
      Eigen::MatrixXd r(m, m);
      for (int b = 0; b < m; ++b) {
        r.col(b) = -frame.traceless_coordinates(op.apply(frame.element(b + 1)));
      }
      asym = std::max(asym, (r - r.transpose()).norm() / r.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (r + r.transpose()));
      lowest = std::min(lowest, es.eigenvalues()(0));

      const ComplexMatrix lam = random_hermitian(rng, n);
      const ComplexMatrix shifted = lam + 2.5 * ComplexMatrix::Identity(n, n);
      const BlockField g = grad_L(basis, lam);
      gauge = std::max(gauge, (grad_L(basis, shifted) - g).norm() / g.norm());
      const ComplexMatrix delta = random_traceless_hermitian(rng, n);
      gauge = std::max(gauge, std::abs(hs_inner(shifted, delta) - hs_inner(lam, delta)) /
                                  (lam.norm() * delta.norm()));
    }
  }
  rec.at_most("asymmetry", asym, 1e-12);
  rec.at_least("min_eigenvalue", lowest, 1e-300);
  rec.at_most("gauge", gauge, 1e-12);
}

// Eigenbasis solve of rho G + G rho = c.
ComplexMatrix lyapunov_solve(const ComplexMatrix& rho, const ComplexMatrix& c) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  const ComplexMatrix& u = es.eigenvectors();
  const Eigen::VectorXd& p = es.eigenvalues();
  ComplexMatrix ct = u.adjoint() * c * u;
  for (int i = 0; i < ct.rows(); ++i) {
    for (int j = 0; j < ct.cols(); ++j) ct(i, j) /= p(i) + p(j);
  }
  return u * ct * u.adjoint();
}

void suite_lyapunov(Rng& rng, Record& rec) {
  double recon = 0.0, route = 0.0;
  for (const auto& name : kCalculusBases) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    const HermitianFrame& frame = frame_for(n);
    const int m = n * n - 1;
    Eigen::MatrixXd lap(m, m);
    for (int b = 0; b < m; ++b) {
      lap.col(b) =
          frame.traceless_coordinates(laplacian_L(basis, frame.element(b + 1)));
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(-lap);
    for (int trial = 0; trial < 10; ++trial) {
      const DensityMatrix rho = random_density(rng, n);
      const ComplexMatrix delta = random_traceless_hermitian(rng, n);
      const ComplexMatrix h =
          frame.compose_traceless(-ldlt.solve(frame.traceless_coordinates(delta)));
      const BlockField gh = grad_L(basis, h);
      BlockField g, sym;
      for (std::size_t k = 0; k < basis.size(); ++k) {
        g.blocks.push_back(lyapunov_solve(rho.matrix(), 2.0 * gh[k]));
        sym.blocks.push_back(rho.matrix() * g[k] + g[k] * rho.matrix());
      }
      recon = std::max(recon,
                       relative_frobenius(-0.5 * div_L(basis, sym), delta));
      const Potential lam = poisson_solve(basis, rho, TangentVector(delta),
                                          MetricKind::AntiCommutator);
      const BlockField gl = grad_L(basis, lam.lambda.matrix());
      route = std::max(route, (g - gl).norm() / gl.norm());
    }
  }
  rec.at_most("reconstruction", recon, 1e-10);
  rec.note("lyapunov_vs_potential_gradient", route);
}

// min <v, M v> subject to div_L M(v) = delta over skew-Hermitian block fields,
// from a dense KKT solve in frame coordinates.
double minimal_action(const LindbladBasis& basis, const ComplexMatrix& rho,
                      const ComplexMatrix& delta, MetricKind kind) {
  const int n = basis.dim();
  const HermitianFrame& frame = frame_for(n);
  const int per = n * n;
  const int dofs = static_cast<int>(basis.size()) * per;
  std::vector<BlockField> unit;
  for (int a = 0; a < dofs; ++a) {
    BlockField e = BlockField::zero(basis.size(), n);
    e[a / per] = cplx(0.0, 1.0) * frame.element(a % per);
    unit.push_back(std::move(e));
  }
  Eigen::MatrixXd q(dofs, dofs);
  Eigen::MatrixXd c(per - 1, dofs);
  for (int b = 0; b < dofs; ++b) {
    const BlockField mb = multiply(rho, unit[b], kind);
    for (int a = 0; a < dofs; ++a) q(a, b) = hs_inner(unit[a], mb).real();
    c.col(b) = frame.traceless_coordinates(div_L(basis, mb));
  }
  q = 0.5 * (q + q.transpose()).eval();
  const Eigen::LDLT<Eigen::MatrixXd> qf(q);
  const Eigen::MatrixXd s = c * qf.solve(c.transpose());
  const Eigen::VectorXd d = frame.traceless_coordinates(delta);
  return d.dot(s.ldlt().solve(d));
}

void suite_riemannian(Rng& rng, Record& rec) {
  double vs_action = 0.0, vs_potential = 0.0, sym = 0.0, identity = 0.0;
  for (const auto& name : kCalculusBases) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    for (MetricKind kind : {MetricKind::AntiCommutator, MetricKind::Logarithmic}) {
      const DensityMatrix rho = random_density(rng, n);
      const TangentVector d1(random_traceless_hermitian(rng, n));
      const TangentVector d2(random_traceless_hermitian(rng, n));
      const double g11 = inner_product(basis, rho, d1, d1, kind);
      vs_action = std::max(vs_action,
                           std::abs(g11 - minimal_action(basis, rho.matrix(),
                                                         d1.matrix(), kind)) /
                               std::max(1.0, g11));
      const Potential lam = poisson_solve(basis, rho, d1, kind);
      vs_potential = std::max(
          vs_potential,
          std::abs(g11 + hs_inner(lam.lambda.matrix(), d1.matrix()).real()) /
              std::max(1.0, g11));
      sym = std::max(sym, std::abs(inner_product(basis, rho, d1, d2, kind) -
                                   inner_product(basis, rho, d2, d1, kind)) /
                              std::max(1.0, g11));
    }
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(n);
    const TangentVector d(random_traceless_hermitian(rng, n));
    const double a = inner_product(basis, mixed, d, d, MetricKind::AntiCommutator);
    const double b = inner_product(basis, mixed, d, d, MetricKind::Logarithmic);
    identity = std::max(identity, std::abs(a - b) / a);
  }
  const LindbladBasis xz({HermitianMatrix(sigma_x()), HermitianMatrix(sigma_z())});
  const double hand = inner_product(xz, DensityMatrix::maximally_mixed(2),
                                    TangentVector(sigma_y()), TangentVector(sigma_y()),
                                    MetricKind::AntiCommutator);
  rec.at_most("vs_minimal_action", vs_action, 1e-8);
  rec.at_most("vs_potential_pairing", vs_potential, 1e-10);
  rec.at_most("symmetry", sym, 1e-12);
  rec.at_most("log_vs_anticomm_at_identity", identity, 1e-12);
  rec.at_most("sigma_y_value_error", std::abs(hand - 0.5), 1e-12);
}

void suite_hj_kernel(Rng& rng, Record& rec) {
  double worst = 0.0;
  const double eps = 1e-5;
  for (const std::string name : {"pauli", "gellmann:3"}) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    for (MetricKind kind : {MetricKind::AntiCommutator, MetricKind::Logarithmic}) {
      for (int trial = 0; trial < 5; ++trial) {
        ComplexMatrix rho = random_density(rng, n, 0.2).matrix();
        if (trial == 0) {
          // nearly degenerate spectrum
          Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
          p(0) = p(1) - 1e-7;
          const ComplexMatrix u = random_unitary(rng, n);
          rho = u * (p / p.sum()).cast<cplx>().asDiagonal() * u.adjoint();
        }
        const BlockField g = grad_L(basis, random_hermitian(rng, n));
        const ComplexMatrix e = random_hermitian(rng, n);
        auto phi = [&](const ComplexMatrix& r) {
          return hs_inner(g, multiply(r, g, kind)).real();
        };
        const double fd = (phi(rho + eps * e) - phi(rho - eps * e)) / (2 * eps);
        const double exact =
            2.0 * hs_inner(hamilton_jacobi_term(rho, g, kind).matrix(), e).real();
        worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
      }
    }
  }
  rec.at_most("relative_error_vs_finite_difference", worst, 1e-6);
}

constexpr double kSolverTolerance = 1e-6;

double conic_distance(const LindbladBasis& basis, const DensityMatrix& a,
                      const DensityMatrix& b, int steps) {
  return solve_w2a_conic(basis, a, b, steps).report.distance;
}

// The splitting solver on identical marginals, bypassing the shortcut the
// geodesic front end takes for that case.
double raw_self_distance(const LindbladBasis& basis, const DensityMatrix& a,
                         int steps) {
  ConicProblem p;
  p.n = basis.dim();
  p.ops = basis.ops();
  p.steps = steps;
  p.weights = Eigen::VectorXd::Ones(1);
  p.rho0 = {a.matrix()};
  p.rho1 = {a.matrix()};
  std::vector<ComplexMatrix> path;
  for (const auto& node : solve_conic(p).rho) path.push_back(node[0]);
  return std::sqrt(std::max(0.0, path_action(basis, path, MetricKind::AntiCommutator)));
}

void suite_metric_axioms(Rng& rng, Record& rec) {
  const LindbladBasis basis = LindbladBasis::pauli();
  double sym = 0.0, self = 0.0, tri = -1e300, separation = 1e300;
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix a = random_density(rng, 2);
    const DensityMatrix b = random_density(rng, 2);
    const DensityMatrix c = random_density(rng, 2);
    const double ab = conic_distance(basis, a, b, 32);
    const double ba = conic_distance(basis, b, a, 32);
    const double bc = conic_distance(basis, b, c, 32);
    const double ac = conic_distance(basis, a, c, 32);
    sym = std::max(sym, std::abs(ab - ba));
    tri = std::max(tri, ac - ab - bc);
    self = std::max(self, raw_self_distance(basis, a, 32));
    const ComplexMatrix dir = random_traceless_hermitian(rng, 2);
    const DensityMatrix near(HermitianMatrix::symmetrize(
        a.matrix() + 1.5e-3 * dir / dir.norm()));
    separation = std::min(separation, conic_distance(basis, a, near, 32));
  }
  rec.at_most("symmetry", sym, 2 * kSolverTolerance);
  rec.at_most("self_distance", self, 1e-8);
  rec.at_most("triangle_excess", tri, 3 * kSolverTolerance);
  rec.at_least("separated_distance", separation, 1e-300);
}

void suite_backend_agreement(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (const std::string name : {"pauli", "pauli", "gellmann:3"}) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const DensityMatrix a = random_density(rng, basis.dim());
    const DensityMatrix b = random_density(rng, basis.dim());
    const double dc = conic_distance(basis, a, b, 32);
    const double dd =
        solve_w2_direct(basis, a, b, 32, MetricKind::AntiCommutator).report.distance;
    worst = std::max(worst, std::abs(dc - dd) / dd);
  }
  rec.at_most("relative_difference", worst, 0.01);
}

void check_nodes(const DiscretePath& path, double& trace, double& lowest) {
  for (const auto& d : path.densities) {
    trace = std::max(trace, std::abs(d.matrix().trace().real() - 1.0));
    lowest = std::min(lowest, d.min_eigenvalue());
  }
}

void suite_refinement(Rng& rng, Record& rec) {
  const LindbladBasis basis = LindbladBasis::pauli();
  const DensityMatrix a = random_density(rng, 2);
  const DensityMatrix b = random_density(rng, 2);
  double trace = 0.0, lowest = 1e300;
  const GeodesicResult c8 = solve_w2a_conic(basis, a, b, 8);
  const GeodesicResult c64 = solve_w2a_conic(basis, a, b, 64);
  const GeodesicResult d8 = solve_w2_direct(basis, a, b, 8, MetricKind::AntiCommutator);
  const GeodesicResult d64 =
      solve_w2_direct(basis, a, b, 64, MetricKind::AntiCommutator);
  for (const auto* r : {&c8, &c64, &d8, &d64}) check_nodes(r->path, trace, lowest);
  rec.at_most("conic_excess", c64.report.action - c8.report.action, kSolverTolerance);
  rec.at_most("direct_excess", d64.report.action - d8.report.action, kSolverTolerance);
  rec.at_most("trace_error", trace, tol::kTrace);
  rec.at_least("min_eigenvalue", lowest, tol::kPositive);
}

void suite_epigraph(Rng& rng, Record& rec) {
  double gap = 0.0;
  for (const std::string name : {"pauli", "gellmann:3"}) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const DensityMatrix a = random_density(rng, basis.dim());
    const DensityMatrix b = random_density(rng, basis.dim());
    gap = std::max(gap, solve_w2a_conic(basis, a, b, 16).report.epigraph_gap);
  }
  rec.at_most("epigraph_gap", gap, 1e-6);
}

void suite_unitary_covariance(Rng& rng, Record& rec) {
  double worst = 0.0;
  for (const std::string name : {"pauli", "pauli", "gellmann:3"}) {
    const LindbladBasis basis = LindbladBasis::from_name(name);
    const int n = basis.dim();
    const DensityMatrix a = random_density(rng, n);
    const DensityMatrix b = random_density(rng, n);
    const ComplexMatrix u = random_unitary(rng, n);
    const DensityMatrix ua(HermitianMatrix::symmetrize(u * a.matrix() * u.adjoint()));
    const DensityMatrix ub(HermitianMatrix::symmetrize(u * b.matrix() * u.adjoint()));
    const double d = conic_distance(basis, a, b, 16);
    const double du = conic_distance(basis.conjugated(u), ua, ub, 16);
    worst = std::max(worst, std::abs(d - du) / d);
  }
  rec.at_most("relative_difference", worst, 1e-6);
}

void suite_sbp(Rng& rng, Record& rec) {
  double worst = 0.0, mass = 0.0;
  for (int points : {3, 8, 17}) {
    const Grid grid(points);
    for (int trial = 0; trial < 10; ++trial) {
      MatrixField f, g;
      for (int x = 0; x < points; ++x) {
        f.push_back(random_hermitian(rng, 2));
        g.push_back(random_hermitian(rng, 2));
      }
      const double lhs = grid_inner(grid, grad_x(grid, f), g);
      const double rhs = -grid_inner(grid, f, div_x(grid, g));
      double scale = 0.0;
      for (int x = 0; x < points; ++x) scale += f[x].norm() * g[x].norm();
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
      MatrixField dg = div_x(grid, g);
      double total = 0.0;
      for (int x = 0; x < points; ++x) {
        total += grid.weights()(x) * dg[x].trace().real();
      }
      mass = std::max(mass, std::abs(total) / scale);
    }
  }
  rec.at_most("adjoint_error", worst, 1e-12);
  rec.at_most("divergence_mass", mass, 1e-12);
}

void suite_mass_conservation(Rng& rng, Record& rec) {
  const Grid grid(9);
  const LindbladBasis basis = LindbladBasis::pauli();
  double worst = 0.0;
  for (MetricKind kind : {MetricKind::AntiCommutator, MetricKind::Logarithmic}) {
    MatrixField rho = random_density_field(rng, grid, 2);
    for (int step = 0; step < 20; ++step) {
      SpatialVelocity vel;
      for (int x = 0; x < grid.size(); ++x) {
        vel.w.push_back(random_hermitian(rng, 2));
        BlockField v;
        for (std::size_t k = 0; k < basis.size(); ++k) {
          const ComplexMatrix h = random_hermitian(rng, 2);
          v.blocks.push_back(cplx(0.0, 1.0) * h);
        }
        vel.v.push_back(std::move(v));
      }
      const double before = field_mass(grid, rho);
      MatrixField next = continuity_update(grid, basis, rho, vel, 1e-3, kind);
      worst = std::max(worst, std::abs(field_mass(grid, next) - before));
      if (field_min_eigenvalue(next) > 1e-3) rho = std::move(next);
    }
  }
  rec.at_most("mass_change_per_step", worst, 1e-10);
}

void suite_spatial_heat(Rng& rng, Record& rec) {
  const Grid grid(8);
  const LindbladBasis basis = LindbladBasis::pauli();
  const double gamma = 2.0;
  const MatrixField rho0 = random_density_field(rng, grid, 2);
  const SpatialFlowTrace tr = spatial_entropy_flow(grid, basis, rho0, gamma,
                                                   MetricKind::Logarithmic,
                                                   0.2, 1e-3, 50);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const MatrixField exact =
        spatial_heat_exact(grid, basis, gamma, rho0, tr.times[k]);
    double num = 0.0, den = 0.0;
    for (int x = 0; x < grid.size(); ++x) {
      num += (tr.states[k][x] - exact[x]).squaredNorm();
      den += exact[x].squaredNorm();
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  const SpatialFlowTrace ta = spatial_entropy_flow(
      grid, basis, rho0, gamma, MetricKind::AntiCommutator, 0.2, 1e-3, 50);
  double drift = 0.0;
  for (const auto* t : {&tr, &ta}) {
    for (double d : t->mass_drift) drift = std::max(drift, d);
  }
  rec.at_most("relative_error_vs_exponential", worst, 1e-5);
  rec.at_least("min_entropy_increment_log", tr.min_entropy_increment, -1e-12);
  rec.at_least("min_entropy_increment_anticomm", ta.min_entropy_increment, -1e-12);
  rec.at_most("mass_drift", drift, tol::kTrace);
}

void suite_spatial_constant(Rng& rng, Record& rec) {
  const Grid grid(16);
  const LindbladBasis basis = LindbladBasis::pauli();
  const DensityMatrix a = random_density(rng, 2);
  const DensityMatrix b = random_density(rng, 2);
  const MatrixField fa(grid.size(), a.matrix());
  const MatrixField fb(grid.size(), b.matrix());
  const double ds = solve_spatial_geodesic(grid, basis, fa, fb, 1.0, 16,
                                           MetricKind::AntiCommutator)
                        .report.base.distance;
  const double dm = conic_distance(basis, a, b, 16);
  rec.note("spatial_distance", ds);
  rec.note("matrix_distance", dm);
  rec.at_most("relative_difference", std::abs(ds - dm) / dm, 0.02);
}

void suite_gamma_limits(Rng&, Record& rec) {
  const Grid grid(8);
  const LindbladBasis basis = LindbladBasis::pauli();
  MatrixField a, b;
  for (int x = 0; x < grid.size(); ++x) {
    const double s = std::cos(M_PI * grid.x(x));
    a.push_back(Eigen::Vector2d(0.7 * (1 + 0.5 * s), 0.3 * (1 - 0.5 * s))
                    .cast<cplx>()
                    .asDiagonal());
    b.push_back(Eigen::Vector2d(0.3 * (1 - 0.5 * s), 0.7 * (1 + 0.5 * s))
                    .cast<cplx>()
                    .asDiagonal());
  }
  const double ma = field_mass(grid, a), mb = field_mass(grid, b);
  for (auto& m : a) m /= ma;
  for (auto& m : b) m /= mb;
  std::vector<double> u;
  for (double gamma : {0.1, 1.0, 10.0}) {
    const auto res = solve_spatial_geodesic(grid, basis, a, b, gamma, 8,
                                            MetricKind::AntiCommutator);
    u.push_back(res.report.u_action);
    std::ostringstream key;
    key << "u_action_gamma_" << gamma;
    rec.note(key.str(), res.report.u_action);
  }
  rec.expect("monotone_decreasing", u[0] > u[1] && u[1] > u[2]);
}

void suite_roundtrip(Rng& rng, Record& rec) {
  bool exact = true;
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    ComplexMatrix m(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double re, im;
        do re = std::bit_cast<double>(bits(rng)); while (!std::isfinite(re));
        do im = std::bit_cast<double>(bits(rng)); while (!std::isfinite(im));
        m(r, c) = cplx(re, im);
      }
    }
    const ComplexMatrix back = io::matrix_from_json(
        io::parse_json(io::matrix_to_json(m).dump(), "roundtrip"));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        exact = exact &&
                std::bit_cast<std::uint64_t>(back(r, c).real()) ==
                    std::bit_cast<std::uint64_t>(m(r, c).real()) &&
                std::bit_cast<std::uint64_t>(back(r, c).imag()) ==
                    std::bit_cast<std::uint64_t>(m(r, c).imag());
      }
    }
  }
  rec.expect("bit_exact", exact);
  bool located = false;
  try {
    io::parse_json("{\n  \"dim\": 2,\n  \"entries\": [1,, 2]\n}", "bad");
  } catch (const io::ParseError& e) {
    located = std::string(e.what()).find("line 3") != std::string::npos;
  }
  rec.expect("error_location", located);
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {{"herm", "eigendecomposition, exp/log and inner product properties"}, suite_herm},
      {{"adjointness", "<grad X, Y> = <X, div Y>"}, suite_adjointness},
      {{"product_rule", "gradient of anticommutators"}, suite_product_rule},
      {{"identity28", "Kubo-Mori multiplication of grad log rho is grad rho"},
       suite_identity28},
      {{"quadrature", "Kubo-Mori kernel against midpoint quadrature"}, suite_quadrature},
      {{"laplacian_kernel", "Laplacian is negative semidefinite with kernel span{I}"},
       suite_laplacian_kernel},
      {{"heat_flow", "RK4 heat flow against the superoperator exponential"},
       suite_heat_flow},
      {{"entropy_monotone", "entropy and trace along both flows"},
       suite_entropy_monotone},
      {{"flow_identity28", "logarithmic entropy flow equals the heat flow"},
       suite_flow_identity28},
      {{"convergence_rate", "decay rate of the heat flow"}, suite_convergence_rate},
      {{"poisson_spd", "Poisson operator symmetry, definiteness, gauge"},
       suite_poisson_spd},
      {{"lyapunov", "Lyapunov route for the anticommutator potential"},
       suite_lyapunov},
      {{"riemannian", "inner product against minimal action and potentials"},
       suite_riemannian},
      {{"hj_kernel", "Hamilton-Jacobi term against finite differences"},
       suite_hj_kernel},
      {{"metric_axioms", "symmetry, identity and triangle inequality"},
       suite_metric_axioms},
      {{"backend_agreement", "conic and direct distances"}, suite_backend_agreement},
      {{"refinement", "discrete action under time refinement"}, suite_refinement},
      {{"epigraph", "tightness of the conic epigraph"}, suite_epigraph},
      {{"unitary_covariance", "invariance under joint conjugation"},
       suite_unitary_covariance},
      {{"sbp", "grid divergence is the negative adjoint of the gradient"}, suite_sbp},
      {{"mass_conservation", "continuity update preserves mass"},
       suite_mass_conservation},
      {{"spatial_heat", "spatial heat flow against the exponential"},
       suite_spatial_heat},
      {{"spatial_constant", "constant fields reduce to the matrix distance"},
       suite_spatial_constant},
      {{"gamma_limits", "commutator action decreases in gamma"}, suite_gamma_limits},
      {{"roundtrip", "matrix records round-trip bit-exactly"}, suite_roundtrip},
  };
  return entries;
}

}  // namespace

const std::vector<Suite>& suites() {
  static const std::vector<Suite> list = [] {
    std::vector<Suite> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return list;
}

io::json run(const std::string& only, unsigned long seed) {
  std::vector<std::string> wanted;
  std::stringstream ss(only);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const bool known =
        std::any_of(registry().begin(), registry().end(),
                    [&item](const Entry& e) { return e.info.name == item; });
    if (!known) throw io::ParseError("unknown check suite '" + item + "'");
    wanted.push_back(item);
  }
  json results = json::array();
  bool all = true;
  for (std::size_t i = 0; i < registry().size(); ++i) {
    const Entry& e = registry()[i];
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), e.info.name) == wanted.end()) {
      continue;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    Rng rng(seq);
    Record rec;
    json item = {{"name", e.info.name}};
    try {
      e.fn(rng, rec);
      item["passed"] = rec.passed();
    } catch (const Error& err) {
      item["passed"] = false;
      item["error"] = err.what();
    }
    item["metrics"] = rec.metrics();
    all = all && item["passed"].get<bool>();
    results.push_back(std::move(item));
  }
  return json{{"seed", seed}, {"passed", all}, {"suites", results}};
}

}  // namespace qot::check
