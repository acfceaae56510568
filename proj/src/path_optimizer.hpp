#pragma once

// Quasi-Newton minimization of a discrete path energy sum_j e(s_j, s_{j+1})
// over unconstrained coordinates of the interior nodes. Gradients are exact
// when the model supplies step_gradient and pullback, central finite
// differences otherwise; a perturbation of node j only touches the two
// adjacent step terms.
//
// With exact gradients the quasi-Newton phase is followed by Newton steps on
// the gradient, which continue past the point where energy decreases drop
// below rounding. The Hessian is block tridiagonal in the nodes, so it is
// differenced one residue class of nodes mod 3 at a time.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <ceres/ceres.h>

#include "qot/herm.hpp"

namespace qot::detail {

template <class State>
struct PathModel {
  int interior = 0;         // T - 1
  int params_per_node = 0;  // coordinates of one node
  State first;
  State last;
  std::function<State(const double*)> decode;
  std::function<double(const State&, const State&)> step_energy;
  /// Optional: (de/da, de/db) as states under the trace pairing.
  std::function<std::pair<State, State>(const State&, const State&)> step_gradient;
  /// Optional: out[p] += d <g, decode(x)> / dx_p.
  std::function<void(const double* x, const State& g, double* out)> pullback;
};

struct PathOptimizerOptions {
  double fd_step = 1e-5;
  int max_iterations = 5000;
  double function_tolerance = 1e-15;
  double gradient_tolerance = 1e-11;
  int newton_steps = 8;
  double newton_fd_step = 1e-6;
};

struct PathOptimizerResult {
  std::vector<double> params;
  double energy = 0.0;
  long iterations = 0;
  double gradient_max = 0.0;
  std::string message;
};

template <class State>
class PathEnergy final : public ceres::FirstOrderFunction {
 public:
  PathEnergy(const PathModel<State>& model, double fd_step)
      : model_(model), h_(fd_step) {}

  int NumParameters() const override {
    return model_.interior * model_.params_per_node;
  }

  bool Evaluate(const double* x, double* cost, double* gradient) const override {
    try {
      const int m = model_.params_per_node;
      const int nodes = model_.interior;
      std::vector<State> s;
      s.reserve(nodes + 2);
      s.push_back(model_.first);
      for (int j = 0; j < nodes; ++j) s.push_back(model_.decode(x + j * m));
      s.push_back(model_.last);
      std::vector<double> e(nodes + 1);
      double total = 0.0;
      for (int j = 0; j <= nodes; ++j) {
        e[j] = model_.step_energy(s[j], s[j + 1]);
        total += e[j];
      }
      *cost = total;
      if (gradient == nullptr) return true;
      if (model_.step_gradient && model_.pullback) {
        std::fill(gradient, gradient + nodes * m, 0.0);
        for (int j = 0; j <= nodes; ++j) {
          const auto [ga, gb] = model_.step_gradient(s[j], s[j + 1]);
          if (j > 0) model_.pullback(x + (j - 1) * m, ga, gradient + (j - 1) * m);
          if (j < nodes) model_.pullback(x + j * m, gb, gradient + j * m);
        }
        return true;
      }
      std::vector<double> local(m);
      for (int j = 0; j < nodes; ++j) {
        std::copy(x + j * m, x + (j + 1) * m, local.begin());
        for (int p = 0; p < m; ++p) {
          const double saved = local[p];
          local[p] = saved + h_;
          const State plus = model_.decode(local.data());
          const double ep = model_.step_energy(s[j], plus) +
                            model_.step_energy(plus, s[j + 2]);
          local[p] = saved - h_;
          const State minus = model_.decode(local.data());
          const double em = model_.step_energy(s[j], minus) +
                            model_.step_energy(minus, s[j + 2]);
          local[p] = saved;
          gradient[j * m + p] = (ep - em) / (2.0 * h_);
        }
      }
      return true;
    } catch (const DomainError&) {
      return false;
    }
  }

 private:
  const PathModel<State>& model_;
  double h_;
};

inline double max_abs(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

template <class State>
void newton_polish(const PathEnergy<State>& f, int nodes, int m,
                   const PathOptimizerOptions& opts, std::vector<double>& x) {
  const int dim = nodes * m;
  auto gradient = [&](const std::vector<double>& at, Eigen::VectorXd& g) {
    double cost = 0.0;
    g.resize(dim);
    return f.Evaluate(at.data(), &cost, g.data());
  };
  Eigen::VectorXd g, gp, gm;
  if (!gradient(x, g)) return;
  const double h = opts.newton_fd_step;
  for (int it = 0; it < opts.newton_steps && max_abs(g) > 0.0; ++it) {
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
    for (int r = 0; r < 3; ++r) {
      for (int p = 0; p < m; ++p) {
        std::vector<double> xp = x, xm = x;
        for (int j = r; j < nodes; j += 3) {
          xp[j * m + p] += h;
          xm[j * m + p] -= h;
        }
        if (!gradient(xp, gp) || !gradient(xm, gm)) return;
        const Eigen::VectorXd col = (gp - gm) / (2.0 * h);
        for (int j = r; j < nodes; j += 3) {
          const int lo = std::max(0, j - 1), hi = std::min(nodes - 1, j + 1);
          hess.block(lo * m, j * m + p, (hi - lo + 1) * m, 1) =
              col.segment(lo * m, (hi - lo + 1) * m);
        }
      }
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return;
    const Eigen::VectorXd step = ldlt.solve(-g);
    std::vector<double> next = x;
    for (int k = 0; k < dim; ++k) next[k] += step(k);
    Eigen::VectorXd gn;
    if (!gradient(next, gn) || !(max_abs(gn) < max_abs(g))) return;
    x = std::move(next);
    g = std::move(gn);
  }
}

template <class State>
PathOptimizerResult optimize_path(const PathModel<State>& model,
                                  std::vector<double> init,
                                  const PathOptimizerOptions& opts) {
  PathOptimizerResult out;
  out.params = std::move(init);
  if (model.interior == 0 || model.params_per_node == 0) {
    out.energy = model.step_energy(model.first, model.last);
    out.message = "no interior nodes";
    return out;
  }
  auto* energy_fn = new PathEnergy<State>(model, opts.fd_step);
  ceres::GradientProblem problem(energy_fn);
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = opts.max_iterations;
  options.function_tolerance = opts.function_tolerance;
  options.gradient_tolerance = opts.gradient_tolerance;
  options.parameter_tolerance = 1e-16;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, out.params.data(), &summary);
  if (model.step_gradient && model.pullback) {
    newton_polish(*energy_fn, model.interior, model.params_per_node, opts, out.params);
  }
  double energy = 0.0;
  std::vector<double> grad(out.params.size());
  if (!problem.Evaluate(out.params.data(), &energy, grad.data())) {
    throw ConvergenceError("path optimizer left the domain: " +
                           summary.message);
  }
  // Line searches stall once finite-difference noise dominates; that is a
  // converged state, not a failure.
  double gmax = 0.0;
  for (double g : grad) gmax = std::max(gmax, std::abs(g));
  if (summary.termination_type == ceres::FAILURE && gmax > 1e-6) {
    throw ConvergenceError("path optimizer failed: " + summary.message);
  }
  out.energy = energy;
  out.gradient_max = gmax;
  out.iterations = static_cast<long>(summary.iterations.size());
  out.message = summary.message;
  return out;
}

}  // namespace qot::detail
