#include "maxent/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "maxent/errors.hpp"

namespace maxent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kPolishSteps = 3;

double product_span(const StateSpace& states) {
  const auto r = feasible_range(states);
  return r.max_a - r.min_a;
}

struct KernelPoint {
  Eigen::MatrixXd w;
  Eigen::VectorXd p;
  double autocorrelation;
};

// Builds the detailed-balance chain p_i W_ij ~ v_i exp(lambda x_i x_j) v_j.
// Rows are normalized by (M v)_i, so row sums and detailed balance hold for any
// positive v; eigenvector error only shows up in the diagonal-ratio residual.
KernelPoint kernel_point(const StateSpace& states, double lambda) {
  const auto k = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd exponent(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      exponent(i, j) = lambda * states[static_cast<std::size_t>(i)] *
                       states[static_cast<std::size_t>(j)];
  const Eigen::MatrixXd m = (exponent.array() - exponent.maxCoeff()).exp().matrix();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  Eigen::VectorXd v = eig.eigenvectors().col(k - 1).cwiseAbs();
  // Fixed-point polish v <- M v / |M v|: restores relative accuracy of small components.
  for (int s = 0; s < kPolishSteps; ++s) {
    v = m * v;
    v /= v.norm();
  }
  const Eigen::VectorXd mv = m * v;

  KernelPoint out;
  out.w.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) out.w(i, j) = m(i, j) * v(j) / mv(i);
  out.p = v.cwiseProduct(mv);
  out.p /= out.p.sum();

  double a = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      a += states[static_cast<std::size_t>(i)] * states[static_cast<std::size_t>(j)] * out.p(i) *
           out.w(i, j);
  out.autocorrelation = a;
  return out;
}

MaxEntSolution make_solution(const StateSpace& states, const KernelPoint& kp, double lambda,
                             double target) {
  // Clean rounding-level excursions so the value types accept the result.
  Eigen::MatrixXd w = kp.w.cwiseMax(0.0).cwiseMin(1.0);
  for (Eigen::Index i = 0; i < w.rows(); ++i) w.row(i) /= w.row(i).sum();
  MaxEntSolution sol{StochasticMatrix(std::move(w), states), Distribution(kp.p), lambda, target,
                     0.0};
  sol.residual = lagrange_residuals(sol, states).max();
  return sol;
}

std::string describe_target(double a, const FeasibleRange& r) {
  std::ostringstream os;
  os.precision(17);
  os << "autocorrelation target " << a << " is not strictly inside the feasible range (" << r.min_a
     << ", " << r.max_a << ")";
  return os.str();
}

}  // namespace

double LagrangeResiduals::max() const noexcept {
  return std::max({diagonal_ratio, cross_ratio, normalization, row_sums, detailed_balance,
                   stationarity, autocorrelation});
}

FeasibleRange feasible_range(const StateSpace& states) {
  // Linear objective over symmetric joint laws: extremes sit on the vertices
  // delta_ii (value x_i^2) and (delta_ij + delta_ji)/2 (value x_i x_j).
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j) {
      lo = std::min(lo, states[i] * states[j]);
      hi = std::max(hi, states[i] * states[j]);
    }
  return {lo, hi};
}

MaxEntSolution maxent_2state(double a) {
  if (!(std::abs(a) < 1.0))
    throw InfeasibleTarget(describe_target(a, FeasibleRange{-1.0, 1.0}));
  Eigen::Matrix2d w;
  w << (1.0 + a) / 2.0, (1.0 - a) / 2.0, (1.0 - a) / 2.0, (1.0 + a) / 2.0;
  const auto states = StateSpace::binary();
  MaxEntSolution sol{StochasticMatrix(w, states), Distribution::uniform(2), std::atanh(a), a, 0.0};
  sol.residual = lagrange_residuals(sol, states).max();
  return sol;
}

MaxEntSolution maxent_from_multiplier(const StateSpace& states, double lambda) {
  const auto kp = kernel_point(states, lambda);
  return make_solution(states, kp, lambda, kp.autocorrelation);
}

MaxEntSolution maxent_nstate(const StateSpace& states, double a, const SolverOptions& options) {
  const auto range = feasible_range(states);
  if (!std::isfinite(a) || !range.interior(a, options.boundary_margin))
    throw InfeasibleTarget(describe_target(a, range));

  const double bound = 2.0 * options.multiplier_bracket / product_span(states);
  double lo = -bound;
  double hi = bound;
  double best_lambda = 0.0;
  double best_gap = kInf;

  auto consider = [&](double lambda) {
    const auto kp = kernel_point(states, lambda);
    const double gap = kp.autocorrelation - a;
    if (std::abs(gap) < best_gap) {
      best_gap = std::abs(gap);
      best_lambda = lambda;
    }
    return gap;
  };

  if (consider(lo) > 0.0 || consider(hi) < 0.0)
    throw ConvergenceError("autocorrelation target not bracketed by the multiplier range",
                           best_gap);

  // A(lambda) = d ln rho(lambda) / d lambda is nondecreasing (log-convex Perron root).
  for (std::size_t it = 0; it < options.max_iterations && best_gap > options.target_tolerance;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (consider(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }

  const auto kp = kernel_point(states, best_lambda);
  auto sol = make_solution(states, kp, best_lambda, a);
  if (!(sol.residual <= options.acceptance)) {
    std::ostringstream os;
    os << "maximum-entropy solve did not converge (residual " << sol.residual << ")";
    throw ConvergenceError(os.str(), sol.residual);
  }
  return sol;
}

LagrangeResiduals lagrange_residuals(const MaxEntSolution& solution, const StateSpace& states) {
  const auto& w = solution.matrix;
  const auto& p = solution.stationary;
  if (w.size() != states.size() || p.size() != states.size())
    throw InvalidArgument("solution does not match the state space");
  const double lambda = solution.lambda;
  const std::size_t k = states.size();

  auto log_entry = [&](std::size_t i, std::size_t j) {
    return w(i, j) > 0.0 ? std::log(w(i, j)) : -kInf;
  };

  LagrangeResiduals r{};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double lii = log_entry(i, i);
      const double ljj = log_entry(j, j);
      const double lij = log_entry(i, j);
      const double lji = log_entry(j, i);
      const bool finite_diag = std::isfinite(lii) && std::isfinite(ljj);
      const bool finite_all = finite_diag && std::isfinite(lij) && std::isfinite(lji);
      const double xi = states[i];
      const double xj = states[j];
      const double d5 =
          finite_diag ? std::abs(lii - ljj - lambda * (xi * xi - xj * xj)) : kInf;
      const double d6 =
          finite_all ? std::abs(lii + ljj - lij - lji - lambda * (xi - xj) * (xi - xj)) : kInf;
      r.diagonal_ratio = std::max(r.diagonal_ratio, d5);
      r.cross_ratio = std::max(r.cross_ratio, d6);
    }
  }

  r.normalization = std::abs(p.mass().sum() - 1.0);
  r.row_sums = (w.entries().rowwise().sum().array() - 1.0).abs().maxCoeff();
  r.detailed_balance = detailed_balance_residual(p, w);
  r.stationarity =
      (p.mass().transpose() * w.entries() - p.mass().transpose()).cwiseAbs().maxCoeff();
  r.autocorrelation = std::abs(matrix_autocorrelation(p, w) - solution.target);
  return r;
}

}  // namespace maxent
