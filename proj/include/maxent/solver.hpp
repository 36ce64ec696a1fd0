#pragma once

#include <cstddef>

#include "maxent/markov.hpp"

namespace maxent {

/// Maximum-entropy chain for a prescribed one-step autocorrelation.
///
/// The normalization, row-sum and detailed-balance multipliers are eliminated in
/// closed form: at a stationary point the joint law p_i W_ij is proportional to
/// v_i v_j exp(lambda x_i x_j), with v the Perron vector of the kernel
/// exp(lambda x_i x_j). Only the autocorrelation multiplier `lambda` survives.
struct MaxEntSolution {
  StochasticMatrix matrix;
  Distribution stationary;
  double lambda;
  double target;    // autocorrelation the solution was asked to match
  double residual;  // LagrangeResiduals::max() at acceptance
};

/// Attainable range of sum_ij x_i x_j p_i W_ij over detailed-balance chains.
struct FeasibleRange {
  double min_a;
  double max_a;

  /// True when a is at least `margin` away from both ends.
  bool interior(double a, double margin) const noexcept {
    return a > min_a + margin && a < max_a - margin;
  }
};

/// Violations of the stationarity system, in the log domain, plus the structural constraints.
struct LagrangeResiduals {
  double diagonal_ratio;     // |ln W_ii - ln W_jj - lambda (x_i^2 - x_j^2)|
  double cross_ratio;        // |ln W_ii W_jj - ln W_ij W_ji - lambda (x_i - x_j)^2|
  double normalization;      // |sum p - 1|
  double row_sums;           // max_i |sum_j W_ij - 1|
  double detailed_balance;   // max |p_i W_ij - p_j W_ji|
  double stationarity;       // max |p W - p|
  double autocorrelation;    // |A(p, W) - target|

  double max() const noexcept;
};

struct SolverOptions {
  double boundary_margin = 1e-9;    // targets closer than this to the range edge are rejected
  double multiplier_bracket = 50.0; // |lambda| * span(x_i x_j) / 2 bound
  double target_tolerance = 1e-12;
  std::size_t max_iterations = 10'000;
  double acceptance = 1e-8;         // maximum residual of a returned solution
};

/// Closed form for states {-1, +1}: W = [[(1+A)/2, (1-A)/2], [(1-A)/2, (1+A)/2]].
MaxEntSolution maxent_2state(double a);

/// Numerical solution for arbitrary state values (bisection on lambda).
MaxEntSolution maxent_nstate(const StateSpace& states, double a, const SolverOptions& options = {});

/// Chain on the stationarity manifold for a given multiplier; no target matching.
MaxEntSolution maxent_from_multiplier(const StateSpace& states, double lambda);

FeasibleRange feasible_range(const StateSpace& states);

/// Zero entries inside a ratio give an infinite residual.
LagrangeResiduals lagrange_residuals(const MaxEntSolution& solution, const StateSpace& states);

}  // namespace maxent
