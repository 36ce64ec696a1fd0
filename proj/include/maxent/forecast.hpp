#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "maxent/estimators.hpp"
#include "maxent/markov.hpp"

namespace maxent {

/// Law of k = x_{t+1} + ... + x_{t+s} given the state at t. Integer-valued states only.
struct StepDistribution {
  std::size_t horizon;
  std::size_t origin;
  long min_sum;
  std::vector<double> mass;  // mass[i] = P(k = min_sum + i)

  long max_sum() const noexcept { return min_sum + static_cast<long>(mass.size()) - 1; }
  double at(long k) const noexcept;
};

/// Dynamic programme over (current state, partial sum).
StepDistribution step_distribution(const StochasticMatrix& w, std::size_t origin,
                                   std::size_t horizon);

inline constexpr std::size_t kTailCentiles = 10;
using CentileArray = std::array<double, kTailCentiles>;

/// pi_k, k = 1..10: mass of the k-th lowest plus the k-th highest centile.
struct TailCentiles {
  CentileArray pi{};
};

/// Where each atom of a predicted law falls among the ten lowest and ten highest
/// centiles. Boundary atoms are split fractionally so every one-sided centile holds
/// exactly 1% of the predicted mass. A realized value that the prediction gives zero
/// mass goes wholly to the centile containing its position in the cumulative law
/// (intervals closed on the left), so values beyond the support land in centile 1.
class CentileBoundaries {
 public:
  explicit CentileBoundaries(const StepDistribution& q);

  /// Symmetrized centile mass assigned to one realized sum (sums to at most 2).
  CentileArray weights(long realized_sum) const;
  CentileArray lower(long realized_sum) const;
  CentileArray upper(long realized_sum) const;
  /// Predicted pi_k.
  TailCentiles predicted() const;

 private:
  long min_sum_;
  std::vector<double> mass_;
  std::vector<CentileArray> lower_;
  std::vector<CentileArray> upper_;
};

TailCentiles symmetrized_centiles(const StepDistribution& q);

/// sum_k |pi_k - pihat_k| / pi_k. Throws InvalidArgument when some pi_k <= 0.
double tail_error(const TailCentiles& predicted, const TailCentiles& realized);

struct RealizedCentiles {
  TailCentiles fractions;  // pihat_k averaged over the scored origins
  std::size_t used;
  std::size_t skipped;     // origins without s future points
};

/// boundaries[i] is the prediction made at origins[i].
RealizedCentiles realized_centile_fractions(std::span<const std::size_t> series,
                                            const StateSpace& states,
                                            std::span<const std::size_t> origins,
                                            std::size_t horizon,
                                            std::span<const CentileBoundaries> boundaries);

/// Transition matrix to use at origin t, given the trailing window ending at t.
using WindowModel =
    std::function<StochasticMatrix(std::span<const std::size_t> window, std::size_t t)>;

struct BacktestCell {
  double delta;
  TailCentiles predicted;  // mean predicted pi over origins
  TailCentiles realized;   // pooled pihat
  std::size_t origins;
};

/// Rolls origins t = n-1, n-1+stride, ... while t + s is inside the series, predicts
/// from the trailing n points, pools realized centile masses over all origins and
/// returns Delta of the pooled fractions.
BacktestCell backtest_model(std::span<const std::size_t> series, const StateSpace& states,
                            std::size_t n, std::size_t horizon, std::size_t stride,
                            const WindowModel& model);

struct BacktestReport {
  std::vector<std::size_t> sample_sizes;
  std::map<Method, std::vector<BacktestCell>> cells;

  std::vector<double> delta(Method m) const;
};

BacktestReport backtest(std::span<const std::size_t> series, const StateSpace& states,
                        const std::vector<std::size_t>& n_values, std::size_t horizon,
                        const std::vector<Method>& methods, std::size_t stride = 1,
                        std::size_t workers = 1);

}  // namespace maxent
