#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxent/markov.hpp"
#include "maxent/solver.hpp"

namespace maxent {

enum class Method { maxent, sampling, naive };

std::string_view to_string(Method m) noexcept;
/// Throws InvalidArgument for unknown names.
Method parse_method(std::string_view name);

struct SampleAutocorrelation {
  double value;
  std::size_t n;
};

/// (1/(n-1)) sum_t x_t x_{t+1}; no centring, no normalization. Needs n >= 2.
SampleAutocorrelation sample_autocorrelation(std::span<const std::size_t> series,
                                             const StateSpace& states);

struct FrequencyEstimate {
  StochasticMatrix matrix;
  std::vector<bool> unvisited;  // rows never left inside the sample; filled with 1/K
};

/// Transition counts normalized per row. Needs n >= 2.
FrequencyEstimate frequency_estimate(std::span<const std::size_t> series, const StateSpace& states);

inline constexpr double kSampleClampMargin = 1e-6;

/// maxent_nstate at the sample autocorrelation, pulled 1e-6 inside the feasible range.
MaxEntSolution maxent_estimate(std::span<const std::size_t> series, const StateSpace& states);

/// Memoizes maximum-entropy matrices by target autocorrelation. On integer-valued
/// states a window of n points has at most 2(n-1)+1 distinct targets, so sweeps
/// solve each one once. Not thread-safe; use one per worker.
class MaxEntCache {
 public:
  explicit MaxEntCache(StateSpace states);

  const StochasticMatrix& at(double target);
  /// Clamps a raw sample autocorrelation to the interior before lookup.
  const StochasticMatrix& for_sample(double sample_autocorrelation);
  const StateSpace& states() const noexcept { return states_; }

 private:
  StateSpace states_;
  FeasibleRange range_;
  std::map<double, StochasticMatrix> solved_;
};

/// One estimate from a window, with the matrix type every method shares.
StochasticMatrix estimate_window(std::span<const std::size_t> window, Method method,
                                 const StateSpace& states, MaxEntCache* cache = nullptr);

struct WindowEstimate {
  std::vector<std::size_t> times;           // last index of each trailing window
  std::vector<StochasticMatrix> matrices;
  Method method;
};

/// Estimates from every trailing window [t-n+1, t], t = n-1 .. size-1 (stride 1).
WindowEstimate sliding_window(std::span<const std::size_t> series, std::size_t n, Method method,
                              const StateSpace& states);

}  // namespace maxent
