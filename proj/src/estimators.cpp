#include "maxent/estimators.hpp"

#include <algorithm>
#include <string>

#include "maxent/errors.hpp"

namespace maxent {

namespace {

void require_length(std::span<const std::size_t> series, std::size_t min_len) {
  if (series.size() < min_len)
    throw InvalidArgument("series needs at least " + std::to_string(min_len) + " points, got " +
                          std::to_string(series.size()));
}

void require_indices(std::span<const std::size_t> series, const StateSpace& states) {
  for (auto s : series)
    if (s >= states.size()) throw InvalidArgument("state index outside the state space");
}

double clamp_to_interior(double a, const FeasibleRange& r) {
  return std::clamp(a, r.min_a + kSampleClampMargin, r.max_a - kSampleClampMargin);
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::maxent: return "maxent";
    case Method::sampling: return "sampling";
    case Method::naive: return "naive";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "maxent") return Method::maxent;
  if (name == "sampling") return Method::sampling;
  if (name == "naive") return Method::naive;
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

SampleAutocorrelation sample_autocorrelation(std::span<const std::size_t> series,
                                             const StateSpace& states) {
  require_length(series, 2);
  require_indices(series, states);
  double acc = 0.0;
  for (std::size_t t = 0; t + 1 < series.size(); ++t)
    acc += states[series[t]] * states[series[t + 1]];
  return {acc / static_cast<double>(series.size() - 1), series.size()};
}

FrequencyEstimate frequency_estimate(std::span<const std::size_t> series,
                                     const StateSpace& states) {
  require_length(series, 2);
  require_indices(series, states);
  const auto k = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t t = 0; t + 1 < series.size(); ++t)
    counts(static_cast<Eigen::Index>(series[t]), static_cast<Eigen::Index>(series[t + 1])) += 1.0;

  std::vector<bool> unvisited(states.size(), false);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double departures = counts.row(i).sum();
    if (departures > 0.0) {
      counts.row(i) /= departures;
    } else {
      counts.row(i).setConstant(1.0 / static_cast<double>(k));
      unvisited[static_cast<std::size_t>(i)] = true;
    }
  }
  return {StochasticMatrix(std::move(counts), states), std::move(unvisited)};
}

MaxEntSolution maxent_estimate(std::span<const std::size_t> series, const StateSpace& states) {
  const auto a = sample_autocorrelation(series, states);
  return maxent_nstate(states, clamp_to_interior(a.value, feasible_range(states)));
}

// ---------------------------------------------------------------------------

MaxEntCache::MaxEntCache(StateSpace states)
    : states_(std::move(states)), range_(feasible_range(states_)) {}

const StochasticMatrix& MaxEntCache::at(double target) {
  auto it = solved_.find(target);
  if (it == solved_.end()) {
    auto sol = maxent_nstate(states_, target);
    it = solved_.emplace(target, std::move(sol.matrix)).first;
  }
  return it->second;
}

const StochasticMatrix& MaxEntCache::for_sample(double sample_autocorrelation) {
  return at(clamp_to_interior(sample_autocorrelation, range_));
}

StochasticMatrix estimate_window(std::span<const std::size_t> window, Method method,
                                 const StateSpace& states, MaxEntCache* cache) {
  switch (method) {
    case Method::naive:
      return StochasticMatrix::uniform(states);
    case Method::sampling:
      return frequency_estimate(window, states).matrix;
    case Method::maxent:
      if (cache) return cache->for_sample(sample_autocorrelation(window, states).value);
      return maxent_estimate(window, states).matrix;
  }
  throw InvalidArgument("unknown method");
}

WindowEstimate sliding_window(std::span<const std::size_t> series, std::size_t n, Method method,
                              const StateSpace& states) {
  if (n < 2) throw InvalidArgument("window must hold at least 2 points");
  if (series.size() < n)
    throw InvalidArgument("series of length " + std::to_string(series.size()) +
                          " is shorter than the window " + std::to_string(n));
  WindowEstimate out{{}, {}, method};
  const std::size_t count = series.size() - n + 1;
  out.times.reserve(count);
  out.matrices.reserve(count);
  MaxEntCache cache(states);
  for (std::size_t t = n - 1; t < series.size(); ++t) {
    out.times.push_back(t);
    out.matrices.push_back(estimate_window(series.subspan(t + 1 - n, n), method, states, &cache));
  }
  return out;
}

}  // namespace maxent
