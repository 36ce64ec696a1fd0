#include "maxent/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxent/errors.hpp"
#include "maxent/parallel.hpp"

namespace maxent {

double StepDistribution::at(long k) const noexcept {
  if (k < min_sum || k > max_sum()) return 0.0;
  return mass[static_cast<std::size_t>(k - min_sum)];
}

StepDistribution step_distribution(const StochasticMatrix& w, std::size_t origin,
                                   std::size_t horizon) {
  const auto& states = w.states();
  if (!states.is_integer_valued())
    throw InvalidArgument("step distributions need integer-valued states");
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  if (origin >= w.size()) throw InvalidArgument("origin outside the state space");

  const std::size_t k = w.size();
  std::vector<long> x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = std::lround(states[i]);
  const long lo = static_cast<long>(horizon) * x.front();
  const long hi = static_cast<long>(horizon) * x.back();
  const auto width = static_cast<std::size_t>(hi - lo + 1);

  // joint[state * width + (sum - lo)]; start: sum 0 at the origin state.
  std::vector<double> joint(k * width, 0.0);
  std::vector<double> next(k * width, 0.0);
  joint[origin * width + static_cast<std::size_t>(-lo)] = 1.0;
  // Partial sums at step m lie in [m x_min, m x_max]; shifting by x_j stays inside [lo, hi].
  for (std::size_t step = 0; step < horizon; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const double* from = &joint[i * width];
      for (std::size_t j = 0; j < k; ++j) {
        const double p = w(i, j);
        if (p == 0.0) continue;
        double* to = &next[j * width];
        const long shift = x[j];
        for (std::size_t o = 0; o < width; ++o) {
          if (from[o] == 0.0) continue;
          const long target = static_cast<long>(o) + shift;
          if (target < 0 || target >= static_cast<long>(width)) continue;
          to[target] += from[o] * p;
        }
      }
    }
    joint.swap(next);
  }

  StepDistribution q{horizon, origin, lo, std::vector<double>(width, 0.0)};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t o = 0; o < width; ++o) q.mass[o] += joint[i * width + o];
  return q;
}

// ---------------------------------------------------------------------------

namespace {

double centile_edge(std::size_t c) { return static_cast<double>(c) / 100.0; }

// Share of an atom occupying [start, start + m) of a cumulative law that falls in
// each of the first ten centiles.
CentileArray split_atom(double start, double m) {
  CentileArray out{};
  for (std::size_t c = 0; c < kTailCentiles; ++c) {
    const double lo = centile_edge(c);
    const double hi = centile_edge(c + 1);
    if (m > 0.0) {
      const double overlap = std::min(start + m, hi) - std::max(start, lo);
      out[c] = overlap > 0.0 ? overlap / m : 0.0;
    } else {
      out[c] = (start >= lo && start < hi) ? 1.0 : 0.0;
    }
  }
  return out;
}

CentileArray add(const CentileArray& a, const CentileArray& b) {
  CentileArray out{};
  for (std::size_t c = 0; c < kTailCentiles; ++c) out[c] = a[c] + b[c];
  return out;
}

}  // namespace

CentileBoundaries::CentileBoundaries(const StepDistribution& q)
    : min_sum_(q.min_sum), mass_(q.mass), lower_(q.mass.size()), upper_(q.mass.size()) {
  const std::size_t n = mass_.size();
  double below = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    lower_[a] = split_atom(below, mass_[a]);
    below += mass_[a];
  }
  double above = 0.0;
  for (std::size_t a = n; a-- > 0;) {
    upper_[a] = split_atom(above, mass_[a]);
    above += mass_[a];
  }
}

CentileArray CentileBoundaries::lower(long realized_sum) const {
  if (realized_sum < min_sum_) return split_atom(0.0, 0.0);
  const auto idx = static_cast<std::size_t>(realized_sum - min_sum_);
  if (idx >= mass_.size()) return CentileArray{};
  return lower_[idx];
}

CentileArray CentileBoundaries::upper(long realized_sum) const {
  if (realized_sum < min_sum_) return CentileArray{};
  const auto idx = static_cast<std::size_t>(realized_sum - min_sum_);
  if (idx >= mass_.size()) return split_atom(0.0, 0.0);
  return upper_[idx];
}

CentileArray CentileBoundaries::weights(long realized_sum) const {
  return add(lower(realized_sum), upper(realized_sum));
}

TailCentiles CentileBoundaries::predicted() const {
  TailCentiles out;
  for (std::size_t a = 0; a < mass_.size(); ++a)
    for (std::size_t c = 0; c < kTailCentiles; ++c)
      out.pi[c] += mass_[a] * (lower_[a][c] + upper_[a][c]);
  return out;
}

TailCentiles symmetrized_centiles(const StepDistribution& q) {
  return CentileBoundaries(q).predicted();
}

double tail_error(const TailCentiles& predicted, const TailCentiles& realized) {
  double delta = 0.0;
  for (std::size_t c = 0; c < kTailCentiles; ++c) {
    if (!(predicted.pi[c] > 0.0))
      throw InvalidArgument("predicted centile " + std::to_string(c + 1) + " has no mass");
    delta += std::abs(predicted.pi[c] - realized.pi[c]) / predicted.pi[c];
  }
  return delta;
}

RealizedCentiles realized_centile_fractions(std::span<const std::size_t> series,
                                            const StateSpace& states,
                                            std::span<const std::size_t> origins,
                                            std::size_t horizon,
                                            std::span<const CentileBoundaries> boundaries) {
  if (origins.size() != boundaries.size())
    throw InvalidArgument("one prediction per origin is required");
  if (!states.is_integer_valued())
    throw InvalidArgument("realized sums need integer-valued states");
  RealizedCentiles out{{}, 0, 0};
  for (std::size_t i = 0; i < origins.size(); ++i) {
    const std::size_t t = origins[i];
    if (t + horizon >= series.size()) {
      ++out.skipped;
      continue;
    }
    long sum = 0;
    for (std::size_t tau = 1; tau <= horizon; ++tau) sum += std::lround(states[series[t + tau]]);
    const auto w = boundaries[i].weights(sum);
    for (std::size_t c = 0; c < kTailCentiles; ++c) out.fractions.pi[c] += w[c];
    ++out.used;
  }
  if (out.used > 0)
    for (auto& v : out.fractions.pi) v /= static_cast<double>(out.used);
  return out;
}

// ---------------------------------------------------------------------------

BacktestCell backtest_model(std::span<const std::size_t> series, const StateSpace& states,
                            std::size_t n, std::size_t horizon, std::size_t stride,
                            const WindowModel& model) {
  if (n < 2) throw InvalidArgument("sample size must be at least 2");
  if (stride < 1) throw InvalidArgument("stride must be at least 1");
  if (series.size() < n + horizon)
    throw InvalidArgument("series too short for sample size " + std::to_string(n) +
                          " and horizon " + std::to_string(horizon));

  BacktestCell cell{0.0, {}, {}, 0};
  for (std::size_t t = n - 1; t + horizon < series.size(); t += stride) {
    const auto w = model(series.subspan(t + 1 - n, n), t);
    const CentileBoundaries bins(step_distribution(w, series[t], horizon));
    long sum = 0;
    for (std::size_t tau = 1; tau <= horizon; ++tau) sum += std::lround(states[series[t + tau]]);
    const auto realized = bins.weights(sum);
    const auto predicted = bins.predicted();
    for (std::size_t c = 0; c < kTailCentiles; ++c) {
      cell.realized.pi[c] += realized[c];
      cell.predicted.pi[c] += predicted.pi[c];
    }
    ++cell.origins;
  }
  for (std::size_t c = 0; c < kTailCentiles; ++c) {
    cell.realized.pi[c] /= static_cast<double>(cell.origins);
    cell.predicted.pi[c] /= static_cast<double>(cell.origins);
  }
  cell.delta = tail_error(cell.predicted, cell.realized);
  return cell;
}

std::vector<double> BacktestReport::delta(Method m) const {
  std::vector<double> out;
  auto it = cells.find(m);
  if (it == cells.end()) return out;
  for (const auto& c : it->second) out.push_back(c.delta);
  return out;
}

BacktestReport backtest(std::span<const std::size_t> series, const StateSpace& states,
                        const std::vector<std::size_t>& n_values, std::size_t horizon,
                        const std::vector<Method>& methods, std::size_t stride,
                        std::size_t workers) {
  if (n_values.empty() || methods.empty())
    throw InvalidArgument("backtest needs at least one sample size and one method");
  const std::size_t jobs = n_values.size() * methods.size();
  std::vector<BacktestCell> results(jobs);
  parallel_chunks(jobs, jobs, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t job = begin; job < end; ++job) {
      const std::size_t n = n_values[job / methods.size()];
      const Method method = methods[job % methods.size()];
      MaxEntCache cache(states);
      results[job] = backtest_model(
          series, states, n, horizon, stride,
          [&](std::span<const std::size_t> window, std::size_t) {
            return estimate_window(window, method, states, &cache);
          });
    }
  });

  BacktestReport report;
  report.sample_sizes = n_values;
  for (std::size_t job = 0; job < jobs; ++job)
    report.cells[methods[job % methods.size()]].push_back(results[job]);
  return report;
}

}  // namespace maxent
