#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "maxent/markov.hpp"

namespace maxent {

struct PricePoint {
  double timestamp;  // epoch seconds
  double price;
  friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Strictly increasing timestamps, positive prices.
class PriceSeries {
 public:
  PriceSeries() = default;
  explicit PriceSeries(std::vector<PricePoint> points);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const PricePoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<PricePoint>& points() const noexcept { return points_; }

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

 private:
  std::vector<PricePoint> points_;
};

/// r_t = (p_t - p_{t-1}) / p_{t-1}, stamped with t.
struct ReturnSeries {
  std::vector<double> timestamps;
  std::vector<double> values;
};

enum class TimestampFormat { automatic, epoch_seconds, iso8601 };

/// Seconds since the Unix epoch for "YYYY-MM-DD[(T| )HH:MM[:SS[.fff]]][Z|(+|-)HH[:]MM]".
std::optional<double> parse_iso8601(std::string_view text);

/// CSV with header `timestamp,price`. `automatic` picks the format from the first data
/// row and requires every row to use it. Lines starting with '#' and blank lines are skipped.
PriceSeries read_prices(std::istream& in, TimestampFormat format = TimestampFormat::automatic);
PriceSeries load_prices(const std::filesystem::path& path,
                        TimestampFormat format = TimestampFormat::automatic);

/// One point per multiple of `interval` between the first and last observation,
/// carrying the last price observed at or before that boundary.
PriceSeries resample(const PriceSeries& prices, double interval);

ReturnSeries to_returns(const PriceSeries& prices);

inline constexpr double kDefaultThreshold = 1e-4;

/// -1 if r < -threshold, +1 if r > threshold, 0 otherwise; indices into StateSpace::ternary().
StateSequence discretize(const ReturnSeries& returns, double threshold = kDefaultThreshold);

/// Column `state` (or `timestamp,state`) of state values.
struct LabelledStates {
  StateSequence sequence;
  StateSpace states;
  std::vector<double> timestamps;  // empty when the file has no timestamp column
};

/// Reads a state CSV. Without an explicit state space the values must all be in
/// {-1, 0, +1}; {-1, +1} is used when no 0 occurs.
LabelledStates read_states(std::istream& in, const std::optional<StateSpace>& states = std::nullopt);
LabelledStates load_states(const std::filesystem::path& path,
                           const std::optional<StateSpace>& states = std::nullopt);

void write_states(std::ostream& out, const StateSequence& sequence, const StateSpace& states,
                  const std::vector<double>& timestamps = {});

}  // namespace maxent
