#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "maxent/random.hpp"

namespace maxent {

/// Ordered, strictly increasing numeric values attached to the states of a chain.
class StateSpace {
 public:
  explicit StateSpace(std::vector<double> values);

  /// {-1, +1}
  static StateSpace binary();
  /// {-1, 0, +1}
  static StateSpace ternary();

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  bool is_integer_valued() const noexcept;
  std::optional<std::size_t> index_of(double value) const noexcept;

  friend bool operator==(const StateSpace&, const StateSpace&) = default;

 private:
  std::vector<double> values_;
};

/// Probability vector over the states of a chain.
class Distribution {
 public:
  explicit Distribution(Eigen::VectorXd mass);

  static Distribution uniform(std::size_t k);
  static Distribution point(std::size_t k, std::size_t state);

  std::size_t size() const noexcept { return static_cast<std::size_t>(mass_.size()); }
  double operator[](std::size_t i) const { return mass_(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& mass() const noexcept { return mass_; }

 private:
  Eigen::VectorXd mass_;
};

/// Row-stochastic K x K transition matrix; entry (i, j) is P(next = j | current = i).
class StochasticMatrix {
 public:
  /// Validates entries in [0, 1] and unit row sums (1e-12).
  StochasticMatrix(Eigen::MatrixXd entries, StateSpace states);

  static StochasticMatrix uniform(StateSpace states);
  static StochasticMatrix identity(StateSpace states);

  std::size_t size() const noexcept { return states_.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const StateSpace& states() const noexcept { return states_; }

 private:
  Eigen::MatrixXd entries_;
  StateSpace states_;
};

/// Realization of a chain as indices into its StateSpace.
class StateSequence {
 public:
  StateSequence(std::vector<std::size_t> indices, std::size_t num_states);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t operator[](std::size_t t) const { return indices_[t]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  operator std::span<const std::size_t>() const noexcept { return indices_; }

  friend bool operator==(const StateSequence&, const StateSequence&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t num_states_;
};

inline constexpr double kRowSumTolerance = 1e-12;

/// True iff every state reaches every other, i.e. sum_{m=1..K} W^m is strictly positive.
bool is_irreducible(const StochasticMatrix& w);

/// Unique stationary distribution. Throws NotIrreducible when it is not unique.
Distribution stationary_distribution(const StochasticMatrix& w);

/// -sum_ij p_i W_ij ln W_ij in nats, with 0 ln 0 = 0.
double entropy_rate(const Distribution& p, const StochasticMatrix& w);

/// sum_ij x_i x_j p_i W_ij (uncentred, unnormalized).
double matrix_autocorrelation(const Distribution& p, const StochasticMatrix& w);

/// max_ij |p_i W_ij - p_j W_ji|
double detailed_balance_residual(const Distribution& p, const StochasticMatrix& w);

/// Draws successive states from precomputed cumulative rows.
class ChainSampler {
 public:
  explicit ChainSampler(const StochasticMatrix& w);
  explicit ChainSampler(const Distribution& start_only);

  std::size_t draw_initial(Rng& rng) const;
  std::size_t step(std::size_t current, Rng& rng) const;

 private:
  static std::size_t pick(std::span<const double> cumulative, double u);

  std::size_t k_;
  std::vector<double> cumulative_rows_;  // k_ * k_, row-major
  std::vector<double> cumulative_start_;
};

/// n states of the chain; the first is drawn from `start`. Deterministic given the seed.
StateSequence simulate(const StochasticMatrix& w, const Distribution& start, std::size_t n,
                       std::uint64_t seed);

}  // namespace maxent
