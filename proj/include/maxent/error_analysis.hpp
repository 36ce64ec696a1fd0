#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "maxent/estimators.hpp"
#include "maxent/markov.hpp"

namespace maxent {

/// Mean and standard deviation of |X| for X ~ N(mu, variance).
struct FoldedNormalStats {
  double mean;
  double std;
};

FoldedNormalStats folded_normal_stats(double mu, double variance);

/// Expected absolute error of each coefficient estimate at sample size n.
class ErrorStats {
 public:
  ErrorStats(Method estimator, std::size_t n, std::size_t k);

  Method estimator() const noexcept { return estimator_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return k_; }
  FoldedNormalStats& operator()(std::size_t i, std::size_t j) { return cells_[i * k_ + j]; }
  const FoldedNormalStats& operator()(std::size_t i, std::size_t j) const {
    return cells_[i * k_ + j];
  }
  Eigen::MatrixXd means() const;

 private:
  Method estimator_;
  std::size_t n_;
  std::size_t k_;
  std::vector<FoldedNormalStats> cells_;
};

// The analytic model covers two states {-1, +1}; other shapes raise UnsupportedCase.
//
// MaxEnt: the sample autocorrelation is taken as N(A, 1/n), so each closed-form
// coefficient (1 +/- A)/2 is off by N(W^ME_ij - W_ij, 1/(4n)).
// Sampling: W_ij is estimated as N(W_ij, W_ij (1 - W_ij) / (n p_i)).

ErrorStats maxent_error_stats(const StochasticMatrix& truth, std::size_t n);
ErrorStats sampling_error_stats(const StochasticMatrix& truth, std::size_t n);

/// Sampling minus MaxEnt expected absolute error; positive favours MaxEnt.
Eigen::MatrixXd accuracy_gain(const StochasticMatrix& truth, std::size_t n);

struct CriticalSampleSize {
  Eigen::MatrixXi per_coefficient;
  /// sum_i p_i * mean_j n_c^ij, with p the stationary law of the true chain.
  double weighted;
};

/// Largest n in [1, cap] with a nonnegative gain, per coefficient (0 when none).
CriticalSampleSize critical_sample_size(const StochasticMatrix& truth, std::size_t cap);

double weighted_critical_size(const Eigen::MatrixXi& per_coefficient, const Distribution& p);

/// Monte-Carlo counterpart for any K. Each replicate is one chain of length `cap`
/// started at stationarity; every prefix n = 2..cap is scored, so the gain curves of
/// neighbouring n share their randomness. n_c^ij is the last n before the gain first
/// turns negative (0 if negative at n = 2, cap if it never does).
struct EmpiricalGain {
  std::vector<std::size_t> sizes;       // 2..cap
  std::vector<Eigen::MatrixXd> gain;    // one K x K table per size
};

EmpiricalGain empirical_gain(const StochasticMatrix& truth, std::size_t cap,
                             std::size_t replicates, std::uint64_t seed, MaxEntCache& cache);

CriticalSampleSize empirical_critical_sample_size(const StochasticMatrix& truth, std::size_t cap,
                                                  std::size_t replicates, std::uint64_t seed,
                                                  MaxEntCache& cache);

// ---------------------------------------------------------------------------
// Parameter-space sweeps

struct NcMapPoint {
  double w_minus_minus;
  double w_plus_plus;
  double weighted_nc;
};

/// Weighted n_c over the open grid W-- , W++ in {(i + 0.5)/grid}.
std::vector<NcMapPoint> nc_map(std::size_t grid, std::size_t cap, std::size_t workers = 1);

/// One flat-Dirichlet 3-state chain of the Monte-Carlo population.
struct PopulationMember {
  StochasticMatrix matrix;
  double entropy_rate;
  double weighted_nc;
};

enum class StratumMode {
  upper,  // stratum q keeps chains at or above the (q-1)-th entropy-rate quintile
  lower,  // stratum q keeps chains below the q-th quintile
};

struct MuCurve {
  std::vector<std::size_t> sample_sizes;
  std::vector<double> fractions;
  std::optional<std::size_t> stratum;  // 1..5, empty for the full population
  std::size_t population;
};

struct MuCurveConfig {
  std::size_t k = 2;
  std::vector<std::size_t> sizes{1, 5, 10, 20, 30, 40, 50, 75, 100};
  std::size_t grid = 100;          // K = 2
  std::size_t samples = 2000;      // K = 3
  std::size_t replicates = 200;    // K = 3
  std::size_t cap = 500;
  std::uint64_t seed = 1;
  bool stratify = false;
  StratumMode stratum_mode = StratumMode::upper;
  std::size_t workers = 1;
};

/// Draws `count` flat-Dirichlet 3 x 3 chains and scores them. Member i depends only on
/// (seed, i), so the result is independent of the worker count.
std::vector<PopulationMember> ternary_population(std::size_t count, std::size_t cap,
                                                 std::size_t replicates, std::uint64_t seed,
                                                 std::size_t workers = 1);

/// Fraction of `weighted_nc` values at or above each size.
MuCurve mu_fractions(const std::vector<double>& weighted_nc, const std::vector<std::size_t>& sizes);

/// Full-population curve first, then one curve per stratum when requested.
std::vector<MuCurve> mu_curves_from_population(const std::vector<PopulationMember>& population,
                                               const std::vector<std::size_t>& sizes,
                                               bool stratify, StratumMode mode);

std::vector<MuCurve> mu_curve(const MuCurveConfig& config);

}  // namespace maxent
