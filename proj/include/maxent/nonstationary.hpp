#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "maxent/markov.hpp"

namespace maxent {

/// Two-state chain whose rows oscillate with periods T and 1.2 T:
///   row -: (0.6 + 0.1 sin(2 pi t / T),     0.4 - 0.1 sin(2 pi t / T))
///   row +: (0.4 - 0.1 sin(2 pi t / 1.2T),  0.6 + 0.1 sin(2 pi t / 1.2T))
StochasticMatrix toy_matrix(double t, double period);

/// State t+1 is drawn from toy_matrix(t); the first state from the stationary law at t = 0.
StateSequence generate_nonstationary(double period, std::size_t length, std::uint64_t seed);

struct SeedTrace {
  std::uint64_t seed;
  std::vector<double> maxent;    // estimated W-- per time
  std::vector<double> sampling;
  double mae_maxent;
  double mae_sampling;
};

struct TrackingReport {
  std::vector<std::size_t> times;        // last index of each trailing window
  std::vector<double> true_coefficient;  // W--(t)
  std::vector<SeedTrace> seeds;
  double mae_maxent;                     // averaged over seeds
  double mae_sampling;
};

/// Slowly varying 3-state chain on {-1, 0, +1} with detailed balance at every t:
///   W_ij(t) ~ g_j(t) exp(lambda(t) x_i x_j), rows normalized,
///   lambda(t) = coupling_mean + coupling_amplitude sin(2 pi t / T),
///   g = (1, exp(flat_amplitude sin(2 pi t / (1.3 T))), 1).
/// The joint law p_i W_ij ~ g_i g_j exp(lambda x_i x_j) is symmetric, but the chain
/// is not a maximum-entropy chain unless g matches the Perron vector.
struct ModulatedTernaryProcess {
  double period = 500.0;
  double coupling_mean = 0.4;
  double coupling_amplitude = 0.3;
  double flat_amplitude = 0.3;

  StochasticMatrix matrix(double t) const;
};

StateSequence generate_modulated_ternary(const ModulatedTernaryProcess& process,
                                         std::size_t length, std::uint64_t seed);

/// Trailing-window W-- estimates against the instantaneous truth, one realization per seed.
TrackingReport tracking_experiment(double period, std::size_t length, std::size_t window,
                                   std::span<const std::uint64_t> seeds);

}  // namespace maxent
