#include "maxent/nonstationary.hpp"

#include <cmath>
#include <numbers>

#include "maxent/errors.hpp"
#include "maxent/estimators.hpp"

namespace maxent {

StochasticMatrix toy_matrix(double t, double period) {
  if (!(period > 0.0)) throw InvalidArgument("period must be positive");
  const double s1 = 0.1 * std::sin(2.0 * std::numbers::pi * t / period);
  const double s2 = 0.1 * std::sin(2.0 * std::numbers::pi * t / (1.2 * period));
  Eigen::Matrix2d w;
  w << 0.6 + s1, 0.4 - s1, 0.4 - s2, 0.6 + s2;
  return StochasticMatrix(w, StateSpace::binary());
}

StateSequence generate_nonstationary(double period, std::size_t length, std::uint64_t seed) {
  if (length < 1) throw InvalidArgument("length must be at least 1");
  Rng rng(seed);
  const auto w0 = toy_matrix(0.0, period);
  std::vector<std::size_t> out(length);
  out[0] = ChainSampler(stationary_distribution(w0)).draw_initial(rng);
  for (std::size_t t = 0; t + 1 < length; ++t)
    out[t + 1] = ChainSampler(toy_matrix(static_cast<double>(t), period)).step(out[t], rng);
  return StateSequence(std::move(out), 2);
}

StochasticMatrix ModulatedTernaryProcess::matrix(double t) const {
  if (!(period > 0.0)) throw InvalidArgument("period must be positive");
  const double lambda =
      coupling_mean + coupling_amplitude * std::sin(2.0 * std::numbers::pi * t / period);
  const double g0 =
      std::exp(flat_amplitude * std::sin(2.0 * std::numbers::pi * t / (1.3 * period)));
  const Eigen::Vector3d x(-1.0, 0.0, 1.0);
  const Eigen::Vector3d g(1.0, g0, 1.0);
  Eigen::Matrix3d w;
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) w(i, j) = g(j) * std::exp(lambda * x(i) * x(j));
    w.row(i) /= w.row(i).sum();
  }
  return StochasticMatrix(w, StateSpace::ternary());
}

StateSequence generate_modulated_ternary(const ModulatedTernaryProcess& process,
                                         std::size_t length, std::uint64_t seed) {
  if (length < 1) throw InvalidArgument("length must be at least 1");
  Rng rng(seed);
  std::vector<std::size_t> out(length);
  out[0] = ChainSampler(stationary_distribution(process.matrix(0.0))).draw_initial(rng);
  for (std::size_t t = 0; t + 1 < length; ++t)
    out[t + 1] = ChainSampler(process.matrix(static_cast<double>(t))).step(out[t], rng);
  return StateSequence(std::move(out), 3);
}

TrackingReport tracking_experiment(double period, std::size_t length, std::size_t window,
                                   std::span<const std::uint64_t> seeds) {
  if (window < 2) throw InvalidArgument("window must hold at least 2 points");
  if (length < window) throw InvalidArgument("series is shorter than the window");
  if (seeds.empty()) throw InvalidArgument("at least one seed is required");

  const auto states = StateSpace::binary();
  TrackingReport report{};
  for (std::size_t t = window - 1; t < length; ++t) {
    report.times.push_back(t);
    report.true_coefficient.push_back(toy_matrix(static_cast<double>(t), period)(0, 0));
  }

  MaxEntCache cache(states);
  for (auto seed : seeds) {
    const auto series = generate_nonstationary(period, length, seed);
    const std::span<const std::size_t> view = series;
    SeedTrace trace{seed, {}, {}, 0.0, 0.0};
    for (std::size_t idx = 0; idx < report.times.size(); ++idx) {
      const auto w = view.subspan(report.times[idx] + 1 - window, window);
      const double me = estimate_window(w, Method::maxent, states, &cache)(0, 0);
      const double fs = estimate_window(w, Method::sampling, states)(0, 0);
      trace.maxent.push_back(me);
      trace.sampling.push_back(fs);
      trace.mae_maxent += std::abs(me - report.true_coefficient[idx]);
      trace.mae_sampling += std::abs(fs - report.true_coefficient[idx]);
    }
    const double count = static_cast<double>(report.times.size());
    trace.mae_maxent /= count;
    trace.mae_sampling /= count;
    report.mae_maxent += trace.mae_maxent;
    report.mae_sampling += trace.mae_sampling;
    report.seeds.push_back(std::move(trace));
  }
  report.mae_maxent /= static_cast<double>(seeds.size());
  report.mae_sampling /= static_cast<double>(seeds.size());
  return report;
}

}  // namespace maxent
