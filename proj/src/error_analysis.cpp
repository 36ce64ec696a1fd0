#include "maxent/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "maxent/errors.hpp"
#include "maxent/parallel.hpp"
#include "maxent/random.hpp"

namespace maxent {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void require_binary(const StochasticMatrix& w) {
  if (w.size() != 2 || !(w.states() == StateSpace::binary()))
    throw UnsupportedCase("analytic error formulas cover the two-state {-1, +1} chain only");
}

void require_positive_n(std::size_t n) {
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
}

}  // namespace

FoldedNormalStats folded_normal_stats(double mu, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw InvalidArgument("folded normal needs a positive variance");
  const double sigma = std::sqrt(variance);
  const double mean = sigma * std::sqrt(2.0 / std::numbers::pi) *
                          std::exp(-mu * mu / (2.0 * variance)) +
                      mu * (1.0 - 2.0 * normal_cdf(-mu / sigma));
  const double var = mu * mu + variance - mean * mean;
  return {mean, std::sqrt(std::max(var, 0.0))};
}

// ---------------------------------------------------------------------------

ErrorStats::ErrorStats(Method estimator, std::size_t n, std::size_t k)
    : estimator_(estimator), n_(n), k_(k), cells_(k * k, FoldedNormalStats{0.0, 0.0}) {}

Eigen::MatrixXd ErrorStats::means() const {
  const auto k = static_cast<Eigen::Index>(k_);
  Eigen::MatrixXd m(k, k);
  for (std::size_t i = 0; i < k_; ++i)
    for (std::size_t j = 0; j < k_; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j).mean;
  return m;
}

ErrorStats maxent_error_stats(const StochasticMatrix& truth, std::size_t n) {
  require_binary(truth);
  require_positive_n(n);
  const double a = matrix_autocorrelation(stationary_distribution(truth), truth);
  const double diag = (1.0 + a) / 2.0;
  const double off = (1.0 - a) / 2.0;
  const double variance = 1.0 / (4.0 * static_cast<double>(n));
  ErrorStats out(Method::maxent, n, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      out(i, j) = folded_normal_stats((i == j ? diag : off) - truth(i, j), variance);
  return out;
}

ErrorStats sampling_error_stats(const StochasticMatrix& truth, std::size_t n) {
  require_binary(truth);
  require_positive_n(n);
  const auto p = stationary_distribution(truth);
  const double dn = static_cast<double>(n);
  ErrorStats out(Method::sampling, n, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const double spread = truth(i, j) * (1.0 - truth(i, j)) / (dn * p[i]);
      out(i, j) = {std::sqrt(2.0 * spread / std::numbers::pi),
                   std::sqrt((1.0 - 2.0 / std::numbers::pi) * spread)};
    }
  return out;
}

Eigen::MatrixXd accuracy_gain(const StochasticMatrix& truth, std::size_t n) {
  return sampling_error_stats(truth, n).means() - maxent_error_stats(truth, n).means();
}

double weighted_critical_size(const Eigen::MatrixXi& per_coefficient, const Distribution& p) {
  const auto k = per_coefficient.rows();
  if (per_coefficient.cols() != k || static_cast<std::size_t>(k) != p.size())
    throw InvalidArgument("critical-size table does not match the distribution");
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    total += p[static_cast<std::size_t>(i)] * per_coefficient.row(i).cast<double>().mean();
  return total;
}

CriticalSampleSize critical_sample_size(const StochasticMatrix& truth, std::size_t cap) {
  require_binary(truth);
  if (cap < 1) throw InvalidArgument("cap must be at least 1");
  const auto p = stationary_distribution(truth);
  const double a = matrix_autocorrelation(p, truth);

  CriticalSampleSize out{Eigen::MatrixXi::Zero(2, 2), 0.0};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double w = truth(i, j);
      const double bias = (i == j ? (1.0 + a) / 2.0 : (1.0 - a) / 2.0) - w;
      const double spread = w * (1.0 - w) / p[i];
      int last = 0;
      for (std::size_t n = 1; n <= cap; ++n) {
        const double dn = static_cast<double>(n);
        const double sampling = std::sqrt(2.0 * spread / (std::numbers::pi * dn));
        const double me = folded_normal_stats(bias, 1.0 / (4.0 * dn)).mean;
        if (sampling - me >= 0.0) last = static_cast<int>(n);
      }
      out.per_coefficient(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = last;
    }
  }
  out.weighted = weighted_critical_size(out.per_coefficient, p);
  return out;
}

// ---------------------------------------------------------------------------

EmpiricalGain empirical_gain(const StochasticMatrix& truth, std::size_t cap,
                             std::size_t replicates, std::uint64_t seed, MaxEntCache& cache) {
  if (cap < 2) throw InvalidArgument("empirical scan needs cap >= 2");
  if (replicates < 1) throw InvalidArgument("need at least one replicate");
  if (!(cache.states() == truth.states()))
    throw InvalidArgument("cache state space does not match the chain");

  const std::size_t k = truth.size();
  const auto& x = truth.states();
  const std::size_t slots = (cap - 1) * k * k;
  std::vector<double> err_me(slots, 0.0);
  std::vector<double> err_s(slots, 0.0);

  const ChainSampler chain(truth);
  const ChainSampler initial(stationary_distribution(truth));
  Rng rng(seed);
  std::vector<double> counts(k * k);
  std::vector<double> departures(k);
  const double fill = 1.0 / static_cast<double>(k);

  for (std::size_t r = 0; r < replicates; ++r) {
    std::fill(counts.begin(), counts.end(), 0.0);
    std::fill(departures.begin(), departures.end(), 0.0);
    double pair_sum = 0.0;
    std::size_t prev = initial.draw_initial(rng);
    for (std::size_t n = 2; n <= cap; ++n) {
      const std::size_t next = chain.step(prev, rng);
      counts[prev * k + next] += 1.0;
      departures[prev] += 1.0;
      pair_sum += x[prev] * x[next];
      prev = next;

      const auto& me = cache.for_sample(pair_sum / static_cast<double>(n - 1));
      double* acc_me = &err_me[(n - 2) * k * k];
      double* acc_s = &err_s[(n - 2) * k * k];
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          const double w = truth(i, j);
          const double s = departures[i] > 0.0 ? counts[i * k + j] / departures[i] : fill;
          acc_me[i * k + j] += std::abs(me(i, j) - w);
          acc_s[i * k + j] += std::abs(s - w);
        }
    }
  }

  EmpiricalGain out;
  const double inv_r = 1.0 / static_cast<double>(replicates);
  for (std::size_t n = 2; n <= cap; ++n) {
    out.sizes.push_back(n);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t slot = (n - 2) * k * k + i * k + j;
        g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (err_s[slot] - err_me[slot]) * inv_r;
      }
    out.gain.push_back(std::move(g));
  }
  return out;
}

CriticalSampleSize empirical_critical_sample_size(const StochasticMatrix& truth, std::size_t cap,
                                                  std::size_t replicates, std::uint64_t seed,
                                                  MaxEntCache& cache) {
  const auto curves = empirical_gain(truth, cap, replicates, seed, cache);
  const auto k = static_cast<Eigen::Index>(truth.size());
  CriticalSampleSize out{Eigen::MatrixXi::Zero(k, k), 0.0};
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      int nc = 0;
      for (std::size_t s = 0; s < curves.sizes.size(); ++s) {
        if (curves.gain[s](i, j) < 0.0) break;
        nc = static_cast<int>(curves.sizes[s]);
      }
      out.per_coefficient(i, j) = nc;
    }
  out.weighted = weighted_critical_size(out.per_coefficient, stationary_distribution(truth));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<NcMapPoint> nc_map(std::size_t grid, std::size_t cap, std::size_t workers) {
  if (grid < 1) throw InvalidArgument("grid resolution must be at least 1");
  std::vector<NcMapPoint> out(grid * grid);
  const auto states = StateSpace::binary();
  parallel_chunks(out.size(), std::max<std::size_t>(grid, 1), workers,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t idx = begin; idx < end; ++idx) {
                      const double wmm = (static_cast<double>(idx / grid) + 0.5) / grid;
                      const double wpp = (static_cast<double>(idx % grid) + 0.5) / grid;
                      Eigen::Matrix2d w;
                      w << wmm, 1.0 - wmm, 1.0 - wpp, wpp;
                      const auto nc = critical_sample_size(StochasticMatrix(w, states), cap);
                      out[idx] = {wmm, wpp, nc.weighted};
                    }
                  });
  return out;
}

std::vector<PopulationMember> ternary_population(std::size_t count, std::size_t cap,
                                                 std::size_t replicates, std::uint64_t seed,
                                                 std::size_t workers) {
  const auto states = StateSpace::ternary();
  std::vector<std::optional<PopulationMember>> slots(count);
  // Solving the MaxEnt matrix for each distinct target dominates; one cache per worker
  // keeps that cost fixed. Cached values do not depend on solve order.
  const std::size_t chunks = std::max<std::size_t>(1, workers);
  parallel_chunks(count, chunks, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    MaxEntCache cache(states);
    for (std::size_t m = begin; m < end; ++m) {
      Rng draw(derive_seed(seed, 2 * m));
      std::exponential_distribution<double> expo(1.0);
      Eigen::Matrix3d w;
      for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) w(i, j) = expo(draw);
        w.row(i) /= w.row(i).sum();
      }
      StochasticMatrix truth(w, states);
      const double h = entropy_rate(stationary_distribution(truth), truth);
      const auto nc =
          empirical_critical_sample_size(truth, cap, replicates, derive_seed(seed, 2 * m + 1), cache);
      slots[m] = PopulationMember{std::move(truth), h, nc.weighted};
    }
  });
  std::vector<PopulationMember> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

MuCurve mu_fractions(const std::vector<double>& weighted_nc, const std::vector<std::size_t>& sizes) {
  MuCurve curve{sizes, {}, std::nullopt, weighted_nc.size()};
  for (auto n : sizes) {
    const auto hits = std::count_if(weighted_nc.begin(), weighted_nc.end(),
                                    [n](double v) { return v >= static_cast<double>(n); });
    curve.fractions.push_back(weighted_nc.empty()
                                  ? 0.0
                                  : static_cast<double>(hits) / static_cast<double>(weighted_nc.size()));
  }
  return curve;
}

std::vector<MuCurve> mu_curves_from_population(const std::vector<PopulationMember>& population,
                                               const std::vector<std::size_t>& sizes,
                                               bool stratify, StratumMode mode) {
  std::vector<double> all;
  all.reserve(population.size());
  for (const auto& m : population) all.push_back(m.weighted_nc);
  std::vector<MuCurve> out{mu_fractions(all, sizes)};
  if (!stratify) return out;

  // Rank by entropy rate (index breaks ties) so strata sizes are exact.
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return population[a].entropy_rate < population[b].entropy_rate;
  });
  const std::size_t total = population.size();
  for (std::size_t q = 1; q <= 5; ++q) {
    const std::size_t begin = mode == StratumMode::upper ? (q - 1) * total / 5 : 0;
    const std::size_t end = mode == StratumMode::upper ? total : q * total / 5;
    std::vector<double> subset;
    for (std::size_t r = begin; r < end; ++r) subset.push_back(population[order[r]].weighted_nc);
    auto curve = mu_fractions(subset, sizes);
    curve.stratum = q;
    out.push_back(std::move(curve));
  }
  return out;
}

std::vector<MuCurve> mu_curve(const MuCurveConfig& config) {
  if (config.sizes.empty()) throw InvalidArgument("no sample sizes requested");
  if (config.k == 2) {
    const auto map = nc_map(config.grid, config.cap, config.workers);
    std::vector<double> values;
    values.reserve(map.size());
    for (const auto& pt : map) values.push_back(pt.weighted_nc);
    return {mu_fractions(values, config.sizes)};
  }
  if (config.k == 3) {
    const auto population = ternary_population(config.samples, config.cap, config.replicates,
                                               config.seed, config.workers);
    return mu_curves_from_population(population, config.sizes, config.stratify,
                                     config.stratum_mode);
  }
  throw UnsupportedCase("mu curves are available for K = 2 and K = 3 only");
}

}  // namespace maxent
