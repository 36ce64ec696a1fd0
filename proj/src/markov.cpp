#include "maxent/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxent/errors.hpp"

namespace maxent {

namespace {

constexpr double kStationaryTolerance = 1e-12;
constexpr std::size_t kPowerIterationCap = 1'000'000;

void require_same_size(const Distribution& p, const StochasticMatrix& w) {
  if (p.size() != w.size())
    throw InvalidArgument("distribution has " + std::to_string(p.size()) +
                          " states but matrix has " + std::to_string(w.size()));
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

std::vector<double> cumulative(const Eigen::Ref<const Eigen::VectorXd>& row) {
  std::vector<double> out(static_cast<std::size_t>(row.size()));
  double acc = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    acc += row(j);
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

StateSpace::StateSpace(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw InvalidArgument("a state space needs at least two states");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw InvalidArgument("state values must be finite");
    if (i > 0 && !(values_[i] > values_[i - 1]))
      throw InvalidArgument("state values must be strictly increasing");
  }
}

StateSpace StateSpace::binary() { return StateSpace({-1.0, 1.0}); }
StateSpace StateSpace::ternary() { return StateSpace({-1.0, 0.0, 1.0}); }

bool StateSpace::is_integer_valued() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == std::round(v) && std::abs(v) < 1e9; });
}

std::optional<std::size_t> StateSpace::index_of(double value) const noexcept {
  auto it = std::find(values_.begin(), values_.end(), value);
  if (it == values_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values_.begin());
}

// ---------------------------------------------------------------------------

Distribution::Distribution(Eigen::VectorXd mass) : mass_(std::move(mass)) {
  if (mass_.size() < 1) throw InvalidArgument("empty distribution");
  for (Eigen::Index i = 0; i < mass_.size(); ++i)
    if (!(mass_(i) >= 0.0 && mass_(i) <= 1.0))
      throw InvalidArgument("distribution entries must lie in [0, 1]");
  if (std::abs(mass_.sum() - 1.0) > kRowSumTolerance)
    throw InvalidArgument("distribution does not sum to one");
}

Distribution Distribution::uniform(std::size_t k) {
  return Distribution(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), 1.0 / k));
}

Distribution Distribution::point(std::size_t k, std::size_t state) {
  if (state >= k) throw InvalidArgument("point mass outside the state space");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  m(static_cast<Eigen::Index>(state)) = 1.0;
  return Distribution(std::move(m));
}

// ---------------------------------------------------------------------------

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd entries, StateSpace states)
    : entries_(std::move(entries)), states_(std::move(states)) {
  const auto k = static_cast<Eigen::Index>(states_.size());
  if (entries_.rows() != k || entries_.cols() != k)
    throw InvalidArgument("matrix shape does not match the state space");
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j)
      if (!(entries_(i, j) >= 0.0 && entries_(i, j) <= 1.0))
        throw InvalidArgument("transition probabilities must lie in [0, 1]");
    if (std::abs(entries_.row(i).sum() - 1.0) > kRowSumTolerance)
      throw InvalidArgument("row " + std::to_string(i) + " does not sum to one");
  }
}

StochasticMatrix StochasticMatrix::uniform(StateSpace states) {
  const auto k = static_cast<Eigen::Index>(states.size());
  return StochasticMatrix(Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k)),
                          std::move(states));
}

StochasticMatrix StochasticMatrix::identity(StateSpace states) {
  const auto k = static_cast<Eigen::Index>(states.size());
  return StochasticMatrix(Eigen::MatrixXd::Identity(k, k), std::move(states));
}

// ---------------------------------------------------------------------------

StateSequence::StateSequence(std::vector<std::size_t> indices, std::size_t num_states)
    : indices_(std::move(indices)), num_states_(num_states) {
  for (auto s : indices_)
    if (s >= num_states_) throw InvalidArgument("state index outside the state space");
}

// ---------------------------------------------------------------------------

bool is_irreducible(const StochasticMatrix& w) {
  const Eigen::MatrixXd& m = w.entries();
  Eigen::MatrixXd power = m;
  Eigen::MatrixXd reach = m;
  for (std::size_t step = 1; step < w.size(); ++step) {
    power = power * m;
    reach += power;
  }
  return (reach.array() > 0.0).all();
}

Distribution stationary_distribution(const StochasticMatrix& w) {
  if (!is_irreducible(w))
    throw NotIrreducible("transition matrix is reducible: stationary distribution is not unique");

  const auto k = static_cast<Eigen::Index>(w.size());
  // Solve p (W - I) = 0 with the last equation replaced by sum(p) = 1.
  Eigen::MatrixXd a = w.entries().transpose() - Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  Eigen::VectorXd p = a.fullPivLu().solve(rhs);

  auto residual = [&](const Eigen::VectorXd& v) {
    return (v.transpose() * w.entries() - v.transpose()).cwiseAbs().maxCoeff();
  };

  if (!p.allFinite() || (p.array() < -kStationaryTolerance).any() || residual(p) > 1e-13) {
    // Lazy chain (I + W)/2 has the same stationary vector and is aperiodic.
    const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(k, k) + w.entries());
    p = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
      Eigen::VectorXd next = lazy.transpose() * p;
      next /= next.sum();
      const double change = (next - p).cwiseAbs().maxCoeff();
      p = std::move(next);
      if (change < kStationaryTolerance) break;
    }
  }
  p = p.cwiseMax(0.0);
  p /= p.sum();
  return Distribution(std::move(p));
}

double entropy_rate(const Distribution& p, const StochasticMatrix& w) {
  require_same_size(p, w);
  double h = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) row += xlogx(w(i, j));
    h -= p[i] * row;
  }
  return h;
}

double matrix_autocorrelation(const Distribution& p, const StochasticMatrix& w) {
  require_same_size(p, w);
  const auto& x = w.states();
  double a = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) a += x[i] * x[j] * p[i] * w(i, j);
  return a;
}

double detailed_balance_residual(const Distribution& p, const StochasticMatrix& w) {
  require_same_size(p, w);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j)
      worst = std::max(worst, std::abs(p[i] * w(i, j) - p[j] * w(j, i)));
  return worst;
}

// ---------------------------------------------------------------------------

ChainSampler::ChainSampler(const StochasticMatrix& w) : k_(w.size()) {
  cumulative_rows_.reserve(k_ * k_);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k_); ++i) {
    auto row = cumulative(w.entries().row(i).transpose());
    cumulative_rows_.insert(cumulative_rows_.end(), row.begin(), row.end());
  }
}

ChainSampler::ChainSampler(const Distribution& start_only)
    : k_(start_only.size()), cumulative_start_(cumulative(start_only.mass())) {}

std::size_t ChainSampler::pick(std::span<const double> cum, double u) {
  // The last state absorbs any rounding shortfall in the cumulative sum.
  for (std::size_t j = 0; j + 1 < cum.size(); ++j)
    if (u < cum[j]) return j;
  return cum.size() - 1;
}

std::size_t ChainSampler::draw_initial(Rng& rng) const {
  if (cumulative_start_.empty()) throw InvalidArgument("sampler has no start distribution");
  return pick(cumulative_start_, uniform01(rng));
}

std::size_t ChainSampler::step(std::size_t current, Rng& rng) const {
  return pick(std::span<const double>(cumulative_rows_).subspan(current * k_, k_),
              uniform01(rng));
}

StateSequence simulate(const StochasticMatrix& w, const Distribution& start, std::size_t n,
                       std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("simulation length must be at least 1");
  require_same_size(start, w);
  Rng rng(seed);
  ChainSampler chain(w);
  ChainSampler initial(start);
  std::vector<std::size_t> out(n);
  out[0] = initial.draw_initial(rng);
  for (std::size_t t = 1; t < n; ++t) out[t] = chain.step(out[t - 1], rng);
  return StateSequence(std::move(out), w.size());
}

}  // namespace maxent
