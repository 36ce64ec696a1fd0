#include "maxent/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxent/error_analysis.hpp"
#include "maxent/errors.hpp"
#include "maxent/estimators.hpp"
#include "maxent/forecast.hpp"
#include "maxent/ingest.hpp"
#include "maxent/nonstationary.hpp"
#include "maxent/parallel.hpp"
#include "maxent/solver.hpp"

#ifndef MAXENT_VERSION
#define MAXENT_VERSION "dev"
#endif

namespace maxent::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string input;
  std::string output;
  std::string format = "csv";
  std::vector<std::string> method{"maxent"};
  std::vector<std::size_t> window;
  std::size_t horizon = 8;
  double threshold = kDefaultThreshold;
  double interval = 0.0;
  std::size_t grid = 100;
  std::size_t samples = 2000;
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  std::size_t stride = 1;
  std::size_t cap = 500;
  std::size_t workers = 1;
  bool stratify = false;
  std::string stratum_mode = "upper";
  std::size_t k = 2;
  std::vector<std::size_t> n{1, 5, 10, 20, 30, 40, 50, 75, 100};
  double period = 500.0;
  std::size_t length = 5000;
  std::size_t seeds = 20;
  std::string process = "toy";
  std::string matrix;
  std::string states;
  bool synthetic = false;
  bool timestamps = false;
};

json config_json(const RunConfig& c) {
  return json{{"input", c.input},
              {"output", c.output},
              {"format", c.format},
              {"method", c.method},
              {"window", c.window},
              {"horizon", c.horizon},
              {"threshold", c.threshold},
              {"interval", c.interval},
              {"grid", c.grid},
              {"samples", c.samples},
              {"replicates", c.replicates},
              {"seed", c.seed},
              {"stride", c.stride},
              {"cap", c.cap},
              {"workers", c.workers},
              {"stratify", c.stratify},
              {"stratum-mode", c.stratum_mode},
              {"k", c.k},
              {"n", c.n},
              {"period", c.period},
              {"length", c.length},
              {"seeds", c.seeds},
              {"process", c.process},
              {"matrix", c.matrix},
              {"states", c.states},
              {"synthetic", c.synthetic},
              {"timestamps", c.timestamps}};
}

// ---------------------------------------------------------------------------
// Tabular artifacts

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

Cell integer(std::size_t v) { return static_cast<long long>(v); }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, double>) return format_double(v);
        else return std::to_string(v);
      },
      c);
}

std::string render(const json& metadata, const std::vector<Table>& tables,
                   const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    json doc{{"metadata", metadata}, {"tables", json::object()}};
    for (const auto& t : tables) {
      json rows = json::array();
      for (const auto& r : t.rows) {
        json row = json::object();
        for (std::size_t c = 0; c < t.columns.size(); ++c)
          std::visit([&](const auto& v) { row[t.columns[c]] = v; }, r[c]);
        rows.push_back(std::move(row));
      }
      doc["tables"][t.name] = std::move(rows);
    }
    os << doc.dump(2) << '\n';
    return os.str();
  }
  os << "# " << metadata.dump() << '\n';
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& t = tables[i];
    if (tables.size() > 1) os << (i ? "\n" : "") << "# table: " << t.name << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << format_cell(r[c]);
      os << '\n';
    }
  }
  return os.str();
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  const std::filesystem::path target(cfg.output);
  auto tmp = target;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw DataError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

// ---------------------------------------------------------------------------

std::vector<double> parse_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size())
      throw CLI::ValidationError("list", "cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::optional<StateSpace> states_option(const RunConfig& cfg) {
  if (cfg.states.empty()) return std::nullopt;
  return StateSpace(parse_list(cfg.states, ','));
}

StochasticMatrix matrix_option(const RunConfig& cfg, const StateSpace& states) {
  const auto k = static_cast<Eigen::Index>(states.size());
  std::vector<std::vector<double>> rows;
  std::stringstream ss(cfg.matrix);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(row, ','));
  if (static_cast<Eigen::Index>(rows.size()) != k)
    throw InvalidArgument("--matrix needs one row per state");
  Eigen::MatrixXd w(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != k)
      throw InvalidArgument("--matrix rows must have one entry per state");
    for (Eigen::Index j = 0; j < k; ++j)
      w(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return StochasticMatrix(std::move(w), states);
}

std::vector<Method> methods_option(const RunConfig& cfg) {
  std::vector<Method> out;
  for (const auto& m : cfg.method) out.push_back(parse_method(m));
  return out;
}

Table matrix_table(const StochasticMatrix& w) {
  Table t{"matrix", {"from", "to", "probability"}, {}};
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j)
      t.add({w.states()[i], w.states()[j], w(i, j)});
  return t;
}

std::span<const std::size_t> trailing(std::span<const std::size_t> series, std::size_t n) {
  if (n == 0) return series;
  if (n > series.size())
    throw InvalidArgument("window " + std::to_string(n) + " exceeds the series length " +
                          std::to_string(series.size()));
  return series.subspan(series.size() - n);
}

std::size_t single_window(const RunConfig& cfg, std::size_t fallback) {
  if (cfg.window.empty()) return fallback;
  if (cfg.window.size() != 1) throw CLI::ValidationError("--window", "expects a single value here");
  return cfg.window.front();
}

// ---------------------------------------------------------------------------
// Subcommands

std::vector<Table> cmd_estimate(const RunConfig& cfg) {
  const auto data = load_states(cfg.input, states_option(cfg));
  const auto window = trailing(data.sequence, single_window(cfg, 0));
  if (cfg.method.size() != 1) throw CLI::ValidationError("--method", "expects a single method");
  const auto method = parse_method(cfg.method.front());
  const auto a = sample_autocorrelation(window, data.states);

  Table summary{"summary", {"key", "value"}, {}};
  summary.add({std::string("n"), integer(window.size())});
  summary.add({std::string("sample_autocorrelation"), a.value});
  std::optional<StochasticMatrix> w;
  if (method == Method::maxent) {
    const auto sol = maxent_estimate(window, data.states);
    summary.add({std::string("lambda"), sol.lambda});
    summary.add({std::string("target"), sol.target});
    summary.add({std::string("residual"), sol.residual});
    w = sol.matrix;
  } else if (method == Method::sampling) {
    const auto est = frequency_estimate(window, data.states);
    for (std::size_t i = 0; i < est.unvisited.size(); ++i)
      if (est.unvisited[i]) summary.add({std::string("unvisited_row"), data.states[i]});
    w = est.matrix;
  } else {
    w = StochasticMatrix::uniform(data.states);
  }
  return {matrix_table(*w), summary};
}

std::vector<Table> cmd_ncmap(const RunConfig& cfg) {
  Table t{"ncmap", {"w_mm", "w_pp", "weighted_nc"}, {}};
  for (const auto& p : nc_map(cfg.grid, cfg.cap, cfg.workers))
    t.add({p.w_minus_minus, p.w_plus_plus, p.weighted_nc});
  return {t};
}

std::vector<Table> cmd_mucurve(const RunConfig& cfg) {
  if (cfg.n.empty()) throw CLI::ValidationError("--n", "at least one sample size is required");
  MuCurveConfig mc;
  mc.k = cfg.k;
  mc.sizes = cfg.n;
  mc.grid = cfg.grid;
  mc.samples = cfg.samples;
  mc.replicates = cfg.replicates;
  mc.cap = cfg.cap;
  mc.seed = cfg.seed;
  mc.stratify = cfg.stratify;
  mc.stratum_mode = cfg.stratum_mode == "lower" ? StratumMode::lower : StratumMode::upper;
  mc.workers = cfg.workers;
  Table t{"mucurve", {"stratum", "n", "mu", "population"}, {}};
  for (const auto& curve : mu_curve(mc)) {
    const std::string label = curve.stratum ? std::to_string(*curve.stratum) : "all";
    for (std::size_t i = 0; i < curve.sample_sizes.size(); ++i)
      t.add({label, integer(curve.sample_sizes[i]), curve.fractions[i], integer(curve.population)});
  }
  return {t};
}

std::vector<Table> cmd_simulate(const RunConfig& cfg) {
  if (cfg.process == "toy") {
    const auto seq = generate_nonstationary(cfg.period, cfg.length, cfg.seed);
    Table t{"series", {"t", "state", "w_mm", "w_pp"}, {}};
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto w = toy_matrix(static_cast<double>(i), cfg.period);
      t.add({integer(i), StateSpace::binary()[seq[i]], w(0, 0), w(1, 1)});
    }
    return {t};
  }
  Table t{"series", {"t", "state"}, {}};
  if (cfg.process == "ternary") {
    ModulatedTernaryProcess process;
    process.period = cfg.period;
    const auto seq = generate_modulated_ternary(process, cfg.length, cfg.seed);
    for (std::size_t i = 0; i < seq.size(); ++i)
      t.add({integer(i), StateSpace::ternary()[seq[i]]});
    return {t};
  }
  const auto states = states_option(cfg).value_or(StateSpace::binary());
  const auto w = matrix_option(cfg, states);
  const auto seq = simulate(w, stationary_distribution(w), cfg.length, cfg.seed);
  for (std::size_t i = 0; i < seq.size(); ++i) t.add({integer(i), states[seq[i]]});
  return {t};
}

std::vector<Table> cmd_track(const RunConfig& cfg) {
  std::vector<std::uint64_t> seeds(cfg.seeds);
  std::iota(seeds.begin(), seeds.end(), cfg.seed);
  const auto report = tracking_experiment(cfg.period, cfg.length, single_window(cfg, 50), seeds);
  Table trace{"trace", {"t", "true_w_mm", "maxent", "sampling"}, {}};
  const auto& first = report.seeds.front();
  for (std::size_t i = 0; i < report.times.size(); ++i)
    trace.add({integer(report.times[i]), report.true_coefficient[i], first.maxent[i],
               first.sampling[i]});
  Table summary{"summary", {"seed", "mae_maxent", "mae_sampling"}, {}};
  for (const auto& s : report.seeds)
    summary.add({std::to_string(s.seed), s.mae_maxent, s.mae_sampling});
  summary.add({std::string("pooled"), report.mae_maxent, report.mae_sampling});
  return {trace, summary};
}

std::vector<Table> cmd_forecast(const RunConfig& cfg) {
  const auto data = load_states(cfg.input, states_option(cfg));
  const auto window = trailing(data.sequence, single_window(cfg, 0));
  if (cfg.method.size() != 1) throw CLI::ValidationError("--method", "expects a single method");
  MaxEntCache cache(data.states);
  const auto w = estimate_window(window, parse_method(cfg.method.front()), data.states, &cache);
  const auto q = step_distribution(w, window.back(), cfg.horizon);
  const CentileBoundaries bins(q);

  Table dist{"distribution", {"k", "q"}, {}};
  for (long k = q.min_sum; k <= q.max_sum(); ++k) dist.add({static_cast<long long>(k), q.at(k)});
  Table centiles{"centiles", {"k", "pi"}, {}};
  const auto pi = bins.predicted();
  for (std::size_t c = 0; c < kTailCentiles; ++c) centiles.add({integer(c + 1), pi.pi[c]});
  Table assignment{"assignment", {"sum", "centile", "lower_weight", "upper_weight"}, {}};
  for (long k = q.min_sum; k <= q.max_sum(); ++k) {
    const auto lo = bins.lower(k);
    const auto hi = bins.upper(k);
    for (std::size_t c = 0; c < kTailCentiles; ++c)
      if (lo[c] > 0.0 || hi[c] > 0.0)
        assignment.add({static_cast<long long>(k), integer(c + 1), lo[c], hi[c]});
  }
  return {matrix_table(w), dist, centiles, assignment};
}

std::vector<Table> cmd_backtest(const RunConfig& cfg) {
  std::optional<LabelledStates> data;
  if (cfg.synthetic) {
    ModulatedTernaryProcess process;
    process.period = cfg.period;
    data = LabelledStates{generate_modulated_ternary(process, cfg.length, cfg.seed),
                          StateSpace::ternary(),
                          {}};
  } else {
    if (cfg.input.empty()) throw CLI::ValidationError("--input", "required unless --synthetic");
    data = load_states(cfg.input, states_option(cfg));
  }
  std::vector<std::size_t> windows = cfg.window;
  if (windows.empty()) windows = {10, 20, 30, 40, 50, 60, 80, 100};
  const auto report = backtest(data->sequence, data->states, windows, cfg.horizon,
                               methods_option(cfg), cfg.stride, cfg.workers);
  Table t{"backtest", {"n", "method", "delta", "origins"}, {}};
  for (const auto& [method, cells] : report.cells)
    for (std::size_t i = 0; i < cells.size(); ++i)
      t.add({integer(report.sample_sizes[i]), std::string(to_string(method)), cells[i].delta,
             integer(cells[i].origins)});
  return {t};
}

std::vector<Table> cmd_discretize(const RunConfig& cfg) {
  auto prices = load_prices(cfg.input);
  if (cfg.interval > 0.0) prices = resample(prices, cfg.interval);
  const auto returns = to_returns(prices);
  const auto seq = discretize(returns, cfg.threshold);
  const auto states = StateSpace::ternary();
  Table t{"states", cfg.timestamps ? std::vector<std::string>{"timestamp", "state"}
                                   : std::vector<std::string>{"state"},
          {}};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (cfg.timestamps)
      t.add({returns.timestamps[i], states[seq[i]]});
    else
      t.add({states[seq[i]]});
  }
  return {t};
}

// ---------------------------------------------------------------------------

constexpr const char* kColumnsHelp = R"(Output columns (CSV; first line is '# ' + JSON metadata):
  estimate    matrix: from,to,probability | summary: key,value
  ncmap       w_mm,w_pp,weighted_nc
  mucurve     stratum,n,mu,population
  simulate    t,state[,w_mm,w_pp]
  track       trace: t,true_w_mm,maxent,sampling | summary: seed,mae_maxent,mae_sampling
  forecast    matrix | distribution: k,q | centiles: k,pi | assignment: sum,centile,lower_weight,upper_weight
  backtest    n,method,delta,origins
  discretize  [timestamp,]state
Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 numerical non-convergence.
Environment: MAXENT_WORKERS sets the default --workers.)";

struct Subcommand {
  CLI::App* app;
  std::vector<Table> (*handler)(const RunConfig&);
};

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.workers = default_workers();

  CLI::App app{"Maximum-entropy Markov estimation, error maps and tail backtests", "maxent"};
  app.footer(kColumnsHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", MAXENT_VERSION);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--output", cfg.output, "Write the artifact to this file instead of stdout");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };
  auto seed = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  };
  auto workers = [&](CLI::App* sub) {
    sub->add_option("--workers", cfg.workers, "Worker threads")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1024}))
        ->capture_default_str();
  };
  auto method_names = CLI::IsMember({"maxent", "sampling", "naive"});

  std::vector<Subcommand> subs;

  auto* estimate = app.add_subcommand("estimate", "Estimate a transition matrix from a state CSV");
  common(estimate);
  estimate->add_option("--input", cfg.input, "State CSV")->required();
  estimate->add_option("--method", cfg.method, "Estimator")->check(method_names)->capture_default_str();
  estimate->add_option("--window", cfg.window, "Use only the trailing n points")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  estimate->add_option("--states", cfg.states, "State values, e.g. -1,0,1");
  subs.push_back({estimate, cmd_estimate});

  auto* ncmap = app.add_subcommand("ncmap", "Weighted critical sample size over 2-state matrices");
  common(ncmap);
  workers(ncmap);
  ncmap->add_option("--grid", cfg.grid, "Grid points per axis")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}))
      ->capture_default_str();
  ncmap->add_option("--cap", cfg.cap, "Largest n scanned")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}))
      ->capture_default_str();
  subs.push_back({ncmap, cmd_ncmap});

  auto* mucurve = app.add_subcommand("mucurve", "Fraction of matrices favouring MaxEnt vs sample size");
  common(mucurve);
  seed(mucurve);
  workers(mucurve);
  mucurve->add_option("--k", cfg.k, "Number of states")->check(CLI::IsMember({2, 3}))->capture_default_str();
  mucurve->add_option("--n", cfg.n, "Sample sizes")
      ->delimiter(',')
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20))
      ->capture_default_str();
  mucurve->add_option("--grid", cfg.grid, "Grid points per axis (K = 2)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}))
      ->capture_default_str();
  mucurve->add_option("--samples", cfg.samples, "Random matrices (K = 3)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000000}))
      ->capture_default_str();
  mucurve->add_option("--replicates", cfg.replicates, "Simulations per matrix (K = 3)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}))
      ->capture_default_str();
  mucurve->add_option("--cap", cfg.cap, "Largest n scanned")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))
      ->capture_default_str();
  mucurve->add_flag("--stratify", cfg.stratify, "Also emit one curve per entropy-rate quintile");
  mucurve->add_option("--stratum-mode", cfg.stratum_mode, "Cumulated quintiles from above or below")
      ->check(CLI::IsMember({"upper", "lower"}))
      ->capture_default_str();
  subs.push_back({mucurve, cmd_mucurve});

  auto* sim = app.add_subcommand("simulate", "Simulate the oscillating 2-state process or a fixed chain");
  common(sim);
  seed(sim);
  sim->add_option("--process", cfg.process, "toy | ternary | matrix")
      ->check(CLI::IsMember({"toy", "ternary", "matrix"}))
      ->capture_default_str();
  sim->add_option("--period", cfg.period, "Oscillation period T")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--length", cfg.length, "Number of states")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 40))
      ->capture_default_str();
  sim->add_option("--matrix", cfg.matrix, "Rows separated by ';', entries by ','");
  sim->add_option("--states", cfg.states, "State values for --process matrix");
  subs.push_back({sim, cmd_simulate});

  auto* track = app.add_subcommand("track", "Windowed estimates of W-- on the oscillating process");
  common(track);
  seed(track);
  track->add_option("--period", cfg.period, "Oscillation period T")->check(CLI::PositiveNumber)->capture_default_str();
  track->add_option("--length", cfg.length, "Series length")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))
      ->capture_default_str();
  track->add_option("--window", cfg.window, "Window size (default 50)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  track->add_option("--seeds", cfg.seeds, "Realizations, seeded seed, seed+1, ...")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
      ->capture_default_str();
  subs.push_back({track, cmd_track});

  auto* forecast = app.add_subcommand("forecast", "s-step distribution and tail centiles at the series end");
  common(forecast);
  forecast->add_option("--input", cfg.input, "State CSV (integer states)")->required();
  forecast->add_option("--window", cfg.window, "Trailing sample size (default: whole series)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  forecast->add_option("--horizon", cfg.horizon, "Steps ahead")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}))
      ->capture_default_str();
  forecast->add_option("--method", cfg.method, "Estimator")->check(method_names)->capture_default_str();
  forecast->add_option("--states", cfg.states, "State values, e.g. -1,0,1");
  subs.push_back({forecast, cmd_forecast});

  auto* bt = app.add_subcommand("backtest", "Rolling tail-forecast error per sample size and method");
  common(bt);
  seed(bt);
  workers(bt);
  bt->add_option("--input", cfg.input, "State CSV");
  bt->add_flag("--synthetic", cfg.synthetic, "Use the modulated 3-state generator instead of --input");
  bt->add_option("--length", cfg.length, "Synthetic series length")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))
      ->capture_default_str();
  bt->add_option("--period", cfg.period, "Synthetic modulation period")->check(CLI::PositiveNumber)->capture_default_str();
  bt->add_option("--window", cfg.window, "Sample sizes")
      ->delimiter(',')
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  bt->add_option("--horizon", cfg.horizon, "Steps ahead")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}))
      ->capture_default_str();
  bt->add_option("--method", cfg.method, "Estimators")->delimiter(',')->check(method_names);
  bt->add_option("--stride", cfg.stride, "Origin stride")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 40))
      ->capture_default_str();
  bt->add_option("--states", cfg.states, "State values, e.g. -1,0,1");
  subs.push_back({bt, cmd_backtest});

  auto* disc = app.add_subcommand("discretize", "Price CSV to 3-state CSV");
  common(disc);
  disc->add_option("--input", cfg.input, "Price CSV (timestamp,price)")->required();
  disc->add_option("--interval", cfg.interval, "Resample to this many seconds first (0: off)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  disc->add_option("--threshold", cfg.threshold, "Return threshold")->check(CLI::PositiveNumber)->capture_default_str();
  disc->add_flag("--timestamps", cfg.timestamps, "Emit a timestamp column");
  subs.push_back({disc, cmd_discretize});

  try {
    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  // Backtest defaults to all three estimators.
  if (bt->parsed() && bt->count("--method") == 0) cfg.method = {"maxent", "sampling", "naive"};

  for (const auto& sub : subs) {
    if (!sub.app->parsed()) continue;
    try {
      const json full = config_json(cfg);
      json used = json::object();
      for (const auto* opt : sub.app->get_options()) {
        for (const auto& name : opt->get_lnames())
          if (full.contains(name)) used[name] = full[name];
      }
      const json metadata{{"tool", "maxent"},
                          {"version", MAXENT_VERSION},
                          {"subcommand", sub.app->get_name()},
                          {"config", used}};
      emit(cfg, render(metadata, sub.handler(cfg), cfg.format), out);
      return kSuccess;
    } catch (const CLI::ValidationError& e) {
      err << "usage error: " << e.what() << '\n';
      return kUsage;
    } catch (const ConvergenceError& e) {
      err << "non-convergence: " << e.what() << '\n';
      return kNonConvergence;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kDataError;
    } catch (const std::filesystem::filesystem_error& e) {
      err << "error: " << e.what() << '\n';
      return kDataError;
    }
  }
  return kUsage;
}

}  // namespace maxent::cli
