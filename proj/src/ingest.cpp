#include "maxent/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "maxent/errors.hpp"

namespace maxent {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::optional<int> fixed_digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

// Reads the next data line, skipping blanks and '#' comments. Returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

PriceSeries::PriceSeries(std::vector<PricePoint> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].price > 0.0) || !std::isfinite(points_[i].price))
      throw DataError("price must be positive at point " + std::to_string(i));
    if (i > 0 && !(points_[i].timestamp > points_[i - 1].timestamp))
      throw DataError("timestamps must be strictly increasing at point " + std::to_string(i));
  }
}

std::optional<double> parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const auto s = trim(text);
  const auto y = fixed_digits(s, 0, 4);
  const auto mo = fixed_digits(s, 5, 2);
  const auto d = fixed_digits(s, 8, 2);
  if (!y || !mo || !d || s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  double seconds = static_cast<double>(sys_days{ymd}.time_since_epoch().count()) * 86400.0;

  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    const auto hh = fixed_digits(s, pos + 1, 2);
    const auto mm = fixed_digits(s, pos + 4, 2);
    if (!hh || !mm || s[pos + 3] != ':' || *hh > 23 || *mm > 59) return std::nullopt;
    seconds += *hh * 3600.0 + *mm * 60.0;
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      const auto ss = fixed_digits(s, pos + 1, 2);
      if (!ss || *ss > 60) return std::nullopt;
      seconds += *ss;
      pos += 3;
      if (pos < s.size() && s[pos] == '.') {
        std::size_t end = pos + 1;
        while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
        if (end == pos + 1) return std::nullopt;
        const auto frac = parse_number(std::string("0") + std::string(s.substr(pos, end - pos)));
        if (!frac) return std::nullopt;
        seconds += *frac;
        pos = end;
      }
    }
  }
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) return seconds;
    if (s[pos] != '+' && s[pos] != '-') return std::nullopt;
    const double sign = s[pos] == '+' ? 1.0 : -1.0;
    const auto oh = fixed_digits(s, pos + 1, 2);
    const std::size_t mpos = (pos + 3 < s.size() && s[pos + 3] == ':') ? pos + 4 : pos + 3;
    const auto om = fixed_digits(s, mpos, 2);
    if (!oh || !om || mpos + 2 != s.size()) return std::nullopt;
    seconds -= sign * (*oh * 3600.0 + *om * 60.0);
  }
  return seconds;
}

PriceSeries read_prices(std::istream& in, TimestampFormat format) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw DataError("price file is empty");
  const auto header = split_fields(line);
  if (header.size() != 2 || header[0] != "timestamp" || header[1] != "price")
    throw DataError("expected header 'timestamp,price'", line_no);

  std::vector<PricePoint> points;
  while (next_line(in, line, line_no)) {
    const auto fields = split_fields(line);
    if (fields.size() != 2) throw DataError("expected 2 fields", line_no);
    if (format == TimestampFormat::automatic)
      format = parse_number(fields[0]) ? TimestampFormat::epoch_seconds : TimestampFormat::iso8601;
    const auto ts = format == TimestampFormat::epoch_seconds ? parse_number(fields[0])
                                                             : parse_iso8601(fields[0]);
    if (!ts) throw DataError("malformed timestamp '" + std::string(fields[0]) + "'", line_no);
    const auto price = parse_number(fields[1]);
    if (!price) throw DataError("malformed price '" + std::string(fields[1]) + "'", line_no);
    if (!(*price > 0.0)) throw DataError("price must be positive", line_no);
    if (!points.empty() && !(*ts > points.back().timestamp))
      throw DataError("timestamps must be strictly increasing", line_no);
    points.push_back({*ts, *price});
  }
  return PriceSeries(std::move(points));
}

PriceSeries load_prices(const std::filesystem::path& path, TimestampFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_prices(in, format);
}

PriceSeries resample(const PriceSeries& prices, double interval) {
  if (!(interval > 0.0)) throw InvalidArgument("resampling interval must be positive");
  if (prices.empty()) throw InvalidArgument("cannot resample an empty series");
  const auto& pts = prices.points();
  const auto first = static_cast<long long>(std::ceil(pts.front().timestamp / interval));
  const auto last = static_cast<long long>(std::floor(pts.back().timestamp / interval));
  std::vector<PricePoint> out;
  std::size_t cursor = 0;
  for (long long b = first; b <= last; ++b) {
    const double boundary = static_cast<double>(b) * interval;
    while (cursor + 1 < pts.size() && pts[cursor + 1].timestamp <= boundary) ++cursor;
    out.push_back({boundary, pts[cursor].price});
  }
  return PriceSeries(std::move(out));
}

ReturnSeries to_returns(const PriceSeries& prices) {
  if (prices.size() < 2) throw InvalidArgument("returns need at least two prices");
  ReturnSeries out;
  out.timestamps.reserve(prices.size() - 1);
  out.values.reserve(prices.size() - 1);
  for (std::size_t t = 1; t < prices.size(); ++t) {
    out.timestamps.push_back(prices[t].timestamp);
    out.values.push_back((prices[t].price - prices[t - 1].price) / prices[t - 1].price);
  }
  return out;
}

StateSequence discretize(const ReturnSeries& returns, double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
  std::vector<std::size_t> out;
  out.reserve(returns.values.size());
  for (double r : returns.values) out.push_back(r < -threshold ? 0 : (r > threshold ? 2 : 1));
  return StateSequence(std::move(out), 3);
}

// ---------------------------------------------------------------------------

LabelledStates read_states(std::istream& in, const std::optional<StateSpace>& states) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw DataError("state file is empty");
  const auto header = split_fields(line);
  bool with_time = false;
  if (header.size() == 1 && header[0] == "state") {
    with_time = false;
  } else if (header.size() == 2 && header[0] == "timestamp" && header[1] == "state") {
    with_time = true;
  } else {
    throw DataError("expected header 'state' or 'timestamp,state'", line_no);
  }

  std::vector<double> values;
  std::vector<double> stamps;
  std::vector<std::size_t> lines;
  while (next_line(in, line, line_no)) {
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw DataError("expected " + std::to_string(header.size()) + " fields", line_no);
    if (with_time) {
      auto ts = parse_number(fields[0]);
      if (!ts) ts = parse_iso8601(fields[0]);
      if (!ts) throw DataError("malformed timestamp", line_no);
      stamps.push_back(*ts);
    }
    const auto v = parse_number(fields.back());
    if (!v) throw DataError("malformed state '" + std::string(fields.back()) + "'", line_no);
    values.push_back(*v);
    lines.push_back(line_no);
  }

  StateSpace space = states.value_or(StateSpace::binary());
  if (!states) {
    const bool has_zero = std::find(values.begin(), values.end(), 0.0) != values.end();
    if (has_zero) space = StateSpace::ternary();
  }
  std::vector<std::size_t> idx;
  idx.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto at = space.index_of(values[i]);
    if (!at) throw DataError("state value outside the state space", lines[i]);
    idx.push_back(*at);
  }
  const auto k = space.size();
  return {StateSequence(std::move(idx), k), std::move(space), std::move(stamps)};
}

LabelledStates load_states(const std::filesystem::path& path,
                           const std::optional<StateSpace>& states) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_states(in, states);
}

void write_states(std::ostream& out, const StateSequence& sequence, const StateSpace& states,
                  const std::vector<double>& timestamps) {
  if (!timestamps.empty() && timestamps.size() != sequence.size())
    throw InvalidArgument("one timestamp per state is required");
  const bool with_time = !timestamps.empty();
  out << (with_time ? "timestamp,state\n" : "state\n");
  char buf[64];
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    if (with_time) {
      auto res = std::to_chars(buf, buf + sizeof buf, timestamps[t]);
      out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ',';
    }
    auto res = std::to_chars(buf, buf + sizeof buf, states[sequence[t]]);
    out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

}  // namespace maxent
