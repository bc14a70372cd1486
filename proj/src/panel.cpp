#include "chronocast/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "chronocast/error.hpp"
#include "chronocast/textio.hpp"

namespace chronocast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_cell(const std::string& text, const std::string& what) {
  if (text.empty()) return kNaN;
  const char* s = text.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') {
    std::string lower;
    for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "nan" || lower == "na" || lower == "null") return kNaN;
    fail(ErrorCode::InvalidArgument, "cannot parse numeric " + what + " value '" + text + "'");
  }
  return v;
}

std::int64_t step_seconds(Frequency f) {
  switch (f) {
    case Frequency::Hourly: return 3600;
    case Frequency::Daily: return 86400;
    case Frequency::Weekly: return 7 * 86400;
    default: return 0;  // calendar-based, no fixed duration
  }
}

// Grid position of `t` at or before it, counting steps from `start`.
std::int64_t floor_steps(const DateTime& start, const DateTime& t, Frequency f) {
  const std::int64_t sec = step_seconds(f);
  if (sec > 0) {
    std::int64_t d = epoch_seconds(t) - epoch_seconds(start);
    return d >= 0 ? d / sec : -((-d + sec - 1) / sec);
  }
  const int per = f == Frequency::Yearly ? 12 : (f == Frequency::Quarterly ? 3 : 1);
  std::int64_t months = (static_cast<std::int64_t>(t.year) * 12 + t.month) -
                        (static_cast<std::int64_t>(start.year) * 12 + start.month);
  std::int64_t k = months >= 0 ? months / per : -((-months + per - 1) / per);
  while (epoch_seconds(add_steps(start, f, k)) > epoch_seconds(t)) --k;
  while (epoch_seconds(add_steps(start, f, k + 1)) <= epoch_seconds(t)) ++k;
  return k;
}

struct RawRow {
  DateTime stamp;
  std::int64_t eps;  // epoch seconds, for sorting and duplicate detection
  std::vector<double> values;  // target followed by dynamic covariates
};

struct RawSeries {
  std::vector<RawRow> rows;
  std::map<std::string, StaticValue> statics;
};

}  // namespace

const Series* TimeSeriesFrame::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &series_[it->second];
}

void TimeSeriesFrame::add(const std::string& id, Series s) {
  if (index_.count(id)) fail(ErrorCode::InvalidArgument, "duplicate series id '" + id + "'");
  index_.emplace(id, series_.size());
  order_.push_back(id);
  series_.push_back(std::move(s));
}

std::size_t TimeSeriesFrame::min_length() const {
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const auto& s : series_) m = std::min(m, s.length());
  return series_.empty() ? 0 : m;
}

InferredFrequency infer_frequency(const std::vector<std::vector<DateTime>>& groups) {
  std::map<std::int64_t, std::size_t> counts;
  for (const auto& g : groups) {
    for (std::size_t i = 1; i < g.size(); ++i)
      counts[epoch_seconds(g[i]) - epoch_seconds(g[i - 1])]++;
  }
  if (counts.empty())
    fail(ErrorCode::SingletonSeries, "no consecutive timestamps to infer a frequency from");
  std::int64_t modal = 0;
  std::size_t best = 0;
  for (const auto& [diff, n] : counts) {
    if (n > best) {  // ties resolve to the smallest difference (map order)
      best = n;
      modal = diff;
    }
  }
  std::optional<Frequency> f;
  if (modal == 3600) {
    f = Frequency::Hourly;
  } else if (modal == 86400) {
    f = Frequency::Daily;
  } else if (modal == 7 * 86400) {
    f = Frequency::Weekly;
  } else if (modal % 86400 == 0) {
    const std::int64_t days = modal / 86400;
    if (days >= 28 && days <= 31) f = Frequency::Monthly;
    else if (days >= 89 && days <= 92) f = Frequency::Quarterly;
    else if (days >= 365 && days <= 366) f = Frequency::Yearly;
  }
  if (!f)
    fail(ErrorCode::AmbiguousFrequency,
         "modal timestamp difference of " + std::to_string(modal) +
             " seconds matches no frequency alias");
  return {*f, seasonality(*f)};
}

TimeSeriesFrame load_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  return load_csv(in, options);
}

TimeSeriesFrame load_csv(std::istream& in, const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::EmptyData, "input has no header row");
  const std::vector<std::string> header = split_csv_line(line);

  const auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int id_col = column(options.id_column);
  const int ts_col = column(options.timestamp_column);
  const int target_col = column(options.target_column);
  const std::pair<std::string, int> required[] = {{options.id_column, id_col},
                                                  {options.timestamp_column, ts_col},
                                                  {options.target_column, target_col}};
  for (const auto& [name, col] : required)
    if (col < 0) fail(ErrorCode::MissingColumn, "column '" + name + "' not found in header");

  const std::set<std::string> known_set(options.known_covariates.begin(),
                                        options.known_covariates.end());
  const std::set<std::string> static_set(options.static_covariates.begin(),
                                         options.static_covariates.end());
  for (const auto& name : options.known_covariates)
    if (column(name) < 0) fail(ErrorCode::MissingColumn, "known covariate '" + name + "' not found");
  for (const auto& name : options.static_covariates)
    if (column(name) < 0) fail(ErrorCode::MissingColumn, "static covariate '" + name + "' not found");

  // Remaining columns are dynamic covariates: known if listed, else past.
  std::vector<std::pair<std::string, int>> dynamic_cols;  // name -> column
  std::vector<std::pair<std::string, int>> static_cols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (c == id_col || c == ts_col || c == target_col) continue;
    if (static_set.count(header[c])) static_cols.emplace_back(header[c], c);
    else dynamic_cols.emplace_back(header[c], c);
  }

  std::vector<std::string> order;
  std::map<std::string, RawSeries> raw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      fail(ErrorCode::InvalidArgument,
           "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
               " fields, got " + std::to_string(fields.size()));
    const std::string& id = fields[id_col];
    auto [it, inserted] = raw.try_emplace(id);
    if (inserted) order.push_back(id);
    RawRow row;
    row.stamp = parse_timestamp(fields[ts_col]);
    row.eps = epoch_seconds(row.stamp);
    row.values.reserve(1 + dynamic_cols.size());
    row.values.push_back(parse_cell(fields[target_col], "target"));
    for (const auto& [name, c] : dynamic_cols) row.values.push_back(parse_cell(fields[c], name));
    it->second.rows.push_back(std::move(row));
    for (const auto& [name, c] : static_cols) {
      StaticValue value;
      const std::string& cell = fields[c];
      char* end = nullptr;
      double num = std::strtod(cell.c_str(), &end);
      if (!cell.empty() && end != cell.c_str() && *end == '\0') value = num;
      else value = cell;
      auto [sit, first] = it->second.statics.try_emplace(name, value);
      if (!first && !(sit->second == value))
        fail(ErrorCode::InvalidArgument,
             "static covariate '" + name + "' varies within series '" + id + "'");
    }
  }
  if (raw.empty()) fail(ErrorCode::EmptyData, "no data rows");

  // Sort within series; reject duplicated (id, timestamp) pairs.
  std::vector<std::vector<DateTime>> groups;
  for (const auto& id : order) {
    auto& rows = raw[id].rows;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.eps < b.eps; });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].eps == rows[i - 1].eps)
        fail(ErrorCode::DuplicateTimestamp,
             "series '" + id + "' repeats timestamp " +
                 format_timestamp(rows[i].stamp, Frequency::Hourly));
    groups.emplace_back();
    for (const auto& r : rows) groups.back().push_back(r.stamp);
  }

  Frequency freq;
  if (options.frequency) {
    freq = *options.frequency;
  } else {
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (groups[g].size() < 2)
        fail(ErrorCode::SingletonSeries,
             "series '" + order[g] + "' has a single row and no frequency was supplied");
    freq = infer_frequency(groups).frequency;
  }

  TimeSeriesFrame frame(freq);
  for (const auto& id : order) {
    auto& rows = raw[id].rows;
    const DateTime start = rows.front().stamp;

    // Place every row on the regular grid anchored at the first stamp.
    const std::size_t width = 1 + dynamic_cols.size();
    std::vector<std::vector<double>> grid;  // [step][column]
    std::int64_t expected = 0;
    for (const auto& r : rows) {
      std::int64_t k = floor_steps(start, r.stamp, freq);
      const bool on_grid = epoch_seconds(add_steps(start, freq, k)) == r.eps;
      if (!options.regularize) {
        if (!on_grid || k != expected)
          fail(ErrorCode::IrregularSpacing,
               "series '" + id + "' is not regular at " + format_timestamp(r.stamp, freq) +
                   " (enable regularization to reindex)");
        ++expected;
      }
      if (k < static_cast<std::int64_t>(grid.size()) && !grid[k].empty())
        fail(ErrorCode::DuplicateTimestamp,
             "series '" + id + "' has two rows on grid step " + std::to_string(k));
      if (k >= static_cast<std::int64_t>(grid.size())) grid.resize(k + 1);
      grid[static_cast<std::size_t>(k)] = r.values;
    }
    // Forward-fill grid holes introduced by regularization.
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (grid[k].empty()) grid[k] = grid[k - 1];  // k=0 always occupied (anchor row)
    }

    // Missing-value policy: drop leading NaN targets, then forward-fill
    // interior ones when enabled, otherwise reject.
    std::size_t first_valid = 0;
    if (options.fill_missing) {
      while (first_valid < grid.size() && std::isnan(grid[first_valid][0])) ++first_valid;
      if (first_valid == grid.size())
        fail(ErrorCode::MissingValue, "series '" + id + "' has no valid target values");
    }
    Series s;
    s.start = add_steps(start, freq, static_cast<std::int64_t>(first_valid));
    s.target.reserve(grid.size() - first_valid);
    for (std::size_t k = first_valid; k < grid.size(); ++k) {
      double y = grid[k][0];
      if (std::isnan(y)) {
        if (!options.fill_missing)
          fail(ErrorCode::MissingValue,
               "series '" + id + "' has a missing target at " +
                   format_timestamp(add_steps(start, freq, static_cast<std::int64_t>(k)), freq) +
                   " (enable missing-value filling to forward-fill)");
        y = s.target.back();  // interior by construction
      }
      s.target.push_back(y);
    }
    for (std::size_t d = 0; d < dynamic_cols.size(); ++d) {
      std::vector<double> col;
      col.reserve(s.target.size());
      for (std::size_t k = first_valid; k < grid.size(); ++k) col.push_back(grid[k][1 + d]);
      // Covariates follow the same policy; interior gaps forward-fill,
      // leading gaps back-fill from the first finite value.
      double last = kNaN;
      for (double v : col)
        if (!std::isnan(v)) { last = v; break; }
      for (auto& v : col) {
        if (std::isnan(v)) {
          if (!options.fill_missing)
            fail(ErrorCode::MissingValue, "series '" + id + "' has a missing value in covariate '" +
                                              dynamic_cols[d].first + "'");
          v = last;
        }
        last = v;
      }
      if (known_set.count(dynamic_cols[d].first)) s.known_covariates[dynamic_cols[d].first] = std::move(col);
      else s.past_covariates[dynamic_cols[d].first] = std::move(col);
    }
    s.static_covariates = raw[id].statics;
    frame.add(id, std::move(s));
  }
  return frame;
}

void write_csv(const TimeSeriesFrame& frame, std::ostream& out) {
  std::vector<std::string> past_names, known_names, static_names;
  if (!frame.empty()) {
    for (const auto& [name, _] : frame.at(0).past_covariates) past_names.push_back(name);
    for (const auto& [name, _] : frame.at(0).known_covariates) known_names.push_back(name);
    for (const auto& [name, _] : frame.at(0).static_covariates) static_names.push_back(name);
  }
  std::vector<std::string> header = {"item_id", "timestamp", "target"};
  header.insert(header.end(), past_names.begin(), past_names.end());
  header.insert(header.end(), known_names.begin(), known_names.end());
  header.insert(header.end(), static_names.begin(), static_names.end());
  out << join_csv_line(header) << '\n';

  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Series& s = frame.at(i);
    for (std::size_t k = 0; k < s.length(); ++k) {
      std::vector<std::string> row = {frame.id(i),
                                      format_timestamp(frame.timestamp(i, k), frame.frequency()),
                                      format_number(s.target[k])};
      for (const auto& name : past_names) row.push_back(format_number(s.past_covariates.at(name)[k]));
      for (const auto& name : known_names) row.push_back(format_number(s.known_covariates.at(name)[k]));
      for (const auto& name : static_names) {
        const StaticValue& v = s.static_covariates.at(name);
        row.push_back(std::holds_alternative<double>(v) ? format_number(std::get<double>(v))
                                                        : std::get<std::string>(v));
      }
      out << join_csv_line(row) << '\n';
    }
  }
}

void write_csv(const TimeSeriesFrame& frame, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  write_csv(frame, out);
}

namespace {

Series head_of(const Series& s, std::size_t n, bool keep_known_tail) {
  Series t;
  t.start = s.start;
  t.target.assign(s.target.begin(), s.target.begin() + n);
  for (const auto& [name, col] : s.past_covariates)
    t.past_covariates[name] = std::vector<double>(col.begin(), col.begin() + std::min(n, col.size()));
  for (const auto& [name, col] : s.known_covariates) {
    // Known-in-advance values stay visible past the truncated target.
    t.known_covariates[name] =
        keep_known_tail ? col : std::vector<double>(col.begin(), col.begin() + std::min(n, col.size()));
  }
  t.static_covariates = s.static_covariates;
  return t;
}

Series slice_of(const Series& s, Frequency f, std::size_t from, std::size_t count) {
  Series t;
  t.start = add_steps(s.start, f, static_cast<std::int64_t>(from));
  t.target.assign(s.target.begin() + from, s.target.begin() + from + count);
  for (const auto& [name, col] : s.past_covariates)
    t.past_covariates[name] = std::vector<double>(col.begin() + from, col.begin() + from + count);
  for (const auto& [name, col] : s.known_covariates)
    t.known_covariates[name] = std::vector<double>(col.begin() + from, col.begin() + from + count);
  t.static_covariates = s.static_covariates;
  return t;
}

}  // namespace

std::pair<TimeSeriesFrame, TimeSeriesFrame> split_last(const TimeSeriesFrame& frame, int horizon) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  std::string offenders;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.at(i).length() <= static_cast<std::size_t>(horizon))
      offenders += (offenders.empty() ? "" : ", ") + frame.id(i);
  }
  if (!offenders.empty())
    fail(ErrorCode::SeriesTooShort,
         "series shorter than horizon+1: " + offenders);

  TimeSeriesFrame train(frame.frequency()), holdout(frame.frequency());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Series& s = frame.at(i);
    const std::size_t n = s.length() - static_cast<std::size_t>(horizon);
    train.add(frame.id(i), head_of(s, n, /*keep_known_tail=*/true));
    holdout.add(frame.id(i), slice_of(s, frame.frequency(), n, horizon));
  }
  return {std::move(train), std::move(holdout)};
}

std::vector<BacktestWindow> slice_windows(const TimeSeriesFrame& frame, int horizon,
                                          int num_windows) {
  if (num_windows < 1) fail(ErrorCode::InvalidArgument, "num_windows must be >= 1");
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  std::vector<BacktestWindow> windows;
  for (int k = 1; k <= num_windows; ++k) {
    BacktestWindow w;
    w.index = k;
    w.train = TimeSeriesFrame(frame.frequency());
    w.validation = TimeSeriesFrame(frame.frequency());
    for (std::size_t i = 0; i < frame.size(); ++i) {
      const Series& s = frame.at(i);
      const std::size_t need = static_cast<std::size_t>(k) * horizon;
      if (s.length() <= need) continue;  // too short for this window only
      const std::size_t n = s.length() - need;
      w.train.add(frame.id(i), head_of(s, n, /*keep_known_tail=*/true));
      w.validation.add(frame.id(i), slice_of(s, frame.frequency(), n, horizon));
    }
    if (!w.train.empty()) windows.push_back(std::move(w));
  }
  if (windows.empty())
    fail(ErrorCode::NoValidWindows, "no validation window retains any series");
  return windows;
}

}  // namespace chronocast
