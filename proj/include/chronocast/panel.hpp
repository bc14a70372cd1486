#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "chronocast/timegrid.hpp"

namespace chronocast {

/// Static (per-series) covariate value: categorical or real.
using StaticValue = std::variant<double, std::string>;

/// One univariate series on a regular grid. Timestamps are implicit:
/// step i lives at add_steps(start, frequency, i).
struct Series {
  DateTime start;
  std::vector<double> target;
  // Covariates keyed by name (sorted). Past covariates align 1:1 with the
  // target; known covariates may extend past it (values known in advance).
  std::map<std::string, std::vector<double>> past_covariates;
  std::map<std::string, std::vector<double>> known_covariates;
  std::map<std::string, StaticValue> static_covariates;

  std::size_t length() const { return target.size(); }
};

/// Panel of univariate series sharing one frequency. Immutable by
/// convention after construction; series-id order is insertion order.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame() = default;
  explicit TimeSeriesFrame(Frequency f) : frequency_(f) {}

  Frequency frequency() const { return frequency_; }
  void set_frequency(Frequency f) { frequency_ = f; }
  int season() const { return seasonality(frequency_); }

  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  const std::vector<std::string>& ids() const { return order_; }
  const std::string& id(std::size_t i) const { return order_[i]; }

  const Series& at(std::size_t i) const { return series_[i]; }
  Series& at(std::size_t i) { return series_[i]; }
  const Series* find(const std::string& id) const;

  void add(const std::string& id, Series s);

  DateTime timestamp(std::size_t i, std::size_t step) const {
    return add_steps(series_[i].start, frequency_, static_cast<std::int64_t>(step));
  }
  /// Timestamp one past the last observation (start of any forecast).
  DateTime forecast_start(std::size_t i) const {
    return add_steps(series_[i].start, frequency_, static_cast<std::int64_t>(series_[i].length()));
  }

  std::size_t min_length() const;

 private:
  Frequency frequency_ = Frequency::Daily;
  std::vector<std::string> order_;
  std::vector<Series> series_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Column mapping and ingestion policy for load_csv.
struct LoadOptions {
  std::string id_column = "item_id";
  std::string timestamp_column = "timestamp";
  std::string target_column = "target";
  // Extra columns default to past covariates unless named here.
  std::vector<std::string> known_covariates;
  std::vector<std::string> static_covariates;
  std::optional<Frequency> frequency;  // skip inference when set
  bool fill_missing = false;           // forward-fill interior NaN targets, drop leading
  bool regularize = false;             // reindex irregular stamps to the inferred grid
};

TimeSeriesFrame load_csv(const std::string& path, const LoadOptions& options = {});
TimeSeriesFrame load_csv(std::istream& in, const LoadOptions& options = {});

/// Long-format writer; floats at 6 significant digits. Columns: id,
/// timestamp, target, then covariates sorted by name.
void write_csv(const TimeSeriesFrame& frame, std::ostream& out);
void write_csv(const TimeSeriesFrame& frame, const std::string& path);

struct InferredFrequency {
  Frequency frequency;
  int season;
};

/// Modal consecutive timestamp difference across all series, snapped to a
/// calendar alias. Groups must each hold >= 2 sorted timestamps.
InferredFrequency infer_frequency(const std::vector<std::vector<DateTime>>& groups);

/// Splits off the final `horizon` steps of every series.
std::pair<TimeSeriesFrame, TimeSeriesFrame> split_last(const TimeSeriesFrame& frame,
                                                       int horizon);

struct BacktestWindow {
  int index = 1;  // 1 = most recent
  TimeSeriesFrame train;
  TimeSeriesFrame validation;
};

/// Expanding-origin validation windows: window k trains on the first
/// T_i - k*h steps and validates on the next h. Series too short for a
/// window are excluded from that window only.
std::vector<BacktestWindow> slice_windows(const TimeSeriesFrame& frame, int horizon,
                                          int num_windows);

}  // namespace chronocast
