#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chronocast/budget.hpp"
#include "chronocast/forecast.hpp"
#include "chronocast/panel.hpp"

namespace chronocast {

enum class GlobalStrategy { Recursive, Direct };

const char* global_strategy_name(GlobalStrategy s);

struct QrHyperParams {
  int epochs = 600;           // full-batch subgradient epochs per quantile head
  double learning_rate = 0.3; // base step; decays as 1/sqrt(epoch)
  double l2 = 1e-4;
  std::uint64_t seed = 0;     // recorded for reproducibility bookkeeping
};

struct GlobalModelSpec {
  GlobalStrategy strategy = GlobalStrategy::Recursive;
  std::vector<int> lags;
  QrHyperParams hp;

  /// {1..min(12, 2s)} + {s, 2s}, deduplicated, with lags that cannot be
  /// populated by the shortest series removed.
  static std::vector<int> default_lags(int season, std::size_t min_series_length);
};

/// Column layout shared by fit and predict. Target lags come first, then
/// lagged past covariates, contemporaneous known covariates, a calendar
/// one-hot block, one-hot static categories (order fixed by first
/// appearance), and numeric statics.
struct FeatureSchema {
  std::vector<int> lags;  // sorted ascending
  std::vector<std::string> past_covariates;
  std::vector<std::string> known_covariates;
  int calendar_cardinality = 0;  // 12 for M/Q, 7 for D, 24 for H, else 0
  std::vector<std::pair<std::string, std::vector<std::string>>> static_categories;
  std::vector<std::string> static_numeric;

  std::size_t columns() const;
  int max_lag() const { return lags.empty() ? 0 : lags.back(); }
};

FeatureSchema build_schema(const TimeSeriesFrame& frame, const std::vector<int>& lags);

struct FeatureMatrix {
  FeatureSchema schema;
  std::size_t rows = 0;
  std::vector<double> x;             // row-major, rows x schema.columns()
  std::vector<double> y;             // aligned targets
  std::vector<int> step;             // horizon step of each row (1 for Recursive)
  std::vector<std::size_t> series;   // originating series index

  const double* row(std::size_t r) const { return x.data() + r * schema.columns(); }
};

/// Tabular conversion. Recursive pairs features at an anchor with the next
/// value; Direct emits one row per (anchor, step k<=horizon). No row ever
/// reads a target at or past its own target time.
FeatureMatrix build_features(const TimeSeriesFrame& frame, const FeatureSchema& schema,
                             int horizon, GlobalStrategy strategy);

struct LinearHead {
  std::vector<double> coef;  // in standardized feature space
  double intercept = 0.0;
};

struct TrainedGlobalModel {
  GlobalModelSpec spec;
  FeatureSchema schema;
  Frequency frequency = Frequency::Daily;
  int horizon = 1;
  std::vector<double> levels;

  std::vector<double> feature_mean, feature_scale;  // per column
  double target_mean = 0.0, target_scale = 1.0;
  // heads[g][0] is the squared-loss mean head of step group g;
  // heads[g][1 + li] the pinball head for level li. Recursive models have
  // one group; Direct models one per horizon step.
  std::vector<std::vector<LinearHead>> heads;
  double final_loss = 0.0;
  bool fitted = false;
};

TrainedGlobalModel fit_global(const GlobalModelSpec& spec, const TimeSeriesFrame& train,
                              int horizon, const QuantileLevels& levels,
                              const Budget& budget = {});

/// Works for any frame whose series carry at least max(lag) observations,
/// including series never seen at fit time.
ForecastFrame predict_global(const TrainedGlobalModel& model, const TimeSeriesFrame& frame,
                             const Budget& budget = {});

}  // namespace chronocast
