#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chronocast/backtest.hpp"

namespace chronocast {

enum class Preset { Fast, Medium, Best };

std::optional<Preset> preset_from_string(const std::string& name);
const char* preset_name(Preset p);

struct TaskConfig {
  int prediction_length = 1;
  QuantileLevels quantile_levels;
  EvalMetric eval_metric = EvalMetric::WQL;
  double time_limit_seconds = 3600.0;
  Preset preset = Preset::Medium;
  std::vector<std::string> known_covariate_names;
  int num_windows = 1;
  std::int64_t seed = 0;
};

struct LeaderboardRow {
  std::string model;
  double score = std::numeric_limits<double>::quiet_NaN();  // NaN unless status "ok"
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  std::string status = "ok";
  std::string detail;
};

/// Everything needed to reproduce predictions: task, refit member states,
/// ensemble weights, and the validation report behind the leaderboard.
struct PredictorArtifact {
  int format_version = 1;
  TaskConfig task;
  Frequency frequency = Frequency::Daily;
  int season = 1;
  std::vector<std::string> past_covariate_names;
  std::vector<std::string> static_covariate_names;
  EnsembleWeights weights;
  double ensemble_fit_seconds = 0.0;
  std::vector<LeaderboardRow> validation;  // per-candidate rows, ensemble excluded
  std::vector<MemberModel> members;        // supported members, refit on all data
};

/// Fixed-order candidate list for a preset. fast = {SeasonalNaive, Naive,
/// Theta}; medium adds {ETS, GlobalLinear-Recursive}; best adds
/// {GlobalLinear-Direct, ETS-Damped}.
std::vector<CandidateSpec> preset_candidates(const TaskConfig& task,
                                             const TimeSeriesFrame& train);

PredictorArtifact fit(const TaskConfig& task, const TimeSeriesFrame& train);
PredictorArtifact fit(const TaskConfig& task, const TimeSeriesFrame& train,
                      const std::vector<CandidateSpec>& candidates);

/// Ensemble forecast for the frame's series (they need not match training).
ForecastFrame predict(const PredictorArtifact& artifact, const TimeSeriesFrame& frame);

/// Member rows plus the ensemble row, ascending by validation score;
/// unscored rows sink to the bottom.
std::vector<LeaderboardRow> leaderboard(const PredictorArtifact& artifact);

/// Splits off the last H steps, predicts them from the remainder, scores.
double evaluate(const PredictorArtifact& artifact, const TimeSeriesFrame& data,
                std::optional<EvalMetric> metric = std::nullopt);

void save_artifact(const PredictorArtifact& artifact, const std::string& dir);
PredictorArtifact load_artifact(const std::string& dir);

/// Returns a copy of `frame` whose known covariates are extended with the
/// future rows in `csv_path` (columns item_id,timestamp,<name>,...). Rows
/// must continue each series' grid without gaps.
TimeSeriesFrame merge_known_covariates(const TimeSeriesFrame& frame,
                                       const std::string& csv_path);

/// Long-format forecast table: item_id,timestamp,mean,<level labels...>.
void write_forecast_csv(const ForecastFrame& forecast, std::ostream& out);
void write_forecast_csv(const ForecastFrame& forecast, const std::string& path);

}  // namespace chronocast
