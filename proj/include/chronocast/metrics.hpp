#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronocast/forecast.hpp"
#include "chronocast/panel.hpp"

namespace chronocast {

/// Forecast accuracy metrics. Lower is better for both.
enum class EvalMetric { MASE, WQL };

std::optional<EvalMetric> metric_from_string(const std::string& name);  // case-insensitive
const char* metric_name(EvalMetric m);

/// Scaled absolute error of one series: mean |y - yhat| over the holdout,
/// divided by the mean in-sample seasonal-naive error of the history.
/// Empty when the scaling denominator is zero (constant-in-season history).
std::optional<double> mase_series(std::span<const double> holdout,
                                  std::span<const double> forecast,
                                  std::span<const double> history, int season);

/// Mean of per-series scaled errors; series with zero denominator are
/// excluded. The point forecast is the median (0.5-quantile) column.
double mase(const TimeSeriesFrame& holdout, const ForecastFrame& forecast,
            const TimeSeriesFrame& history, int season);

/// Weighted quantile loss at one level: one global ratio with numerator and
/// denominator both summed over every series and horizon step.
double wql_at(double level, const TimeSeriesFrame& holdout, const ForecastFrame& forecast);

/// Arithmetic mean of wql_at over the configured levels.
double mean_wql(const QuantileLevels& levels, const TimeSeriesFrame& holdout,
                const ForecastFrame& forecast);

/// Min-max rescaling of per-method errors on one dataset into [0, 1].
/// NaN entries pass through; at least two finite scores are required.
/// All-equal finite scores map to zero.
std::vector<double> rescale_errors(const std::vector<double>& scores);

/// Dispatch on the metric kind. `history` supplies MASE scaling series.
double metric_score(EvalMetric metric, const QuantileLevels& levels,
                    const TimeSeriesFrame& holdout, const ForecastFrame& forecast,
                    const TimeSeriesFrame& history, int season);

}  // namespace chronocast
