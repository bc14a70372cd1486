#include "chronocast/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "chronocast/error.hpp"

namespace chronocast {

std::optional<EvalMetric> metric_from_string(const std::string& name) {
  std::string upper;
  for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "MASE") return EvalMetric::MASE;
  if (upper == "WQL") return EvalMetric::WQL;
  return std::nullopt;
}

const char* metric_name(EvalMetric m) { return m == EvalMetric::MASE ? "MASE" : "WQL"; }

std::optional<double> mase_series(std::span<const double> holdout,
                                  std::span<const double> forecast,
                                  std::span<const double> history, int season) {
  if (holdout.size() != forecast.size())
    fail(ErrorCode::LengthMismatch, "holdout and forecast lengths differ");
  if (history.size() <= static_cast<std::size_t>(season))
    fail(ErrorCode::LengthMismatch, "history must be longer than the seasonal period");
  double denom = 0.0;
  const std::size_t m = history.size() - static_cast<std::size_t>(season);
  for (std::size_t t = 0; t < m; ++t) denom += std::abs(history[t + season] - history[t]);
  denom /= static_cast<double>(m);
  if (denom == 0.0) return std::nullopt;
  double num = 0.0;
  for (std::size_t h = 0; h < holdout.size(); ++h) num += std::abs(holdout[h] - forecast[h]);
  num /= static_cast<double>(holdout.size());
  return num / denom;
}

namespace {

const std::vector<double>& median_column(const ForecastFrame::Block& block,
                                         const ForecastFrame& forecast) {
  for (std::size_t li = 0; li < forecast.levels.size(); ++li)
    if (forecast.levels[li] == 0.5) return block.quantiles[li];
  fail(ErrorCode::MissingLevel, "MASE needs the 0.5 quantile as its point forecast");
}

}  // namespace

double mase(const TimeSeriesFrame& holdout, const ForecastFrame& forecast,
            const TimeSeriesFrame& history, int season) {
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    const ForecastFrame::Block* block = forecast.find(holdout.id(i));
    const Series* hist = history.find(holdout.id(i));
    if (!block || !hist)
      fail(ErrorCode::IndexMismatch, "series '" + holdout.id(i) + "' missing from forecast or history");
    auto score = mase_series(holdout.at(i).target, median_column(*block, forecast),
                             hist->target, season);
    if (score) {
      total += *score;
      ++used;
    }
  }
  if (used == 0)
    fail(ErrorCode::AllDenominatorsZero,
         "every series has a zero seasonal-difference denominator");
  return total / static_cast<double>(used);
}

double wql_at(double level, const TimeSeriesFrame& holdout, const ForecastFrame& forecast) {
  double num = 0.0, denom = 0.0;
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    const ForecastFrame::Block* block = forecast.find(holdout.id(i));
    if (!block) fail(ErrorCode::IndexMismatch, "series '" + holdout.id(i) + "' missing from forecast");
    int li = -1;
    for (std::size_t l = 0; l < forecast.levels.size(); ++l)
      if (forecast.levels[l] == level) li = static_cast<int>(l);
    if (li < 0) fail(ErrorCode::MissingLevel, "no forecast at level " + level_label(level));
    const auto& actual = holdout.at(i).target;
    const auto& pred = block->quantiles[li];
    if (actual.size() != pred.size())
      fail(ErrorCode::LengthMismatch, "forecast length differs from holdout");
    for (std::size_t h = 0; h < actual.size(); ++h) {
      num += level * std::max(actual[h] - pred[h], 0.0) +
             (1.0 - level) * std::max(pred[h] - actual[h], 0.0);
      denom += std::abs(actual[h]);
    }
  }
  if (denom == 0.0) fail(ErrorCode::ZeroDenominator, "all holdout values are zero");
  return 2.0 * num / denom;
}

double mean_wql(const QuantileLevels& levels, const TimeSeriesFrame& holdout,
                const ForecastFrame& forecast) {
  double total = 0.0;
  for (double q : levels.values()) total += wql_at(q, holdout, forecast);
  return total / static_cast<double>(levels.size());
}

std::vector<double> rescale_errors(const std::vector<double>& scores) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t finite = 0;
  for (double s : scores) {
    if (std::isfinite(s)) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      ++finite;
    }
  }
  if (finite < 2)
    fail(ErrorCode::FewerThanTwoScores, "need at least two finite scores to rescale");
  std::vector<double> out(scores.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) continue;
    out[i] = hi == lo ? 0.0 : (scores[i] - lo) / (hi - lo);
  }
  return out;
}

double metric_score(EvalMetric metric, const QuantileLevels& levels,
                    const TimeSeriesFrame& holdout, const ForecastFrame& forecast,
                    const TimeSeriesFrame& history, int season) {
  if (metric == EvalMetric::MASE) return mase(holdout, forecast, history, season);
  return mean_wql(levels, holdout, forecast);
}

}  // namespace chronocast
