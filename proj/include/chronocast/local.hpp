#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chronocast/budget.hpp"
#include "chronocast/forecast.hpp"
#include "chronocast/panel.hpp"

namespace chronocast {

enum class LocalKind { Naive, SeasonalNaive, Ets, Theta };

const char* local_kind_name(LocalKind k);

/// One ETS candidate: additive error, optional additive (possibly damped)
/// trend, optional additive seasonality.
struct EtsComponents {
  bool trend = false;
  bool damped = false;
  bool seasonal = false;

  bool operator==(const EtsComponents&) const = default;
};

struct LocalModelSpec {
  LocalKind kind = LocalKind::Naive;
  // ETS only: candidate component sets; seasonal candidates are dropped
  // per series when the series is too short for them.
  std::vector<EtsComponents> ets_grid;
  bool damping = false;  // include damped-trend candidates in default grids
  // Pins the level smoothing weight (used by structural-equivalence tests).
  std::optional<double> fixed_alpha;

  static LocalModelSpec naive() { return {LocalKind::Naive, {}, false, {}}; }
  static LocalModelSpec seasonal_naive() { return {LocalKind::SeasonalNaive, {}, false, {}}; }
  static LocalModelSpec theta() { return {LocalKind::Theta, {}, false, {}}; }
  static LocalModelSpec ets(bool damping = false);
};

// Per-series fitted states, one alternative per family.

struct NaiveState {
  double last = 0.0;
};

struct SeasonalNaiveState {
  int season_used = 1;                // 1 when the seasonal fallback fired
  std::vector<double> last_season;    // season_used values, oldest first
};

struct EtsState {
  EtsComponents components;
  double alpha = 0.0, beta = 0.0, gamma = 0.0, phi = 1.0;
  double level = 0.0, trend = 0.0;
  std::vector<double> season;  // circular, index (t % s) holds s_{t-s+...}
  int steps_seen = 0;          // observations consumed (positions the buffer)
  double aicc = 0.0;
};

struct ThetaState {
  double intercept = 0.0, slope = 0.0;  // OLS line of the deseasonalized series
  double ses_level = 0.0, ses_alpha = 1.0;
  int length = 0;
  std::vector<double> seasonal_index;  // multiplicative; empty when unused
};

struct LocalSeriesState {
  double sigma = 0.0;  // std of one-step in-sample residuals
  std::variant<NaiveState, SeasonalNaiveState, EtsState, ThetaState> params;
};

struct TrainedLocalModel {
  LocalModelSpec spec;
  Frequency frequency = Frequency::Daily;
  int season = 1;
  std::vector<std::string> ids;
  std::vector<DateTime> forecast_starts;
  std::vector<LocalSeriesState> states;

  bool fitted() const { return !states.empty() || ids.empty(); }
};

/// Fits one state per series, independently and deterministically; safe to
/// parallelize internally. Budget is checked between series.
TrainedLocalModel fit_local(const LocalModelSpec& spec, const TimeSeriesFrame& train,
                            const Budget& budget = {});

ForecastFrame predict_local(const TrainedLocalModel& model, int horizon,
                            const QuantileLevels& levels);

}  // namespace chronocast
