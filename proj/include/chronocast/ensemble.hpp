#pragma once

#include <map>
#include <string>
#include <vector>

#include "chronocast/forecast.hpp"
#include "chronocast/metrics.hpp"
#include "chronocast/panel.hpp"

namespace chronocast {

/// One validation window: the slice a model was fit on (history, used for
/// MASE scaling) and the held-out actuals its forecasts are scored against.
struct EvalWindow {
  TimeSeriesFrame history;
  TimeSeriesFrame actuals;
};

/// Metric of one forecast on one window.
double window_score(EvalMetric metric, const QuantileLevels& levels, const EvalWindow& window,
                    const ForecastFrame& forecast);

/// Sparse convex combination over trained models.
struct EnsembleWeights {
  std::map<std::string, double> weights;  // nonzero entries only
  int step_count = 0;                     // selection steps run
  double score = 0.0;                     // window-averaged metric of the returned bag

  double weight_of(const std::string& name) const {
    auto it = weights.find(name);
    return it == weights.end() ? 0.0 : it->second;
  }
};

struct MemberOof {
  std::string name;
  std::vector<ForecastFrame> windows;  // aligned with the EvalWindow list
};

/// Greedy forward selection with replacement over out-of-fold forecasts.
/// Each step adds the member minimizing the window-averaged metric of the
/// bag average (ties break by candidate order); the best iterate seen is
/// returned, so the result never scores worse than the best single member.
EnsembleWeights forward_select(const std::vector<MemberOof>& members,
                               const std::vector<EvalWindow>& windows, EvalMetric metric,
                               const QuantileLevels& levels, int steps = 100);

/// Vincentized combination: mean and each quantile column are the
/// weight-weighted averages of the member columns.
ForecastFrame combine(const EnsembleWeights& weights,
                      const std::map<std::string, ForecastFrame>& forecasts);

}  // namespace chronocast
