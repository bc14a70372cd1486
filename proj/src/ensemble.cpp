#include "chronocast/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chronocast/error.hpp"

namespace chronocast {

double window_score(EvalMetric metric, const QuantileLevels& levels, const EvalWindow& window,
                    const ForecastFrame& forecast) {
  return metric_score(metric, levels, window.actuals, forecast, window.history,
                      window.history.season());
}

namespace {

void add_into(ForecastFrame& acc, const ForecastFrame& part, double factor) {
  for (std::size_t b = 0; b < acc.blocks.size(); ++b) {
    auto& dst = acc.blocks[b];
    const auto& src = part.blocks[b];
    for (std::size_t h = 0; h < dst.mean.size(); ++h) dst.mean[h] += factor * src.mean[h];
    for (std::size_t li = 0; li < dst.quantiles.size(); ++li)
      for (std::size_t h = 0; h < dst.quantiles[li].size(); ++h)
        dst.quantiles[li][h] += factor * src.quantiles[li][h];
  }
}

ForecastFrame zeros_like(const ForecastFrame& shape) {
  ForecastFrame z = shape;
  for (auto& b : z.blocks) {
    std::fill(b.mean.begin(), b.mean.end(), 0.0);
    for (auto& q : b.quantiles) std::fill(q.begin(), q.end(), 0.0);
  }
  return z;
}

}  // namespace

EnsembleWeights forward_select(const std::vector<MemberOof>& members,
                               const std::vector<EvalWindow>& windows, EvalMetric metric,
                               const QuantileLevels& levels, int steps) {
  if (members.empty())
    fail(ErrorCode::NoSuccessfulModels, "forward selection needs at least one candidate");
  if (steps < 1) fail(ErrorCode::InvalidArgument, "steps must be >= 1");
  for (const auto& m : members) {
    if (m.windows.size() != windows.size())
      fail(ErrorCode::IndexMismatch, "member '" + m.name + "' covers " +
                                         std::to_string(m.windows.size()) + " of " +
                                         std::to_string(windows.size()) + " windows");
    for (std::size_t w = 0; w < windows.size(); ++w)
      if (!m.windows[w].index_equals(members[0].windows[w]))
        fail(ErrorCode::IndexMismatch,
             "member '" + m.name + "' is misaligned on window " + std::to_string(w + 1));
  }

  // Running cell-wise sum of the selected members (with multiplicity).
  std::vector<ForecastFrame> bag_sum;
  bag_sum.reserve(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w)
    bag_sum.push_back(zeros_like(members[0].windows[w]));

  std::vector<int> counts(members.size(), 0);
  std::vector<int> best_counts;
  int best_iteration = 0;
  double best_score = std::numeric_limits<double>::infinity();

  std::vector<ForecastFrame> trial = bag_sum;
  for (int iter = 1; iter <= steps; ++iter) {
    int chosen = -1;
    double chosen_score = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < members.size(); ++m) {
      double total = 0.0;
      for (std::size_t w = 0; w < windows.size(); ++w) {
        trial[w] = bag_sum[w];
        add_into(trial[w], members[m].windows[w], 1.0);
        for (auto& b : trial[w].blocks) {
          const double inv = 1.0 / iter;
          for (auto& v : b.mean) v *= inv;
          for (auto& q : b.quantiles)
            for (auto& v : q) v *= inv;
        }
        total += window_score(metric, levels, windows[w], trial[w]);
      }
      const double score = total / static_cast<double>(windows.size());
      if (score < chosen_score) {  // strict: ties keep the earlier candidate
        chosen_score = score;
        chosen = static_cast<int>(m);
      }
    }
    counts[chosen] += 1;
    for (std::size_t w = 0; w < windows.size(); ++w)
      add_into(bag_sum[w], members[chosen].windows[w], 1.0);
    if (chosen_score < best_score) {
      best_score = chosen_score;
      best_counts = counts;
      best_iteration = iter;
    }
  }

  EnsembleWeights result;
  result.step_count = steps;
  result.score = best_score;
  for (std::size_t m = 0; m < members.size(); ++m)
    if (best_counts[m] > 0)
      result.weights[members[m].name] =
          static_cast<double>(best_counts[m]) / static_cast<double>(best_iteration);
  return result;
}

ForecastFrame combine(const EnsembleWeights& weights,
                      const std::map<std::string, ForecastFrame>& forecasts) {
  if (weights.weights.empty())
    fail(ErrorCode::NoSuccessfulModels, "ensemble has no supported members");
  const ForecastFrame* shape = nullptr;
  for (const auto& [name, w] : weights.weights) {
    auto it = forecasts.find(name);
    if (it == forecasts.end())
      fail(ErrorCode::MissingMemberForecast, "no forecast supplied for member '" + name + "'");
    if (!shape) shape = &it->second;
    else if (!shape->index_equals(it->second))
      fail(ErrorCode::IndexMismatch, "member '" + name + "' forecast index differs");
  }
  ForecastFrame out = zeros_like(*shape);
  for (const auto& [name, w] : weights.weights) add_into(out, forecasts.at(name), w);
  return out;
}

}  // namespace chronocast
