#include "chronocast/backtest.hpp"

#include <chrono>
#include <cmath>

namespace chronocast {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ForecastFrame forecast_fitted(const MemberModel& member, const TimeSeriesFrame& train,
                              int horizon, const QuantileLevels& levels, const Budget& budget) {
  if (const auto* local = std::get_if<TrainedLocalModel>(&member.state))
    return predict_local(*local, horizon, levels);
  return predict_global(std::get<TrainedGlobalModel>(member.state), train, budget);
}

ForecastFrame forecast_frame(const MemberModel& member, const TimeSeriesFrame& frame,
                             int horizon, const QuantileLevels& levels, const Budget& budget) {
  if (const auto* local = std::get_if<TrainedLocalModel>(&member.state)) {
    const TrainedLocalModel refit = fit_local(local->spec, frame, budget);
    return predict_local(refit, horizon, levels);
  }
  return predict_global(std::get<TrainedGlobalModel>(member.state), frame, budget);
}

CandidateSpec local_candidate(std::string name, LocalModelSpec spec) {
  CandidateSpec c;
  c.name = name;
  c.fit = [name, spec](const TimeSeriesFrame& train, int, const QuantileLevels&,
                       const Budget& budget) {
    return MemberModel{name, fit_local(spec, train, budget)};
  };
  return c;
}

CandidateSpec global_candidate(std::string name, GlobalModelSpec spec) {
  CandidateSpec c;
  c.name = name;
  c.fit = [name, spec](const TimeSeriesFrame& train, int horizon, const QuantileLevels& levels,
                       const Budget& budget) {
    return MemberModel{name, fit_global(spec, train, horizon, levels, budget)};
  };
  return c;
}

const char* candidate_status_name(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::Ok: return "ok";
    case CandidateStatus::Failed: return "failed";
    case CandidateStatus::Skipped: return "skipped";
  }
  return "?";
}

std::vector<MemberOof> ValidationReport::successful_oof() const {
  std::vector<MemberOof> out;
  for (const auto& c : candidates)
    if (c.status == CandidateStatus::Ok) out.push_back({c.name, c.oof});
  return out;
}

const CandidateOutcome* ValidationReport::find(const std::string& name) const {
  for (const auto& c : candidates)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport evaluate_candidates(const std::vector<CandidateSpec>& candidates,
                                     const TimeSeriesFrame& frame, int horizon,
                                     int num_windows, EvalMetric metric,
                                     const QuantileLevels& levels, const Budget& budget) {
  if (candidates.empty())
    fail(ErrorCode::InvalidArgument, "need at least one candidate model");

  ValidationReport report;
  for (auto& w : slice_windows(frame, horizon, num_windows))
    report.windows.push_back({std::move(w.train), std::move(w.validation)});

  const int total = static_cast<int>(candidates.size());
  for (int ci = 0; ci < total; ++ci) {
    CandidateOutcome outcome;
    outcome.name = candidates[ci].name;

    // Even split of the remaining time; the leading candidate (the cheap
    // seasonal-naive baseline by convention) runs uncapped.
    Budget candidate_budget;
    if (ci > 0 && budget.limited()) {
      const double cap = allocate_budget(budget.remaining_seconds(), total - ci);
      if (cap <= 0.0) {
        outcome.status = CandidateStatus::Skipped;
        outcome.detail = "no budget remaining";
        report.candidates.push_back(std::move(outcome));
        continue;
      }
      candidate_budget = Budget(cap);
    }

    try {
      double score_total = 0.0;
      std::vector<ForecastFrame> oof;
      double fit_seconds = 0.0, predict_seconds = 0.0;
      for (const EvalWindow& window : report.windows) {
        const auto t0 = std::chrono::steady_clock::now();
        MemberModel model =
            candidates[ci].fit(window.history, horizon, levels, candidate_budget);
        const auto t1 = std::chrono::steady_clock::now();
        fit_seconds += std::chrono::duration<double>(t1 - t0).count();
        ForecastFrame fc = forecast_fitted(model, window.history, horizon, levels,
                                           candidate_budget);
        predict_seconds += seconds_since(t1);
        score_total += window_score(metric, levels, window, fc);
        oof.push_back(std::move(fc));
      }
      outcome.status = CandidateStatus::Ok;
      outcome.score = score_total / static_cast<double>(report.windows.size());
      outcome.fit_seconds = fit_seconds;
      outcome.predict_seconds = predict_seconds;
      outcome.oof = std::move(oof);
      if (!std::isfinite(outcome.score)) {
        outcome.status = CandidateStatus::Failed;
        outcome.detail = "non-finite validation score";
        outcome.score = std::numeric_limits<double>::quiet_NaN();
        outcome.oof.clear();
      }
    } catch (const BudgetExceeded&) {
      outcome.status = CandidateStatus::Skipped;
      outcome.detail = "time budget exceeded";
      outcome.oof.clear();
    } catch (const std::exception& e) {
      outcome.status = CandidateStatus::Failed;
      outcome.detail = e.what();
      outcome.oof.clear();
    }
    report.candidates.push_back(std::move(outcome));
  }

  bool any_ok = false;
  for (const auto& c : report.candidates) any_ok = any_ok || c.status == CandidateStatus::Ok;
  if (!any_ok)
    fail(ErrorCode::AllModelsFailed, "no candidate model trained successfully");
  return report;
}

}  // namespace chronocast
