#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chronocast/budget.hpp"
#include "chronocast/ensemble.hpp"
#include "chronocast/global.hpp"
#include "chronocast/local.hpp"

namespace chronocast {

/// One trained candidate. Local members keep their per-series states but
/// are refit when asked to forecast series other than those they saw.
struct MemberModel {
  std::string name;
  std::variant<TrainedLocalModel, TrainedGlobalModel> state;
};

/// Continuation forecast for the exact series the member was fit on.
ForecastFrame forecast_fitted(const MemberModel& member, const TimeSeriesFrame& train,
                              int horizon, const QuantileLevels& levels,
                              const Budget& budget = {});

/// Forecast for an arbitrary frame (possibly unseen series): local members
/// are re-fit on the provided series, global members predict directly.
ForecastFrame forecast_frame(const MemberModel& member, const TimeSeriesFrame& frame,
                             int horizon, const QuantileLevels& levels,
                             const Budget& budget = {});

/// A nameable way to train one candidate; the ordered candidate list is the
/// unit the backtester iterates over.
struct CandidateSpec {
  std::string name;
  std::function<MemberModel(const TimeSeriesFrame& train, int horizon,
                            const QuantileLevels& levels, const Budget& budget)>
      fit;
};

CandidateSpec local_candidate(std::string name, LocalModelSpec spec);
CandidateSpec global_candidate(std::string name, GlobalModelSpec spec);

enum class CandidateStatus { Ok, Failed, Skipped };

const char* candidate_status_name(CandidateStatus s);

struct CandidateOutcome {
  std::string name;
  CandidateStatus status = CandidateStatus::Skipped;
  std::string detail;  // failure reason, empty otherwise
  double score = std::numeric_limits<double>::quiet_NaN();
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  std::vector<ForecastFrame> oof;  // out-of-fold forecasts, one per window
};

struct ValidationReport {
  std::vector<CandidateOutcome> candidates;
  std::vector<EvalWindow> windows;

  std::vector<MemberOof> successful_oof() const;
  const CandidateOutcome* find(const std::string& name) const;
};

/// Fits and scores every candidate over the validation windows. Candidates
/// run sequentially under an even split of the remaining budget; the first
/// one is always attempted regardless of the cap. An exception in one
/// candidate marks it failed and evaluation continues; a budget checkpoint
/// firing marks it skipped.
ValidationReport evaluate_candidates(const std::vector<CandidateSpec>& candidates,
                                     const TimeSeriesFrame& frame, int horizon,
                                     int num_windows, EvalMetric metric,
                                     const QuantileLevels& levels,
                                     const Budget& budget = {});

}  // namespace chronocast
