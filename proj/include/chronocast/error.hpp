#pragma once

#include <stdexcept>
#include <string>

namespace chronocast {

enum class ErrorCode {
  // ingestion
  MissingColumn,
  UnparseableTimestamp,
  DuplicateTimestamp,
  IrregularSpacing,
  EmptyData,
  MissingValue,
  AmbiguousFrequency,
  SingletonSeries,
  SeriesTooShort,
  NoValidWindows,
  // metrics
  AllDenominatorsZero,
  LengthMismatch,
  ZeroDenominator,
  MissingLevel,
  FewerThanTwoScores,
  // models
  NotFitted,
  LagExceedsLength,
  DegenerateFeatures,
  NonFiniteLoss,
  MissingKnownCovariates,
  SeriesTooShortForLags,
  // orchestration
  AllModelsFailed,
  NoSuccessfulModels,
  MissingMemberForecast,
  IndexMismatch,
  FrequencyMismatch,
  ArtifactCorrupt,
  InvalidArgument,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Library error carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// Thrown at cooperative checkpoints when a time budget is exhausted.
/// Deliberately not an Error: callers treat it as "skipped", not "failed".
class BudgetExceeded : public std::exception {
 public:
  const char* what() const noexcept override { return "time budget exceeded"; }
};

}  // namespace chronocast
