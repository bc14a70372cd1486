#include "chronocast/error.hpp"

namespace chronocast {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparseableTimestamp: return "UnparseableTimestamp";
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::IrregularSpacing: return "IrregularSpacing";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::AmbiguousFrequency: return "AmbiguousFrequency";
    case ErrorCode::SingletonSeries: return "SingletonSeries";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NoValidWindows: return "NoValidWindows";
    case ErrorCode::AllDenominatorsZero: return "AllDenominatorsZero";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::MissingLevel: return "MissingLevel";
    case ErrorCode::FewerThanTwoScores: return "FewerThanTwoScores";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::LagExceedsLength: return "LagExceedsLength";
    case ErrorCode::DegenerateFeatures: return "DegenerateFeatures";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::MissingKnownCovariates: return "MissingKnownCovariates";
    case ErrorCode::SeriesTooShortForLags: return "SeriesTooShortForLags";
    case ErrorCode::AllModelsFailed: return "AllModelsFailed";
    case ErrorCode::NoSuccessfulModels: return "NoSuccessfulModels";
    case ErrorCode::MissingMemberForecast: return "MissingMemberForecast";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::FrequencyMismatch: return "FrequencyMismatch";
    case ErrorCode::ArtifactCorrupt: return "ArtifactCorrupt";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace chronocast
