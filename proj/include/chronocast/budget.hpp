#pragma once

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>

#include "chronocast/error.hpp"

namespace chronocast {

/// Cooperative time budget. Long-running loops call check() at safe
/// checkpoints (between per-series fits, between gradient epochs); an
/// expired budget raises BudgetExceeded there and nowhere else.
class Budget {
 public:
  using Clock = std::chrono::steady_clock;

  Budget() = default;  // unlimited
  explicit Budget(double seconds)
      : deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(std::max(seconds, 0.0)))) {}

  static Budget unlimited() { return Budget(); }

  bool limited() const { return deadline_.has_value(); }
  bool expired() const { return deadline_ && Clock::now() >= *deadline_; }

  void check() const {
    if (expired()) throw BudgetExceeded();
  }

  double remaining_seconds() const {
    if (!deadline_) return std::numeric_limits<double>::infinity();
    return std::chrono::duration<double>(*deadline_ - Clock::now()).count();
  }

 private:
  std::optional<Clock::time_point> deadline_;
};

/// Even split of what is left over the models still queued.
inline double allocate_budget(double remaining_seconds, int remaining_models) {
  if (remaining_models <= 0) return 0.0;
  return std::max(remaining_seconds, 0.0) / remaining_models;
}

}  // namespace chronocast
