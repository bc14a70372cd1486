#include "chronocast/forecast.hpp"

#include <algorithm>
#include <cstdio>

#include "chronocast/error.hpp"

namespace chronocast {

QuantileLevels::QuantileLevels(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) fail(ErrorCode::InvalidArgument, "quantile levels must be non-empty");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!(levels_[i] > 0.0 && levels_[i] < 1.0))
      fail(ErrorCode::InvalidArgument,
           "quantile level " + level_label(levels_[i]) + " outside (0,1)");
    if (i > 0 && !(levels_[i] > levels_[i - 1]))
      fail(ErrorCode::InvalidArgument, "quantile levels must be strictly increasing");
  }
}

std::vector<double> QuantileLevels::default_levels() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

int QuantileLevels::index_of(double level) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i] == level) return static_cast<int>(i);
  return -1;
}

std::string level_label(double level) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", level);
  return buf;
}

const ForecastFrame::Block* ForecastFrame::find(const std::string& id) const {
  for (const auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

bool ForecastFrame::index_equals(const ForecastFrame& other) const {
  if (frequency != other.frequency || levels != other.levels ||
      blocks.size() != other.blocks.size())
    return false;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].id != other.blocks[i].id || !(blocks[i].start == other.blocks[i].start) ||
        blocks[i].mean.size() != other.blocks[i].mean.size())
      return false;
  }
  return true;
}

bool ForecastFrame::quantiles_monotone() const {
  for (const auto& b : blocks) {
    for (std::size_t li = 1; li < b.quantiles.size(); ++li) {
      for (std::size_t h = 0; h < b.mean.size(); ++h) {
        if (b.quantiles[li][h] < b.quantiles[li - 1][h]) return false;
      }
    }
  }
  return true;
}

}  // namespace chronocast
