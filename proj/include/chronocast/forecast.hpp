#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chronocast/timegrid.hpp"

namespace chronocast {

/// Sorted quantile levels in the open interval (0, 1).
class QuantileLevels {
 public:
  QuantileLevels() : QuantileLevels(default_levels()) {}
  explicit QuantileLevels(std::vector<double> levels);

  static std::vector<double> default_levels();  // {0.1, ..., 0.9}

  const std::vector<double>& values() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }

  /// Index of an exactly-matching level, or -1.
  int index_of(double level) const;
  bool contains(double level) const { return index_of(level) >= 0; }

  bool operator==(const QuantileLevels&) const = default;

 private:
  std::vector<double> levels_;
};

/// Label used for quantile columns in files ("0.1", "0.25", ...).
std::string level_label(double level);

/// Per-series mean and quantile forecasts over a fixed horizon.
struct ForecastFrame {
  struct Block {
    std::string id;
    DateTime start;                              // timestamp of the first forecast step
    std::vector<double> mean;                    // one value per step
    std::vector<std::vector<double>> quantiles;  // [level][step]
  };

  Frequency frequency = Frequency::Daily;
  std::vector<double> levels;  // matches quantiles' outer dimension
  std::vector<Block> blocks;   // series in input order

  std::size_t size() const { return blocks.size(); }
  const Block* find(const std::string& id) const;

  /// Same series ids/order, step counts, start stamps, and levels.
  bool index_equals(const ForecastFrame& other) const;

  /// True when every block's quantiles are non-decreasing in the level at
  /// every step.
  bool quantiles_monotone() const;
};

}  // namespace chronocast
