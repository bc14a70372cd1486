#pragma once

#include <string>
#include <vector>

namespace chronocast {

/// Floats in file output use 6 significant digits ("%.6g"): deterministic
/// across runs, short enough for golden-file comparisons.
std::string format_number(double value);

/// Splits one CSV record. Supports double-quoted fields with "" escapes;
/// trims a trailing '\r'.
std::vector<std::string> split_csv_line(const std::string& line);

std::string join_csv_line(const std::vector<std::string>& fields);

}  // namespace chronocast
