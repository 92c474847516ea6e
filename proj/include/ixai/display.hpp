#pragma once

#include <string>

namespace ixai {

enum class DisplayRole { kValue, kFactor, kContribution, kEstimate, kAdjustment };

// Significant figures shown for a role: 3 for the adjustment, 2 otherwise.
int significant_figures(DisplayRole role);

// Rounds the shortest round-trip decimal form of v to `digits` significant
// figures, half away from zero, and prints it without an exponent or
// trailing zeros: 29.75 -> "30", -1043.7 (3 digits) -> "-1040". Non-finite
// input throws std::invalid_argument.
std::string round_significant(double v, int digits);

std::string round_display(double v, DisplayRole role);

// Shortest decimal form that parses back to exactly v; "nan", "inf",
// "-inf" for non-finite values.
std::string format_number(double v);

}  // namespace ixai
