#pragma once

#include <string>

namespace gibbs {

/// Fixed report formatting: 12 significant digits, '.' decimal separator,
/// locale independent.
std::string format_number(double v);

/// Value rounded to 12 significant digits (what format_number prints).
double round_report(double v);

}  // namespace gibbs
