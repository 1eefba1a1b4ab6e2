#pragma once

#include <cmath>

namespace lfmimo {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

/// Rounds a dB figure to the 0.1 dB grain used in report tables.
inline double round_db(double db) { return std::round(db * 10.0) / 10.0; }

}  // namespace lfmimo
