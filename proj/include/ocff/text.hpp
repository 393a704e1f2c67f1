#pragma once

#include <string>
#include <vector>

namespace ocff {

/// Decimal rendering that round-trips IEEE doubles (%.17g); non-finite
/// values render as "nan"/"inf"/"-inf".
std::string full_precision(double v);

std::vector<std::string> split(const std::string& line, char sep);

std::string trim(const std::string& s);

/// strtod with full-consumption check; throws DataError naming `what`.
double parse_double_strict(const std::string& s, const std::string& what);

long long parse_int_strict(const std::string& s, const std::string& what);

} // namespace ocff
