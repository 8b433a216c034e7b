#pragma once

#include <string>

namespace slwlab {

// Locale-independent decimal rendering, 17 significant digits (round-trip
// exact for IEEE doubles).  Used by every CSV/TOML writer.
std::string format_double(double x);

std::string format_int(long long x);

// Strict parse of a full string as a double/long; throws on trailing junk.
double parse_double(const std::string& s);
long long parse_int(const std::string& s);

}  // namespace slwlab
