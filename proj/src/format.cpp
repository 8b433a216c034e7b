#include "slwlab/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace slwlab {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x,
                                 std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string format_int(long long x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_int failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

}  // namespace slwlab
