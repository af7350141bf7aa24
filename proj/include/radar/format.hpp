#ifndef RADAR_FORMAT_HPP
#define RADAR_FORMAT_HPP

#include <charconv>
#include <string>

namespace radar {

// Shortest round-trip decimal representation; all CSV output goes through
// this so files parse back to bit-identical doubles.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace radar

#endif
