#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <variant>

namespace tlds {

// All user-facing failures (bad input files, schema mismatches, infeasible
// configurations) surface as Error; internal invariant breaks use logic_error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A dataset cell: numeric features hold doubles (raw values or bin indices),
// categorical features hold their level as a string.
using Cell = std::variant<double, std::string>;

inline bool is_numeric(const Cell& c) { return c.index() == 0; }

// Shortest round-trip decimal form; integral values print without a ".0"
// suffix so CSV output is stable and diff-friendly.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("format_double failed");
  return std::string(buf, ptr);
}

inline std::string format_cell(const Cell& c) {
  if (is_numeric(c)) return format_double(std::get<double>(c));
  return std::get<std::string>(c);
}

inline bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace tlds
