#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace stripeband {

// Round-trip exact, locale independent.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw error(error_kind::validation, what + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

inline std::vector<double> parse_list(std::string_view s, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = s.find(',', start);
    out.push_back(parse_double(s.substr(start, comma - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// start:stop:step, endpoints included within half a step; a plain list is also accepted.
inline std::vector<double> parse_grid(std::string_view s, const std::string& what = "grid") {
  std::vector<double> out;
  if (s.find(':') == std::string_view::npos) {
    out = parse_list(s, what);
  } else {
    std::size_t a = s.find(':'), b = s.find(':', a + 1);
    if (b == std::string_view::npos || s.find(':', b + 1) != std::string_view::npos)
      throw error(error_kind::validation, what + ": expected start:stop:step");
    double lo = parse_double(s.substr(0, a), what), hi = parse_double(s.substr(a + 1, b - a - 1), what),
           step = parse_double(s.substr(b + 1), what);
    if (!(step > 0)) throw error(error_kind::validation, what + ": step must be positive");
    if (hi < lo) throw error(error_kind::validation, what + ": stop below start");
    long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    if (n > 10000000) throw error(error_kind::validation, what + ": too many points");
    for (long i = 0; i <= n; ++i) out.push_back(lo + i * step);
  }
  if (out.empty()) throw error(error_kind::validation, what + ": empty grid");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) throw error(error_kind::validation, what + ": grid must be strictly increasing");
  return out;
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

}  // namespace stripeband
