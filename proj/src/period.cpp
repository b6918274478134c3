#include "matchfn/period.hpp"

#include "matchfn/error.hpp"

#include <charconv>
#include <cstdio>

namespace matchfn {

Period Period::make(int year, int month) {
  if (month < 1 || month > 12) {
    throw ValidationError("month out of range [1,12]: " + std::to_string(month));
  }
  return Period{year, month};
}

Period Period::parse(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 >= text.size()) {
    throw ValidationError("period must be YYYY-MM, got '" + std::string(text) + "'");
  }
  int year = 0;
  int month = 0;
  const auto y = std::from_chars(text.data(), text.data() + dash, year);
  const auto m = std::from_chars(text.data() + dash + 1, text.data() + text.size(), month);
  if (y.ec != std::errc{} || y.ptr != text.data() + dash || m.ec != std::errc{} ||
      m.ptr != text.data() + text.size()) {
    throw ValidationError("period must be YYYY-MM, got '" + std::string(text) + "'");
  }
  return make(year, month);
}

Period Period::from_index(int index) {
  int year = index / 12;
  int rem = index % 12;
  if (rem < 0) {
    rem += 12;
    --year;
  }
  return Period{year, rem + 1};
}

std::string Period::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

}  // namespace matchfn
