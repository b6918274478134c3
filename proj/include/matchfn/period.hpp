#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace matchfn {

/// Calendar month. Ordered chronologically.
struct Period {
  int year = 1970;
  int month = 1;

  /// Throws ValidationError if month is outside [1, 12].
  static Period make(int year, int month);
  /// Parses "YYYY-MM".
  static Period parse(std::string_view text);
  static Period from_index(int index);

  /// Months since year 0; consecutive periods differ by one.
  int index() const noexcept { return year * 12 + (month - 1); }
  Period plus_months(int n) const { return from_index(index() + n); }
  std::string str() const;

  auto operator<=>(const Period&) const = default;
};

inline int months_between(const Period& from, const Period& to) noexcept {
  return to.index() - from.index();
}

}  // namespace matchfn
