#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace texscope {

using Date = std::chrono::year_month_day;

namespace detail {

inline std::optional<int> parse_fixed_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace detail

// Accepts "YYYY-MM-DD", optionally followed by a "T..." time part (RFC 3339), or "YYYY-MM"
// (day 1).
inline std::optional<Date> parse_date(std::string_view s) {
  if (auto t = s.find('T'); t != std::string_view::npos) s = s.substr(0, t);
  if (s.size() != 10 && s.size() != 7) return std::nullopt;
  if (s[4] != '-' || (s.size() == 10 && s[7] != '-')) return std::nullopt;
  auto y = detail::parse_fixed_int(s.substr(0, 4));
  auto m = detail::parse_fixed_int(s.substr(5, 2));
  auto d = s.size() == 10 ? detail::parse_fixed_int(s.substr(8, 2)) : std::optional<int>(1);
  if (!y || !m || !d) return std::nullopt;
  Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
            std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

// Last day of the month containing `date`.
inline Date end_of_month(const Date& date) {
  return Date{std::chrono::year_month_day_last{date.year(), std::chrono::month_day_last{date.month()}}};
}

}  // namespace texscope
