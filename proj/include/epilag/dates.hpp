#pragma once

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "epilag/errors.hpp"

namespace epilag {

/// Calendar date stored as days since 1970-01-01, so lag arithmetic is
/// calendar-exact even across month boundaries and leap years.
class Date {
 public:
  Date() = default;
  explicit Date(int serial_days) : days_(serial_days) {}

  static Date from_ymd(int y, unsigned m, unsigned d) {
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) {
      throw MalformedCsv("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) +
                         "-" + std::to_string(d));
    }
    return Date(static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
  }

  int serial() const { return days_; }

  Date plus_days(int n) const { return Date(days_ + n); }
  int days_until(Date other) const { return other.days_ - days_; }

  auto operator<=>(const Date&) const = default;

  std::string to_string() const {
    auto ymd = std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

 private:
  int days_ = 0;
};

namespace detail {
inline std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}
}  // namespace detail

/// Parse "YYYY-MM-DD" or "YYYYMMDD" (auto-detected). A trailing time part
/// after 'T' or a space is ignored, so ISO timestamps pass through.
inline std::optional<Date> try_parse_date(std::string_view s) {
  if (auto cut = s.find_first_of("T "); cut != std::string_view::npos) s = s.substr(0, cut);
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    auto y = detail::parse_int(s.substr(0, 4));
    auto m = detail::parse_int(s.substr(5, 2));
    auto d = detail::parse_int(s.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{unsigned(*m)},
                                    std::chrono::day{unsigned(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date(static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
  }
  if (s.size() == 8) {
    auto y = detail::parse_int(s.substr(0, 4));
    auto m = detail::parse_int(s.substr(4, 2));
    auto d = detail::parse_int(s.substr(6, 2));
    if (!y || !m || !d) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{unsigned(*m)},
                                    std::chrono::day{unsigned(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date(static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
  }
  return std::nullopt;
}

inline Date parse_date(std::string_view s) {
  auto d = try_parse_date(s);
  if (!d) throw MalformedCsv("unparseable date '" + std::string(s) + "'");
  return *d;
}

}  // namespace epilag
