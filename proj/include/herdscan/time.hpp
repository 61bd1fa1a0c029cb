#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace herdscan {

/// Wall-clock instant in the exchange's local time, minute resolution.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t minutes) : minutes_(minutes) {}

  static Timestamp from_civil(std::chrono::year_month_day date, int hour, int minute);

  constexpr std::int64_t minutes() const { return minutes_; }
  std::chrono::sys_days date() const;
  int minute_of_day() const;
  std::string to_string() const;  // "YYYY-MM-DD HH:MM"

  constexpr auto operator<=>(const Timestamp&) const = default;

 private:
  std::int64_t minutes_ = 0;
};

using Date = std::chrono::year_month_day;

std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

/// Time-of-day window [start, end): bars stamped at `end` are excluded.
struct TradingWindow {
  int start_minute = 9 * 60 + 30;
  int end_minute = 16 * 60;

  bool contains(Timestamp ts) const {
    const int m = ts.minute_of_day();
    return m >= start_minute && m < end_minute;
  }
};

struct ParsedTime {
  std::int64_t wall_minutes = 0;           // civil minutes as written
  std::optional<int> utc_offset_minutes;   // present when the text carried Z or +hh:mm
};

/// Accepts "YYYY-MM-DD HH:MM[:SS]" and ISO-8601 "YYYY-MM-DDTHH:MM[:SS][.f][Z|+hh:mm]".
std::optional<ParsedTime> parse_timestamp(std::string_view text);

/// Maps parsed input times onto exchange-local wall clock using the system zoneinfo.
class ZoneConverter {
 public:
  explicit ZoneConverter(std::string input_zone = "America/New_York",
                         std::string exchange_zone = "America/New_York");

  Timestamp to_exchange(const ParsedTime& t) const;
  bool identity() const { return input_zone_ == exchange_zone_; }

 private:
  std::string input_zone_;
  std::string exchange_zone_;
};

}  // namespace herdscan
