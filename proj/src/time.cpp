#include "herdscan/time.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <mutex>

namespace herdscan {

namespace {

using namespace std::chrono;

constexpr std::int64_t kMinutesPerDay = 24 * 60;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc{} && p == s.data() + pos + len;
}

// Guards setenv("TZ")/tzset, which are process-global.
std::mutex& tz_mutex() {
  static std::mutex m;
  return m;
}

class ScopedTz {
 public:
  explicit ScopedTz(const std::string& zone) {
    const char* old = std::getenv("TZ");
    if (old != nullptr) saved_ = old;
    had_ = old != nullptr;
    ::setenv("TZ", zone.c_str(), 1);
    ::tzset();
  }
  ~ScopedTz() {
    if (had_) ::setenv("TZ", saved_.c_str(), 1);
    else ::unsetenv("TZ");
    ::tzset();
  }
  ScopedTz(const ScopedTz&) = delete;
  ScopedTz& operator=(const ScopedTz&) = delete;

 private:
  std::string saved_;
  bool had_ = false;
};

std::tm to_tm(std::int64_t wall_minutes) {
  const auto days = floor_div(wall_minutes, kMinutesPerDay);
  const auto mod = wall_minutes - days * kMinutesPerDay;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  std::tm tm{};
  tm.tm_year = static_cast<int>(ymd.year()) - 1900;
  tm.tm_mon = static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
  tm.tm_mday = static_cast<int>(static_cast<unsigned>(ymd.day()));
  tm.tm_hour = static_cast<int>(mod / 60);
  tm.tm_min = static_cast<int>(mod % 60);
  tm.tm_isdst = -1;
  return tm;
}

std::int64_t from_tm(const std::tm& tm) {
  const year_month_day ymd{year{tm.tm_year + 1900}, month{static_cast<unsigned>(tm.tm_mon + 1)},
                           day{static_cast<unsigned>(tm.tm_mday)}};
  return static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * kMinutesPerDay +
         tm.tm_hour * 60 + tm.tm_min;
}

}  // namespace

Timestamp Timestamp::from_civil(year_month_day date, int hour, int minute) {
  const auto days = sys_days{date}.time_since_epoch().count();
  return Timestamp{static_cast<std::int64_t>(days) * kMinutesPerDay + hour * 60 + minute};
}

sys_days Timestamp::date() const {
  return sys_days{std::chrono::days{floor_div(minutes_, kMinutesPerDay)}};
}

int Timestamp::minute_of_day() const {
  return static_cast<int>(minutes_ - floor_div(minutes_, kMinutesPerDay) * kMinutesPerDay);
}

std::string Timestamp::to_string() const {
  const year_month_day ymd{date()};
  const int mod = minute_of_day();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), mod / 60,
                mod % 60);
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d))
    return std::nullopt;
  const Date date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::optional<ParsedTime> parse_timestamp(std::string_view text) {
  if (text.size() < 16) return std::nullopt;
  const auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
  int hh = 0, mm = 0;
  if (!read_int(text, 11, 2, hh) || text[13] != ':' || !read_int(text, 14, 2, mm)) return std::nullopt;
  if (hh > 23 || mm > 59) return std::nullopt;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    int ss = 0;
    if (!read_int(text, pos + 1, 2, ss) || ss > 60) return std::nullopt;
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
  }
  ParsedTime out;
  out.wall_minutes = Timestamp::from_civil(*date, hh, mm).minutes();
  if (pos < text.size()) {
    const char c = text[pos];
    if (c == 'Z' && pos + 1 == text.size()) {
      out.utc_offset_minutes = 0;
    } else if ((c == '+' || c == '-') && text.size() >= pos + 6 && text[pos + 3] == ':') {
      int oh = 0, om = 0;
      if (!read_int(text, pos + 1, 2, oh) || !read_int(text, pos + 4, 2, om) || pos + 6 != text.size())
        return std::nullopt;
      out.utc_offset_minutes = (c == '-' ? -1 : 1) * (oh * 60 + om);
    } else {
      return std::nullopt;
    }
  }
  return out;
}

ZoneConverter::ZoneConverter(std::string input_zone, std::string exchange_zone)
    : input_zone_(std::move(input_zone)), exchange_zone_(std::move(exchange_zone)) {}

Timestamp ZoneConverter::to_exchange(const ParsedTime& t) const {
  if (!t.utc_offset_minutes && identity()) return Timestamp{t.wall_minutes};

  std::lock_guard lock(tz_mutex());
  std::int64_t epoch_seconds = 0;
  if (t.utc_offset_minutes) {
    epoch_seconds = (t.wall_minutes - *t.utc_offset_minutes) * 60;
  } else {
    ScopedTz tz(input_zone_);
    std::tm tm = to_tm(t.wall_minutes);
    epoch_seconds = static_cast<std::int64_t>(std::mktime(&tm));
  }
  ScopedTz tz(exchange_zone_);
  const std::time_t tt = static_cast<std::time_t>(epoch_seconds);
  std::tm local{};
  ::localtime_r(&tt, &local);
  return Timestamp{from_tm(local)};
}

}  // namespace herdscan
