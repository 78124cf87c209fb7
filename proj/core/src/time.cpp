#include "escout/time.hpp"

#include <absl/time/civil_time.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "escout/error.hpp"

namespace escout {

TimeWindow::TimeWindow(Instant start, Instant end) : start_(start), end_(end) {
  if (!(start < end)) {
    throw Error(Errc::InvalidWindow, "window start must precede end");
  }
}

namespace {

constexpr std::array<std::string_view, 7> kShortDays = {"MON", "TUE", "WED", "THU",
                                                        "FRI", "SAT", "SUN"};
constexpr std::array<std::string_view, 7> kLongDays = {
    "MONDAY", "TUESDAY", "WEDNESDAY", "THURSDAY", "FRIDAY", "SATURDAY", "SUNDAY"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

const absl::CivilDay kEpochDay(1970, 1, 1);

Weekday from_absl(absl::Weekday w) {
  switch (w) {
    case absl::Weekday::monday: return Weekday::Mon;
    case absl::Weekday::tuesday: return Weekday::Tue;
    case absl::Weekday::wednesday: return Weekday::Wed;
    case absl::Weekday::thursday: return Weekday::Thu;
    case absl::Weekday::friday: return Weekday::Fri;
    case absl::Weekday::saturday: return Weekday::Sat;
    case absl::Weekday::sunday: return Weekday::Sun;
  }
  return Weekday::Mon;
}

// Fixed-width unsigned decimal field.
bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

struct ParsedStamp {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  std::optional<int> offset_seconds;
};

std::optional<ParsedStamp> parse_stamp(std::string_view s) {
  ParsedStamp p;
  if (!digits(s, 0, 4, p.year) || s.size() < 10 || s[4] != '-' || !digits(s, 5, 2, p.month) ||
      s[7] != '-' || !digits(s, 8, 2, p.day)) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
    if (!digits(s, pos + 1, 2, p.hour) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !digits(s, pos + 4, 2, p.minute)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!digits(s, pos + 1, 2, p.second)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        std::size_t frac = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == frac) return std::nullopt;
      }
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z' || s[pos] == 'z') {
        p.offset_seconds = 0;
        ++pos;
      } else if (s[pos] == '+' || s[pos] == '-') {
        int oh = 0, om = 0;
        if (!digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !digits(s, pos + 4, 2, om) || oh > 23 || om > 59) {
          return std::nullopt;
        }
        p.offset_seconds = (s[pos] == '-' ? -1 : 1) * (oh * 3600 + om * 60);
        pos += 6;
      }
    }
  }
  if (pos != s.size()) return std::nullopt;
  if (p.month < 1 || p.month > 12 || p.day < 1 || p.hour > 23 || p.minute > 59 ||
      p.second > 60) {
    return std::nullopt;
  }
  // Reject dates such as Feb 30 that absl would normalize.
  absl::CivilDay d(p.year, p.month, p.day);
  if (d.year() != p.year || d.month() != p.month || d.day() != p.day) return std::nullopt;
  return p;
}

}  // namespace

std::string_view to_string(Weekday d) noexcept { return kShortDays[static_cast<std::size_t>(d)]; }

std::optional<Weekday> parse_weekday(std::string_view s) {
  const std::string u = upper(s);
  for (std::size_t i = 0; i < 7; ++i) {
    if (u == kShortDays[i] || u == kLongDays[i]) return static_cast<Weekday>(i);
  }
  return std::nullopt;
}

TimeOfDay TimeOfDay::from_seconds(std::int32_t s) {
  if (s < 0 || s > kSecondsPerDay) {
    throw Error(Errc::InvalidArgument, "time of day out of range: " + std::to_string(s));
  }
  return TimeOfDay{s};
}

TimeOfDay TimeOfDay::parse(std::string_view text) {
  int h = 0, m = 0, sec = 0;
  bool ok = digits(text, 0, 2, h) && text.size() >= 5 && text[2] == ':' && digits(text, 3, 2, m);
  if (ok && text.size() == 8) {
    ok = text[5] == ':' && digits(text, 6, 2, sec);
  } else if (ok) {
    ok = text.size() == 5;
  }
  if (!ok || m > 59 || sec > 59 || h > 24 || (h == 24 && (m != 0 || sec != 0))) {
    throw Error(Errc::InvalidArgument, "bad time of day '" + std::string(text) + "'");
  }
  return TimeOfDay{h * 3600 + m * 60 + sec};
}

std::string TimeOfDay::to_string() const {
  char buf[16];
  const int h = seconds_ / 3600, m = (seconds_ / 60) % 60, s = seconds_ % 60;
  if (s != 0) {
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", h, m, s);
  } else {
    std::snprintf(buf, sizeof buf, "%02d:%02d", h, m);
  }
  return buf;
}

Zone Zone::load(std::string_view name) {
  absl::TimeZone tz;
  if (name.empty() || !absl::LoadTimeZone(std::string(name), &tz)) {
    throw Error(Errc::UnknownZone, "unknown time zone '" + std::string(name) + "'");
  }
  return Zone(std::string(name), tz);
}

Zone Zone::utc() { return Zone("UTC", absl::UTCTimeZone()); }

CivilStamp Zone::civil(Instant t) const {
  const absl::TimeZone::CivilInfo ci = tz_.At(absl::FromUnixSeconds(to_unix(t)));
  const absl::CivilDay day(ci.cs);
  CivilStamp c;
  c.year = static_cast<std::int32_t>(ci.cs.year());
  c.month = static_cast<std::uint8_t>(ci.cs.month());
  c.day = static_cast<std::uint8_t>(ci.cs.day());
  c.hour = static_cast<std::uint8_t>(ci.cs.hour());
  c.minute = static_cast<std::uint8_t>(ci.cs.minute());
  c.second = static_cast<std::uint8_t>(ci.cs.second());
  c.second_of_day = c.hour * 3600 + c.minute * 60 + c.second;
  c.weekday = from_absl(absl::GetWeekday(day));
  c.day_index = static_cast<std::int32_t>(day - kEpochDay);
  // ISO 8601: the week belongs to the year containing its Thursday.
  const absl::CivilDay thursday = day + (3 - static_cast<int>(c.weekday));
  c.iso_year = static_cast<std::int32_t>(thursday.year());
  c.iso_week = static_cast<std::uint8_t>((absl::GetYearDay(thursday) - 1) / 7 + 1);
  return c;
}

Seconds Zone::utc_offset(Instant t) const {
  return Seconds{tz_.At(absl::FromUnixSeconds(to_unix(t))).offset};
}

Instant Zone::from_civil(int year, int month, int day, int hour, int minute, int second) const {
  const absl::TimeZone::TimeInfo ti =
      tz_.At(absl::CivilSecond(year, month, day, hour, minute, second));
  return from_unix(absl::ToUnixSeconds(ti.pre));
}

Instant Zone::day_start(std::int32_t day_index) const {
  const absl::CivilDay d = kEpochDay + day_index;
  return from_civil(static_cast<int>(d.year()), d.month(), d.day());
}

CivilDate civil_date(std::int32_t day_index) {
  const absl::CivilDay d = kEpochDay + day_index;
  return {static_cast<int>(d.year()), d.month(), d.day()};
}

std::int32_t day_index_of(int year, int month, int day) {
  return static_cast<std::int32_t>(absl::CivilDay(year, month, day) - kEpochDay);
}

std::optional<Instant> parse_rfc3339(std::string_view text) {
  auto p = parse_stamp(text);
  if (!p || !p->offset_seconds) return std::nullopt;
  const std::int64_t days = day_index_of(p->year, p->month, p->day);
  const std::int64_t secs =
      days * kSecondsPerDay + p->hour * 3600 + p->minute * 60 + p->second - *p->offset_seconds;
  return from_unix(secs);
}

std::optional<Instant> parse_timestamp(std::string_view text, const Zone& zone) {
  auto p = parse_stamp(text);
  if (!p) return std::nullopt;
  if (p->offset_seconds) return parse_rfc3339(text);
  return zone.from_civil(p->year, p->month, p->day, p->hour, p->minute, p->second);
}

std::string format_rfc3339(Instant t, const Zone& zone) {
  const CivilStamp c = zone.civil(t);
  const auto off = zone.utc_offset(t).count();
  const long aoff = off < 0 ? -off : off;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d%c%02ld:%02ld", c.year, c.month,
                c.day, c.hour, c.minute, c.second, off < 0 ? '-' : '+', aoff / 3600,
                (aoff / 60) % 60);
  return buf;
}

}  // namespace escout
