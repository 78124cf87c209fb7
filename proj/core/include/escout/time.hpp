#pragma once

#include <absl/time/time.h>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace escout {

/// Absolute instant at one-second resolution.
using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

[[nodiscard]] constexpr std::int64_t to_unix(Instant t) noexcept {
  return t.time_since_epoch().count();
}
[[nodiscard]] constexpr Instant from_unix(std::int64_t s) noexcept {
  return Instant{Seconds{s}};
}

/// Half-open interval [start, end).
class TimeWindow {
 public:
  /// Throws Error(InvalidWindow) unless start < end.
  TimeWindow(Instant start, Instant end);

  [[nodiscard]] Instant start() const noexcept { return start_; }
  [[nodiscard]] Instant end() const noexcept { return end_; }
  [[nodiscard]] Seconds duration() const noexcept { return end_ - start_; }
  [[nodiscard]] bool contains(Instant t) const noexcept { return start_ <= t && t < end_; }
  [[nodiscard]] bool overlaps(Instant s, Instant e) const noexcept {
    return s < end_ && (e > start_ || (s == e && s >= start_));
  }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;

 private:
  Instant start_;
  Instant end_;
};

enum class Weekday : std::uint8_t { Mon = 0, Tue, Wed, Thu, Fri, Sat, Sun };

[[nodiscard]] constexpr bool is_weekend(Weekday d) noexcept {
  return d == Weekday::Sat || d == Weekday::Sun;
}
[[nodiscard]] std::string_view to_string(Weekday d) noexcept;
/// Accepts "MON", "mon", "Monday", ...
[[nodiscard]] std::optional<Weekday> parse_weekday(std::string_view s);

/// A set of days of the week.
class DaySet {
 public:
  constexpr DaySet() = default;
  static constexpr DaySet all() { return DaySet{0x7f}; }
  static constexpr DaySet weekdays() { return DaySet{0x1f}; }
  static constexpr DaySet weekend() { return DaySet{0x60}; }
  static constexpr DaySet of(std::initializer_list<Weekday> days) {
    DaySet s;
    for (Weekday d : days) s.insert(d);
    return s;
  }

  constexpr void insert(Weekday d) noexcept { bits_ |= bit(d); }
  constexpr void erase(Weekday d) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(d)); }
  [[nodiscard]] constexpr bool contains(Weekday d) const noexcept { return (bits_ & bit(d)) != 0; }
  [[nodiscard]] constexpr bool empty() const noexcept { return bits_ == 0; }
  [[nodiscard]] constexpr std::uint8_t bits() const noexcept { return bits_; }

  friend constexpr bool operator==(DaySet, DaySet) = default;

 private:
  constexpr explicit DaySet(std::uint8_t bits) : bits_(bits) {}
  static constexpr std::uint8_t bit(Weekday d) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
  }
  std::uint8_t bits_ = 0;
};

/// Civil time of day in seconds after midnight, 0..86400 (86400 = "24:00",
/// valid only as an exclusive end).
class TimeOfDay {
 public:
  constexpr TimeOfDay() = default;
  static TimeOfDay from_seconds(std::int32_t s);
  static TimeOfDay hm(int hour, int minute) { return from_seconds(hour * 3600 + minute * 60); }
  /// "HH:MM" or "HH:MM:SS"; throws Error(InvalidArgument).
  static TimeOfDay parse(std::string_view text);

  [[nodiscard]] constexpr std::int32_t seconds() const noexcept { return seconds_; }
  [[nodiscard]] std::string to_string() const;

  friend constexpr auto operator<=>(TimeOfDay, TimeOfDay) = default;

 private:
  constexpr explicit TimeOfDay(std::int32_t s) : seconds_(s) {}
  std::int32_t seconds_ = 0;
};

/// Civil breakdown of an instant in a household zone.
struct CivilStamp {
  std::int32_t year = 1970;
  std::uint8_t month = 1;  // 1..12
  std::uint8_t day = 1;    // 1..31
  std::uint8_t hour = 0;
  std::uint8_t minute = 0;
  std::uint8_t second = 0;
  Weekday weekday = Weekday::Thu;
  std::int32_t second_of_day = 0;
  std::int32_t day_index = 0;  // civil days since 1970-01-01
  std::int32_t iso_year = 1970;
  std::uint8_t iso_week = 1;  // 1..53
};

/// An IANA time zone. Cheap to copy.
class Zone {
 public:
  /// Throws Error(UnknownZone).
  static Zone load(std::string_view name);
  static Zone utc();

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] CivilStamp civil(Instant t) const;
  [[nodiscard]] Seconds utc_offset(Instant t) const;

  /// Civil wall-clock to instant. A repeated wall time resolves to its
  /// earlier occurrence; a skipped one is shifted forward by the gap.
  [[nodiscard]] Instant from_civil(int year, int month, int day, int hour = 0,
                                   int minute = 0, int second = 0) const;
  /// Local midnight starting civil day `day_index` (days since 1970-01-01).
  [[nodiscard]] Instant day_start(std::int32_t day_index) const;

  [[nodiscard]] const absl::TimeZone& impl() const noexcept { return tz_; }

 private:
  Zone(std::string name, absl::TimeZone tz) : name_(std::move(name)), tz_(tz) {}
  std::string name_;
  absl::TimeZone tz_;
};

/// Civil day index -> (year, month, day).
struct CivilDate {
  int year;
  int month;
  int day;
};
[[nodiscard]] CivilDate civil_date(std::int32_t day_index);
[[nodiscard]] std::int32_t day_index_of(int year, int month, int day);

/// RFC 3339 instant with an explicit offset ("Z" or "+hh:mm").
[[nodiscard]] std::optional<Instant> parse_rfc3339(std::string_view text);

/// RFC 3339 with offset, or an offset-less local "YYYY-MM-DDTHH:MM[:SS]" /
/// "YYYY-MM-DD" read as civil time in `zone`.
[[nodiscard]] std::optional<Instant> parse_timestamp(std::string_view text, const Zone& zone);

/// "YYYY-MM-DDTHH:MM:SS+hh:mm" with the zone's offset at `t`.
[[nodiscard]] std::string format_rfc3339(Instant t, const Zone& zone);

}  // namespace escout
