#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "escout/time.hpp"

namespace escout {

// ---- weather ---------------------------------------------------------------

/// Ordered so that mode ties resolve to the earlier value.
enum class WeatherCondition : std::uint8_t { Sunny, Cloudy, Rain, Snow, Storm, Fog, Other };

[[nodiscard]] std::string_view to_string(WeatherCondition c) noexcept;
/// Case-insensitive; unknown names map to Other.
[[nodiscard]] WeatherCondition parse_condition(std::string_view s) noexcept;

struct WeatherSample {
  Instant timestamp;
  double temperature_c = 0.0;
  double humidity_pct = 0.0;
  WeatherCondition condition = WeatherCondition::Other;
};

/// Parses `timestamp,temp_c,humidity_pct,condition` rows and returns them
/// sorted by time. Offset-less timestamps are read in `zone`.
/// Throws Error(MalformedRow | HumidityOutOfRange) with the line number.
[[nodiscard]] std::vector<WeatherSample> ingest_weather(std::istream& source,
                                                        const Zone& zone = Zone::utc());

// ---- calendar --------------------------------------------------------------

enum class EventSource : std::uint8_t { Imported, Annotation };

struct CalendarEvent {
  std::string event_id;
  std::string title;
  Instant start;
  Instant end;
  EventSource source = EventSource::Imported;
  bool all_day = false;
};

struct CalendarOptions {
  /// Zone for floating and all-day times.
  Zone zone = Zone::utc();
  /// Recurrences are expanded while the occurrence lies fewer than `horizon`
  /// wall-clock days after DTSTART.
  Seconds horizon{366 * kSecondsPerDay};
  std::size_t max_occurrences = 100'000;
};

/// Reads the iCalendar subset: VEVENT with DTSTART, DTEND, SUMMARY, UID and
/// RRULE FREQ=DAILY|WEEKLY with optional COUNT or UNTIL. Descriptive
/// properties (DESCRIPTION, LOCATION, DTSTAMP, ...) are ignored; VTIMEZONE
/// and VALARM blocks are skipped. Anything that would change occurrence
/// times throws Error(MalformedCalendar) naming the construct.
[[nodiscard]] std::vector<CalendarEvent> ingest_calendar(std::istream& source,
                                                         const CalendarOptions& options = {});

// ---- annotations -----------------------------------------------------------

struct Annotation {
  std::string annotation_id;
  Instant at;
  std::string text;
  Instant created;
};

/// Append-only annotation log, optionally backed by a JSON-lines file of
/// `{id, at, text, created}` records. Deletions append `{id, deleted:true}`.
/// Writers are serialized; readers get consistent copies.
class AnnotationStore {
 public:
  using Clock = std::function<Instant()>;

  explicit AnnotationStore(std::optional<std::filesystem::path> file = std::nullopt,
                           Zone zone = Zone::utc(), Clock clock = {});

  /// Throws Error(EmptyText) when `text` is blank.
  Annotation add(Instant at, std::string text);
  /// False when no annotation has this id.
  bool remove(const std::string& annotation_id);

  [[nodiscard]] std::vector<Annotation> list(const TimeWindow& window) const;
  [[nodiscard]] std::vector<Annotation> all() const;

 private:
  void append_line(const std::string& line);

  std::optional<std::filesystem::path> file_;
  Zone zone_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::vector<Annotation> items_;
  std::uint64_t next_id_ = 1;
};

// ---- overlays --------------------------------------------------------------

enum class Granularity : std::uint8_t { Hourly, Daily };

[[nodiscard]] std::string_view to_string(Granularity g) noexcept;

struct WeatherCell {
  Instant start;
  Instant end;
  std::size_t sample_count = 0;
  std::optional<double> mean_temp_c;
  std::optional<double> mean_humidity_pct;
  std::optional<WeatherCondition> dominant_condition;
};

struct ContextOverlay {
  TimeWindow window;
  Granularity granularity = Granularity::Daily;
  std::vector<WeatherCell> weather_cells;
  std::vector<CalendarEvent> events;
  std::vector<Annotation> annotations;
};

/// Hourly cells when window / zoom_hint is at most one hour, else daily
/// cells on local midnights; either way cells partition the window. Events
/// are kept when they overlap the window. Throws Error(InvalidArgument)
/// when zoom_hint < 1.
[[nodiscard]] ContextOverlay window_context(const TimeWindow& window,
                                            std::span<const WeatherSample> weather,
                                            std::span<const CalendarEvent> events,
                                            std::span<const Annotation> annotations,
                                            std::size_t zoom_hint, const Zone& zone);

}  // namespace escout
