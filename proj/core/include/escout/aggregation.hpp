#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "escout/time.hpp"

namespace escout {

class MeterSeries;
class TariffPlan;

enum class BinKind : std::uint8_t { HourOfDay, DayOfWeek, MonthOfYear, WeekOfYear, DaySegment };

enum class DaySegment : std::uint8_t { Morning, Afternoon, Evening, Night };

/// Morning 06-12, afternoon 12-18, evening 18-24, night 00-06.
[[nodiscard]] DaySegment segment_of(int hour) noexcept;
[[nodiscard]] std::string_view to_string(DaySegment s) noexcept;
[[nodiscard]] std::optional<DaySegment> parse_segment(std::string_view s);

/// Cyclic quantization of civil time into bins.
///
/// | kind        | cells | bin                         | period instance |
/// |-------------|-------|-----------------------------|-----------------|
/// | HourOfDay   | 24/12 | hour (or 2-hour block)      | civil day       |
/// | DayOfWeek   | 7/14  | weekday (or half day)       | civil day       |
/// | MonthOfYear | 12    | month                       | (year, month)   |
/// | WeekOfYear  | 52    | ISO week, 53 folds into 52  | ISO week        |
/// | DaySegment  | 4     | morning/afternoon/evening/night | civil day   |
class BinScheme {
 public:
  /// Throws Error(InvalidArgument) for a cell count the kind does not offer.
  BinScheme(BinKind kind, int cells);

  static BinScheme hour_of_day(int cells = 24) { return {BinKind::HourOfDay, cells}; }
  static BinScheme day_of_week(int cells = 7) { return {BinKind::DayOfWeek, cells}; }
  static BinScheme month_of_year() { return {BinKind::MonthOfYear, 12}; }
  static BinScheme week_of_year() { return {BinKind::WeekOfYear, 52}; }
  static BinScheme day_segment() { return {BinKind::DaySegment, 4}; }

  /// Accepts hour_of_day|hour, day_of_week|day, month_of_year|month,
  /// week_of_year|week, day_segment|segment. `cells` 0 picks the default.
  static BinScheme parse(std::string_view name, int cells = 0);

  [[nodiscard]] BinKind kind() const noexcept { return kind_; }
  [[nodiscard]] int cells() const noexcept { return cells_; }
  [[nodiscard]] std::string_view name() const noexcept;

  [[nodiscard]] int bin_of(const CivilStamp& c) const noexcept;
  /// Identifies the period instance (day, month or ISO week) a stamp falls in.
  [[nodiscard]] std::int64_t instance_of(const CivilStamp& c) const noexcept;
  [[nodiscard]] std::string label(int bin) const;

  friend bool operator==(const BinScheme&, const BinScheme&) = default;

 private:
  BinKind kind_;
  int cells_;
};

enum class DayKind : std::uint8_t { All, WeekdaysOnly, WeekendsOnly };

/// Meteorological seasons: Dec-Feb winter, Mar-May spring, Jun-Aug summer,
/// Sep-Nov fall.
enum class Season : std::uint8_t { Winter, Spring, Summer, Fall };

[[nodiscard]] Season season_of(int month) noexcept;
[[nodiscard]] std::string_view to_string(Season s) noexcept;

struct AggFilter {
  DayKind day_kind = DayKind::All;
  std::optional<Season> season;
  std::optional<DaySegment> segment;

  [[nodiscard]] bool accepts(const CivilStamp& c) const noexcept;
  /// Comma-separated tokens, e.g. "weekdays,winter,evening". "" or "all"
  /// is the empty filter. Throws Error(InvalidArgument).
  static AggFilter parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const AggFilter&, const AggFilter&) = default;
};

struct BinSummary {
  int bin_index = 0;
  double mean_kwh = 0.0;     // peak_kwh + offpeak_kwh
  double peak_kwh = 0.0;     // mean peak energy per period instance
  double offpeak_kwh = 0.0;  // mean off-peak energy per period instance
  std::size_t sample_count = 0;
  std::size_t instance_count = 0;
  double coverage = 0.0;
};

struct AggregateSpec {
  TimeWindow window;
  BinScheme scheme;
  AggFilter filter;
  /// Null labels every reading off-peak.
  const TariffPlan* plan = nullptr;
};

struct AggregateResult {
  std::vector<BinSummary> bins;
  std::vector<std::string> warnings;
};

/// Averages energy per bin over the period instances that contributed at
/// least one reading; gaps shrink the denominator instead of diluting the
/// mean.
[[nodiscard]] AggregateResult aggregate(const MeterSeries& series, const AggregateSpec& spec);

struct Comparison {
  AggregateResult main;
  AggregateResult baseline;
};

/// Positionally paired bins. Throws Error(QuantizationMismatch) unless both
/// specs use the same scheme and cell count.
[[nodiscard]] Comparison compare(const AggregateSpec& main, const AggregateSpec& baseline,
                                 const MeterSeries& series);

enum class SpiralPeriod : std::uint8_t { Day, Week, Year };

[[nodiscard]] std::string_view to_string(SpiralPeriod p) noexcept;
[[nodiscard]] std::optional<SpiralPeriod> parse_spiral_period(std::string_view s);

struct SpiralRing {
  Instant start;
  std::vector<std::optional<double>> cells;
};

/// Rings are ordered oldest first (innermost).
struct SpiralGrid {
  SpiralPeriod period = SpiralPeriod::Day;
  int cells_per_period = 24;
  std::vector<SpiralRing> rings;
};

/// Supported shapes: Day/24, Week/7, Week/14, Year/12, Year/52. Throws
/// Error(UnsupportedPeriodCells) otherwise.
[[nodiscard]] SpiralGrid spiral(const MeterSeries& series, const TimeWindow& window,
                                SpiralPeriod period, int cells_per_period);

/// The bin scheme that shares the spiral's cell layout.
[[nodiscard]] BinScheme spiral_scheme(SpiralPeriod period, int cells_per_period);

}  // namespace escout
