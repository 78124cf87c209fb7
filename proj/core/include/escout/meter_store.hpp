#pragma once

#include <cstddef>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "escout/time.hpp"

namespace escout {

class TariffPlan;

/// Energy consumed during the interval starting at `timestamp`.
struct Reading {
  Instant timestamp;
  double kwh = 0.0;

  friend bool operator==(const Reading&, const Reading&) = default;
};

/// Immutable, validated fixed-interval series for one household.
///
/// Readings are strictly increasing, lie on the grid anchored at the first
/// reading, and carry non-negative energy. Gaps are kept as gaps. The civil
/// breakdown of every reading is computed once at construction and shared
/// by all civil-time queries.
class MeterSeries {
 public:
  /// Sorts `readings` and validates them. Throws Error with
  /// DuplicateTimestamp, OffGridTimestamp, NegativeEnergy or InvalidArgument.
  MeterSeries(std::string household_id, Seconds interval, Zone zone,
              std::vector<Reading> readings);

  [[nodiscard]] const std::string& household_id() const noexcept { return household_id_; }
  [[nodiscard]] Seconds interval() const noexcept { return interval_; }
  [[nodiscard]] const Zone& zone() const noexcept { return zone_; }
  [[nodiscard]] std::span<const Reading> readings() const noexcept { return readings_; }
  [[nodiscard]] std::span<const CivilStamp> civil() const noexcept { return civil_; }
  [[nodiscard]] std::size_t size() const noexcept { return readings_.size(); }
  [[nodiscard]] bool empty() const noexcept { return readings_.empty(); }

  /// [first reading, last reading + interval), or nullopt when empty.
  [[nodiscard]] std::optional<TimeWindow> extent() const;

  /// Index range [first, last) of the readings inside `window`.
  [[nodiscard]] std::pair<std::size_t, std::size_t> index_range(const TimeWindow& window) const;

 private:
  std::string household_id_;
  Seconds interval_;
  Zone zone_;
  std::vector<Reading> readings_;
  std::vector<CivilStamp> civil_;
};

using SeriesHandle = std::shared_ptr<const MeterSeries>;

inline constexpr Seconds kDefaultInterval{900};
inline constexpr Seconds kMinInterval{60};
inline constexpr Seconds kMaxInterval{3600};

/// Parses a `timestamp,kwh` CSV. Lines starting with '#' and blank lines
/// are skipped. Timestamps are RFC 3339 with offset or local
/// `YYYY-MM-DDTHH:MM[:SS]` in `zone`.
[[nodiscard]] MeterSeries ingest_csv(std::istream& source, Seconds interval, const Zone& zone,
                                     std::string household_id = "household");

/// Readings with window.start <= timestamp < window.end.
[[nodiscard]] std::span<const Reading> slice(const MeterSeries& series, const TimeWindow& window);

/// Sum of raw energies in `window`.
[[nodiscard]] double window_total(const MeterSeries& series, const TimeWindow& window);

struct FocusBucket {
  Instant start;
  double sum_kwh = 0.0;
  std::size_t count = 0;
  double peak_kwh = 0.0;
  double offpeak_kwh = 0.0;
  // Populated only when a tariff plan labels the map.
  double sum_usd = 0.0;
  double peak_usd = 0.0;
  double offpeak_usd = 0.0;
};

/// Sum-grouped view of a window. Coarse buckets may flatten short peaks;
/// zooming in (a narrower window) restores the raw values.
struct FocusMap {
  TimeWindow window;
  Seconds bucket_span;
  bool labeled = false;
  std::vector<FocusBucket> buckets;
};

/// Partitions `window` into at most `max_points` equal spans of
/// ceil(duration / max_points) seconds (the last may be partial) and sums
/// the raw readings of each. When the window holds no more than
/// `max_points` readings, every reading gets its own bucket. With a plan,
/// each reading is classified peak/off-peak and priced.
/// Throws Error(InvalidMaxPoints) when max_points < 2.
[[nodiscard]] FocusMap downsample(const MeterSeries& series, const TimeWindow& window,
                                  std::size_t max_points, const TariffPlan* plan = nullptr);

/// (present readings x interval) / window duration, clamped to [0, 1].
[[nodiscard]] double coverage(const MeterSeries& series, const TimeWindow& window);

struct Gap {
  Instant start;  // first missing slot
  Instant end;    // next present reading
  std::size_t missing = 0;
};

/// Runs of absent grid slots between consecutive readings.
[[nodiscard]] std::vector<Gap> find_gaps(const MeterSeries& series);

/// Holds the current series snapshot. Installing a new series never
/// disturbs readers that already hold the previous handle.
class SeriesStore {
 public:
  [[nodiscard]] SeriesHandle current() const;
  void install(SeriesHandle series);

 private:
  mutable std::mutex mutex_;
  SeriesHandle series_;
};

}  // namespace escout
