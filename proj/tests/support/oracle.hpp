#pragma once

// Brute-force reference implementations used by the tests. Civil time comes
// from the C library (TZ + localtime_r/mktime), not from the engine.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

struct Civil {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int weekday = 0;  // Mon = 0
  long day_number = 0;  // days since 1970-01-01 of the civil date
  int iso_year = 0;
  int iso_week = 0;
  int second_of_day = 0;
};

/// Civil breakdown of a Unix instant in IANA zone `tz`.
Civil civil(std::int64_t unix_seconds, const std::string& tz);

/// Unix instant of a civil wall time; mktime with tm_isdst = -1.
std::int64_t from_civil(const std::string& tz, int year, int month, int day, int hour = 0,
                        int minute = 0, int second = 0);

long days_from_civil(int y, int m, int d);

struct Row {
  std::int64_t t = 0;
  double kwh = 0.0;
};

/// Sum of rows with start <= t < end, in row order.
double window_total(const std::vector<Row>& rows, std::int64_t start, std::int64_t end);

// ---- tariff ----------------------------------------------------------------

struct Period {
  unsigned days = 0;  // bit i = weekday i (Mon = 0)
  int start = 0;      // seconds of day, inclusive
  int end = 0;        // exclusive
  std::int64_t micro_rate = 0;
};

struct Plan {
  std::int64_t micro_offpeak = 0;
  std::vector<Period> periods;

  /// Rate in micro-dollars per kWh at civil time `c`; `peak` tells the label.
  std::int64_t rate(const Civil& c, bool* peak = nullptr) const;
};

struct CostSplit {
  double peak_kwh = 0.0;
  double offpeak_kwh = 0.0;
  double total_kwh = 0.0;
  double peak_usd = 0.0;
  double offpeak_usd = 0.0;
  double total_usd = 0.0;
};

CostSplit cost(const Plan& plan, const std::vector<Row>& rows, std::int64_t start,
               std::int64_t end, const std::string& tz);

// ---- aggregation -------------------------------------------------------------

enum class Scheme { Hour24, Hour12, Dow7, Dow14, Month12, Week52, Segment4 };

struct Filter {
  int day_kind = 0;  // 0 all, 1 weekdays, 2 weekends
  int season = -1;   // 0 winter, 1 spring, 2 summer, 3 fall
  int segment = -1;  // 0 morning, 1 afternoon, 2 evening, 3 night
};

struct Bin {
  double peak = 0.0;  // summed, in row order
  double offpeak = 0.0;
  std::size_t samples = 0;
  std::size_t instances = 0;
  std::size_t expected = 0;
};

int cells(Scheme s);
int bin_of(Scheme s, const Civil& c);
bool accepts(const Filter& f, const Civil& c);

/// Regroups raw rows. `anchor` and `interval` define the expected grid used
/// for coverage. A null plan labels everything off-peak.
std::vector<Bin> regroup(const std::vector<Row>& rows, std::int64_t interval, std::int64_t anchor,
                         std::int64_t start, std::int64_t end, const std::string& tz, Scheme s,
                         const Filter& f, const Plan* plan);

// ---- household model -----------------------------------------------------------

struct Event {
  int start = 0;  // seconds of day
  int end = 0;
  unsigned days = 0;
};

struct Device {
  int klass = 2;  // 0 always on, 1 always plugged, 2 habitual
  std::int64_t rated_w = 0;
  std::int64_t standby_w = 0;
  std::vector<Event> events;
};

/// True when an event occurrence covers the civil instant `c` (or the
/// previous day's overnight occurrence reaches into it).
bool active(const Device& d, const Civil& c);

struct ExactTotals {
  __int128 watt_seconds = 0;
  __int128 money = 0;  // watt-seconds x micro-dollars per kWh
  double kwh() const { return static_cast<double>(watt_seconds) / 3.6e6; }
  double usd() const { return static_cast<double>(money) / 3.6e12; }
};

/// Steps through [start, end) in `step` seconds, evaluating activity at
/// each second boundary of `resolution` and pricing each `price_step` slot
/// aligned to the Unix epoch at its start.
ExactTotals simulate(const std::vector<Device>& devices, std::int64_t start, std::int64_t end,
                     const std::string& tz, const Plan& plan, std::int64_t resolution = 60,
                     std::int64_t price_step = 900);

// ---- weather -------------------------------------------------------------------

struct Sample {
  std::int64_t t = 0;
  double temp = 0.0;
  double humidity = 0.0;
  int condition = 0;
};

struct Cell {
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::size_t count = 0;
  double mean_temp = 0.0;
  double mean_humidity = 0.0;
  int mode = -1;
};

std::vector<Cell> weather_cells(const std::vector<Sample>& samples,
                                const std::vector<std::int64_t>& boundaries);

}  // namespace oracle
