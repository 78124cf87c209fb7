#include "escout/aggregation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>

#include "escout/error.hpp"
#include "escout/meter_store.hpp"
#include "escout/tariff.hpp"

namespace escout {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Upper bound on grid slots enumerated for coverage accounting.
constexpr std::int64_t kMaxSlots = 20'000'000;

}  // namespace

DaySegment segment_of(int hour) noexcept {
  if (hour < 6) return DaySegment::Night;
  if (hour < 12) return DaySegment::Morning;
  if (hour < 18) return DaySegment::Afternoon;
  return DaySegment::Evening;
}

std::string_view to_string(DaySegment s) noexcept {
  switch (s) {
    case DaySegment::Morning: return "morning";
    case DaySegment::Afternoon: return "afternoon";
    case DaySegment::Evening: return "evening";
    case DaySegment::Night: return "night";
  }
  return "";
}

std::optional<DaySegment> parse_segment(std::string_view s) {
  const std::string l = lower(s);
  for (DaySegment d : {DaySegment::Morning, DaySegment::Afternoon, DaySegment::Evening,
                       DaySegment::Night}) {
    if (l == to_string(d)) return d;
  }
  return std::nullopt;
}

Season season_of(int month) noexcept {
  switch (month) {
    case 12: case 1: case 2: return Season::Winter;
    case 3: case 4: case 5: return Season::Spring;
    case 6: case 7: case 8: return Season::Summer;
    default: return Season::Fall;
  }
}

std::string_view to_string(Season s) noexcept {
  switch (s) {
    case Season::Winter: return "winter";
    case Season::Spring: return "spring";
    case Season::Summer: return "summer";
    case Season::Fall: return "fall";
  }
  return "";
}

BinScheme::BinScheme(BinKind kind, int cells) : kind_(kind), cells_(cells) {
  bool ok = false;
  switch (kind) {
    case BinKind::HourOfDay: ok = cells == 24 || cells == 12; break;
    case BinKind::DayOfWeek: ok = cells == 7 || cells == 14; break;
    case BinKind::MonthOfYear: ok = cells == 12; break;
    case BinKind::WeekOfYear: ok = cells == 52; break;
    case BinKind::DaySegment: ok = cells == 4; break;
  }
  if (!ok) {
    throw Error(Errc::InvalidArgument, std::string(name()) + " does not support " +
                                           std::to_string(cells) + " cells");
  }
}

BinScheme BinScheme::parse(std::string_view name, int cells) {
  const std::string l = lower(name);
  const auto pick = [cells](int fallback) { return cells == 0 ? fallback : cells; };
  if (l == "hour_of_day" || l == "hour") return {BinKind::HourOfDay, pick(24)};
  if (l == "day_of_week" || l == "day") return {BinKind::DayOfWeek, pick(7)};
  if (l == "month_of_year" || l == "month") return {BinKind::MonthOfYear, pick(12)};
  if (l == "week_of_year" || l == "week") return {BinKind::WeekOfYear, pick(52)};
  if (l == "day_segment" || l == "segment") return {BinKind::DaySegment, pick(4)};
  throw Error(Errc::InvalidArgument, "unknown bin scheme '" + std::string(name) + "'");
}

std::string_view BinScheme::name() const noexcept {
  switch (kind_) {
    case BinKind::HourOfDay: return "hour_of_day";
    case BinKind::DayOfWeek: return "day_of_week";
    case BinKind::MonthOfYear: return "month_of_year";
    case BinKind::WeekOfYear: return "week_of_year";
    case BinKind::DaySegment: return "day_segment";
  }
  return "";
}

int BinScheme::bin_of(const CivilStamp& c) const noexcept {
  switch (kind_) {
    case BinKind::HourOfDay: return cells_ == 24 ? c.hour : c.hour / 2;
    case BinKind::DayOfWeek: {
      const int day = static_cast<int>(c.weekday);
      return cells_ == 7 ? day : day * 2 + (c.hour >= 12 ? 1 : 0);
    }
    case BinKind::MonthOfYear: return c.month - 1;
    case BinKind::WeekOfYear: return std::min<int>(c.iso_week, 52) - 1;
    case BinKind::DaySegment: return static_cast<int>(segment_of(c.hour));
  }
  return 0;
}

std::int64_t BinScheme::instance_of(const CivilStamp& c) const noexcept {
  switch (kind_) {
    case BinKind::MonthOfYear: return std::int64_t{c.year} * 12 + (c.month - 1);
    case BinKind::WeekOfYear: return std::int64_t{c.iso_year} * 54 + c.iso_week;
    default: return c.day_index;
  }
}

std::string BinScheme::label(int bin) const {
  char buf[32];
  switch (kind_) {
    case BinKind::HourOfDay:
      if (cells_ == 24) {
        std::snprintf(buf, sizeof buf, "%02d:00", bin);
      } else {
        std::snprintf(buf, sizeof buf, "%02d:00-%02d:00", bin * 2, bin * 2 + 2);
      }
      return buf;
    case BinKind::DayOfWeek: {
      std::string day(to_string(static_cast<Weekday>(cells_ == 7 ? bin : bin / 2)));
      if (cells_ == 14) day += bin % 2 == 0 ? " AM" : " PM";
      return day;
    }
    case BinKind::MonthOfYear: return std::string(kMonths[static_cast<std::size_t>(bin)]);
    case BinKind::WeekOfYear:
      std::snprintf(buf, sizeof buf, "W%02d", bin + 1);
      return buf;
    case BinKind::DaySegment: return std::string(to_string(static_cast<DaySegment>(bin)));
  }
  return {};
}

bool AggFilter::accepts(const CivilStamp& c) const noexcept {
  if (day_kind == DayKind::WeekdaysOnly && is_weekend(c.weekday)) return false;
  if (day_kind == DayKind::WeekendsOnly && !is_weekend(c.weekday)) return false;
  if (season && season_of(c.month) != *season) return false;
  if (segment && segment_of(c.hour) != *segment) return false;
  return true;
}

AggFilter AggFilter::parse(std::string_view text) {
  AggFilter f;
  bool day_set = false;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string token = lower(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char ch) { return std::isspace(ch) != 0; }),
                token.end());
    if (token.empty() || token == "all") continue;
    const auto dup = [&](bool taken) {
      if (taken) throw Error(Errc::InvalidArgument, "filter repeats a category: '" + token + "'");
    };
    if (token == "weekdays" || token == "weekend" || token == "weekends") {
      dup(day_set);
      day_set = true;
      f.day_kind = token == "weekdays" ? DayKind::WeekdaysOnly : DayKind::WeekendsOnly;
    } else if (token == "winter" || token == "spring" || token == "summer" || token == "fall" ||
               token == "autumn") {
      dup(f.season.has_value());
      f.season = token == "winter"   ? Season::Winter
                 : token == "spring" ? Season::Spring
                 : token == "summer" ? Season::Summer
                                     : Season::Fall;
    } else if (auto seg = parse_segment(token)) {
      dup(f.segment.has_value());
      f.segment = seg;
    } else {
      throw Error(Errc::InvalidArgument, "unknown filter token '" + token + "'");
    }
  }
  return f;
}

std::string AggFilter::to_string() const {
  std::string out;
  const auto add = [&out](std::string_view s) {
    if (!out.empty()) out += ',';
    out += s;
  };
  if (day_kind == DayKind::WeekdaysOnly) add("weekdays");
  if (day_kind == DayKind::WeekendsOnly) add("weekends");
  if (season) add(escout::to_string(*season));
  if (segment) add(escout::to_string(*segment));
  return out.empty() ? "all" : out;
}

namespace {

std::vector<std::string> segment_warnings(const BinScheme& scheme, const AggFilter& filter) {
  if (!filter.segment || scheme.kind() == BinKind::MonthOfYear ||
      scheme.kind() == BinKind::WeekOfYear) {
    return {};
  }
  if (scheme.kind() == BinKind::DayOfWeek && scheme.cells() == 7) return {};
  std::vector<bool> reachable(static_cast<std::size_t>(scheme.cells()), false);
  for (int hour = 0; hour < 24; ++hour) {
    if (segment_of(hour) != *filter.segment) continue;
    for (int day = 0; day < 7; ++day) {
      CivilStamp c;
      c.hour = static_cast<std::uint8_t>(hour);
      c.weekday = static_cast<Weekday>(day);
      reachable[static_cast<std::size_t>(scheme.bin_of(c))] = true;
    }
  }
  const auto emptied = std::count(reachable.begin(), reachable.end(), false);
  if (emptied == 0) return {};
  return {"segment filter '" + std::string(to_string(*filter.segment)) + "' leaves " +
          std::to_string(emptied) + " of " + std::to_string(scheme.cells()) + " " +
          std::string(scheme.name()) + " bins empty"};
}

}  // namespace

AggregateResult aggregate(const MeterSeries& series, const AggregateSpec& spec) {
  struct Acc {
    double peak = 0.0;
    double offpeak = 0.0;
    std::size_t samples = 0;
    std::size_t instances = 0;
    std::size_t expected = 0;
    std::int64_t last_instance = std::numeric_limits<std::int64_t>::min();
  };
  const BinScheme& scheme = spec.scheme;
  std::vector<Acc> acc(static_cast<std::size_t>(scheme.cells()));

  const auto [lo, hi] = series.index_range(spec.window);
  const auto readings = series.readings();
  const auto civil = series.civil();
  for (std::size_t i = lo; i < hi; ++i) {
    const CivilStamp& c = civil[i];
    if (!spec.filter.accepts(c)) continue;
    Acc& a = acc[static_cast<std::size_t>(scheme.bin_of(c))];
    const std::int64_t instance = scheme.instance_of(c);
    if (instance != a.last_instance) {
      ++a.instances;
      a.last_instance = instance;
    }
    ++a.samples;
    const bool peak =
        spec.plan != nullptr && spec.plan->classify(c).label == PeakLabel::Peak;
    (peak ? a.peak : a.offpeak) += readings[i].kwh;
  }

  // Expected grid slots per bin, for coverage.
  if (!series.empty()) {
    const std::int64_t step = series.interval().count();
    const std::int64_t anchor = to_unix(readings.front().timestamp);
    const std::int64_t ws = to_unix(spec.window.start());
    const std::int64_t we = to_unix(spec.window.end());
    std::int64_t k = (ws - anchor) / step;
    if (anchor + k * step < ws) ++k;
    if ((we - (anchor + k * step)) / step > kMaxSlots) {
      throw Error(Errc::InvalidWindow, "window spans too many meter intervals");
    }
    std::size_t j = lo;
    for (std::int64_t t = anchor + k * step; t < we; t += step) {
      const Instant at = from_unix(t);
      CivilStamp c;
      if (j < hi && readings[j].timestamp == at) {
        c = civil[j++];
      } else {
        c = series.zone().civil(at);
      }
      if (spec.filter.accepts(c)) ++acc[static_cast<std::size_t>(scheme.bin_of(c))].expected;
    }
  }

  AggregateResult out;
  out.warnings = segment_warnings(scheme, spec.filter);
  out.bins.reserve(acc.size());
  for (std::size_t b = 0; b < acc.size(); ++b) {
    const Acc& a = acc[b];
    BinSummary s;
    s.bin_index = static_cast<int>(b);
    s.sample_count = a.samples;
    s.instance_count = a.instances;
    if (a.instances > 0) {
      const double n = static_cast<double>(a.instances);
      s.peak_kwh = a.peak / n;
      s.offpeak_kwh = a.offpeak / n;
      s.mean_kwh = s.peak_kwh + s.offpeak_kwh;
    }
    if (a.expected > 0) {
      s.coverage = std::min(1.0, static_cast<double>(a.samples) / static_cast<double>(a.expected));
    }
    out.bins.push_back(s);
  }
  return out;
}

Comparison compare(const AggregateSpec& main, const AggregateSpec& baseline,
                   const MeterSeries& series) {
  if (!(main.scheme == baseline.scheme)) {
    throw Error(Errc::QuantizationMismatch,
                "compared charts must share a quantization: " + std::string(main.scheme.name()) +
                    "/" + std::to_string(main.scheme.cells()) + " vs " +
                    std::string(baseline.scheme.name()) + "/" +
                    std::to_string(baseline.scheme.cells()));
  }
  return {aggregate(series, main), aggregate(series, baseline)};
}

std::string_view to_string(SpiralPeriod p) noexcept {
  switch (p) {
    case SpiralPeriod::Day: return "day";
    case SpiralPeriod::Week: return "week";
    case SpiralPeriod::Year: return "year";
  }
  return "";
}

std::optional<SpiralPeriod> parse_spiral_period(std::string_view s) {
  const std::string l = lower(s);
  if (l == "day") return SpiralPeriod::Day;
  if (l == "week") return SpiralPeriod::Week;
  if (l == "year") return SpiralPeriod::Year;
  return std::nullopt;
}

BinScheme spiral_scheme(SpiralPeriod period, int cells) {
  if (period == SpiralPeriod::Day && cells == 24) return BinScheme::hour_of_day(24);
  if (period == SpiralPeriod::Week && (cells == 7 || cells == 14)) {
    return BinScheme::day_of_week(cells);
  }
  if (period == SpiralPeriod::Year && cells == 12) return BinScheme::month_of_year();
  if (period == SpiralPeriod::Year && cells == 52) return BinScheme::week_of_year();
  throw Error(Errc::UnsupportedPeriodCells, "a " + std::string(to_string(period)) +
                                                " spiral cannot have " + std::to_string(cells) +
                                                " cells");
}

namespace {

// Ring key and the civil day index on which that ring starts.
struct RingKey {
  std::int64_t key;
  std::int32_t first_day;
};

std::int32_t weekday_of_day_index(std::int32_t day) {
  // 1970-01-01 was a Thursday.
  return ((day + 3) % 7 + 7) % 7;
}

RingKey ring_of(SpiralPeriod period, int cells, const CivilStamp& c) {
  switch (period) {
    case SpiralPeriod::Day: return {c.day_index, c.day_index};
    case SpiralPeriod::Week: {
      const std::int32_t monday = c.day_index - static_cast<std::int32_t>(c.weekday);
      return {monday, monday};
    }
    case SpiralPeriod::Year:
      if (cells == 52) {
        const std::int32_t jan4 = day_index_of(c.iso_year, 1, 4);
        return {c.iso_year, jan4 - weekday_of_day_index(jan4)};
      }
      return {c.year, day_index_of(c.year, 1, 1)};
  }
  return {0, 0};
}

RingKey next_ring(SpiralPeriod period, int cells, RingKey r) {
  switch (period) {
    case SpiralPeriod::Day: return {r.key + 1, r.first_day + 1};
    case SpiralPeriod::Week: return {r.key + 7, r.first_day + 7};
    case SpiralPeriod::Year: {
      const int year = static_cast<int>(r.key) + 1;
      if (cells == 52) {
        const std::int32_t jan4 = day_index_of(year, 1, 4);
        return {year, jan4 - weekday_of_day_index(jan4)};
      }
      return {year, day_index_of(year, 1, 1)};
    }
  }
  return r;
}

}  // namespace

SpiralGrid spiral(const MeterSeries& series, const TimeWindow& window, SpiralPeriod period,
                  int cells_per_period) {
  const BinScheme scheme = spiral_scheme(period, cells_per_period);
  const Zone& zone = series.zone();

  SpiralGrid grid;
  grid.period = period;
  grid.cells_per_period = cells_per_period;

  const RingKey first = ring_of(period, cells_per_period, zone.civil(window.start()));
  const RingKey last = ring_of(period, cells_per_period, zone.civil(window.end() - Seconds{1}));
  std::vector<std::int64_t> keys;
  for (RingKey r = first;; r = next_ring(period, cells_per_period, r)) {
    keys.push_back(r.key);
    grid.rings.push_back({zone.day_start(r.first_day),
                          std::vector<std::optional<double>>(
                              static_cast<std::size_t>(cells_per_period))});
    if (r.key >= last.key) break;
  }

  struct Cell {
    double sum = 0.0;
    std::size_t instances = 0;
    std::int64_t last_instance = std::numeric_limits<std::int64_t>::min();
  };
  std::vector<Cell> cells(grid.rings.size() * static_cast<std::size_t>(cells_per_period));

  const auto [lo, hi] = series.index_range(window);
  const auto readings = series.readings();
  const auto civil = series.civil();
  std::size_t ring = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const std::int64_t key = ring_of(period, cells_per_period, civil[i]).key;
    while (ring < keys.size() && keys[ring] != key) ++ring;
    if (ring == keys.size()) throw Error(Errc::InvariantViolation, "reading falls outside the spiral rings");
    Cell& cell = cells[ring * static_cast<std::size_t>(cells_per_period) +
                       static_cast<std::size_t>(scheme.bin_of(civil[i]))];
    const std::int64_t instance = scheme.instance_of(civil[i]);
    if (instance != cell.last_instance) {
      ++cell.instances;
      cell.last_instance = instance;
    }
    cell.sum += readings[i].kwh;
  }

  for (std::size_t r = 0; r < grid.rings.size(); ++r) {
    for (int k = 0; k < cells_per_period; ++k) {
      const Cell& cell = cells[r * static_cast<std::size_t>(cells_per_period) +
                               static_cast<std::size_t>(k)];
      if (cell.instances > 0) {
        grid.rings[r].cells[static_cast<std::size_t>(k)] =
            cell.sum / static_cast<double>(cell.instances);
      }
    }
  }
  return grid;
}

}  // namespace escout
