#include <algorithm>
#include <array>

#include "escout/context.hpp"
#include "escout/error.hpp"

namespace escout {

std::string_view to_string(Granularity g) noexcept {
  return g == Granularity::Hourly ? "hourly" : "daily";
}

namespace {

// Next instant after `t` that is a local hour (or day) boundary.
Instant next_boundary(Instant t, Granularity g, const Zone& zone) {
  if (g == Granularity::Hourly) {
    const std::int64_t local = to_unix(t) + zone.utc_offset(t).count();
    const std::int64_t into = ((local % kSecondsPerHour) + kSecondsPerHour) % kSecondsPerHour;
    return t + Seconds{kSecondsPerHour - into};
  }
  const Instant next = zone.day_start(zone.civil(t).day_index + 1);
  return next > t ? next : t + Seconds{kSecondsPerDay};
}

}  // namespace

ContextOverlay window_context(const TimeWindow& window, std::span<const WeatherSample> weather,
                              std::span<const CalendarEvent> events,
                              std::span<const Annotation> annotations, std::size_t zoom_hint,
                              const Zone& zone) {
  if (zoom_hint < 1) throw Error(Errc::InvalidArgument, "zoom_hint must be at least 1");
  ContextOverlay overlay{window, Granularity::Daily, {}, {}, {}};
  const auto per_cell = window.duration().count() / static_cast<std::int64_t>(zoom_hint);
  overlay.granularity = per_cell <= kSecondsPerHour ? Granularity::Hourly : Granularity::Daily;

  const auto by_time = [](const WeatherSample& s, Instant t) { return s.timestamp < t; };
  auto cursor = std::lower_bound(weather.begin(), weather.end(), window.start(), by_time);
  for (Instant s = window.start(); s < window.end();) {
    const Instant e = std::min(next_boundary(s, overlay.granularity, zone), window.end());
    WeatherCell cell{s, e, 0, {}, {}, {}};
    double temp = 0.0, humidity = 0.0;
    std::array<std::size_t, 7> votes{};
    for (; cursor != weather.end() && cursor->timestamp < e; ++cursor) {
      ++cell.sample_count;
      temp += cursor->temperature_c;
      humidity += cursor->humidity_pct;
      ++votes[static_cast<std::size_t>(cursor->condition)];
    }
    if (cell.sample_count > 0) {
      const double n = static_cast<double>(cell.sample_count);
      cell.mean_temp_c = temp / n;
      cell.mean_humidity_pct = humidity / n;
      // max_element keeps the first maximum, i.e. the earliest enum value.
      cell.dominant_condition =
          static_cast<WeatherCondition>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    overlay.weather_cells.push_back(cell);
    s = e;
  }

  for (const CalendarEvent& ev : events) {
    if (window.overlaps(ev.start, ev.end)) overlay.events.push_back(ev);
  }
  for (const Annotation& a : annotations) {
    if (window.contains(a.at)) overlay.annotations.push_back(a);
  }
  return overlay;
}

}  // namespace escout
