#include "escout/meter_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include "escout/error.hpp"
#include "escout/tariff.hpp"

namespace escout {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

void check_interval(Seconds interval) {
  if (interval < kMinInterval || interval > kMaxInterval) {
    throw Error(Errc::InvalidArgument,
                "interval must be within 60..3600 s, got " + std::to_string(interval.count()));
  }
}

}  // namespace

MeterSeries::MeterSeries(std::string household_id, Seconds interval, Zone zone,
                         std::vector<Reading> readings)
    : household_id_(std::move(household_id)),
      interval_(interval),
      zone_(std::move(zone)),
      readings_(std::move(readings)) {
  check_interval(interval_);
  std::stable_sort(readings_.begin(), readings_.end(),
                   [](const Reading& a, const Reading& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < readings_.size(); ++i) {
    const Reading& r = readings_[i];
    if (!std::isfinite(r.kwh) || r.kwh < 0.0) {
      throw Error(Errc::NegativeEnergy, "negative energy at " + format_rfc3339(r.timestamp, zone_));
    }
    if (i > 0 && readings_[i - 1].timestamp == r.timestamp) {
      throw Error(Errc::DuplicateTimestamp,
                  "duplicate timestamp " + format_rfc3339(r.timestamp, zone_));
    }
    if ((r.timestamp - readings_.front().timestamp) % interval_ != Seconds{0}) {
      throw Error(Errc::OffGridTimestamp, format_rfc3339(r.timestamp, zone_) +
                                              " is off the " + std::to_string(interval_.count()) +
                                              " s grid");
    }
  }
  civil_.reserve(readings_.size());
  for (const Reading& r : readings_) civil_.push_back(zone_.civil(r.timestamp));
}

std::optional<TimeWindow> MeterSeries::extent() const {
  if (readings_.empty()) return std::nullopt;
  return TimeWindow(readings_.front().timestamp, readings_.back().timestamp + interval_);
}

std::pair<std::size_t, std::size_t> MeterSeries::index_range(const TimeWindow& window) const {
  const auto by_time = [](const Reading& r, Instant t) { return r.timestamp < t; };
  const auto lo = std::lower_bound(readings_.begin(), readings_.end(), window.start(), by_time);
  const auto hi = std::lower_bound(lo, readings_.end(), window.end(), by_time);
  return {static_cast<std::size_t>(lo - readings_.begin()),
          static_cast<std::size_t>(hi - readings_.begin())};
}

MeterSeries ingest_csv(std::istream& source, Seconds interval, const Zone& zone,
                       std::string household_id) {
  check_interval(interval);
  struct Row {
    Reading reading;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(source, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = trim(view);
    if (view.empty() || view.front() == '#') continue;

    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw Error(Errc::MalformedRow, "expected two comma-separated fields", line_no);
    }
    const std::string_view ts_field = trim(view.substr(0, comma));
    const std::string_view kwh_field = trim(view.substr(comma + 1));
    if (!have_header) {
      if (!iequals(ts_field, "timestamp") || !iequals(kwh_field, "kwh")) {
        throw Error(Errc::MalformedRow, "header must be 'timestamp,kwh'", line_no);
      }
      have_header = true;
      continue;
    }

    const auto ts = parse_timestamp(ts_field, zone);
    if (!ts) {
      throw Error(Errc::MalformedRow, "bad timestamp '" + std::string(ts_field) + "'", line_no);
    }
    double kwh = 0.0;
    const char* first = kwh_field.data();
    const char* last = first + kwh_field.size();
    if (!kwh_field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, kwh);
    if (ec != std::errc{} || ptr != last || kwh_field.empty() || !std::isfinite(kwh)) {
      throw Error(Errc::MalformedRow, "bad energy value '" + std::string(kwh_field) + "'", line_no);
    }
    if (kwh < 0.0) {
      throw Error(Errc::NegativeEnergy, "energy " + std::string(kwh_field) + " is negative",
                  line_no);
    }
    rows.push_back({{*ts, kwh}, line_no});
  }
  if (!have_header) throw Error(Errc::MalformedRow, "missing 'timestamp,kwh' header", line_no);

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.reading.timestamp < b.reading.timestamp;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Instant t = rows[i].reading.timestamp;
    if (i > 0 && rows[i - 1].reading.timestamp == t) {
      throw Error(Errc::DuplicateTimestamp,
                  "duplicate timestamp " + format_rfc3339(t, zone) + " (also line " +
                      std::to_string(rows[i - 1].line) + ")",
                  rows[i].line);
    }
    if ((t - rows.front().reading.timestamp) % interval != Seconds{0}) {
      throw Error(Errc::OffGridTimestamp,
                  format_rfc3339(t, zone) + " is off the " + std::to_string(interval.count()) +
                      " s grid anchored at " + format_rfc3339(rows.front().reading.timestamp, zone),
                  rows[i].line);
    }
  }
  std::vector<Reading> readings;
  readings.reserve(rows.size());
  for (const Row& r : rows) readings.push_back(r.reading);
  return MeterSeries(std::move(household_id), interval, zone, std::move(readings));
}

std::span<const Reading> slice(const MeterSeries& series, const TimeWindow& window) {
  const auto [lo, hi] = series.index_range(window);
  return series.readings().subspan(lo, hi - lo);
}

double window_total(const MeterSeries& series, const TimeWindow& window) {
  double total = 0.0;
  for (const Reading& r : slice(series, window)) total += r.kwh;
  return total;
}

FocusMap downsample(const MeterSeries& series, const TimeWindow& window, std::size_t max_points,
                    const TariffPlan* plan) {
  if (max_points < 2) {
    throw Error(Errc::InvalidMaxPoints, "max_points must be at least 2");
  }
  const auto [lo, hi] = series.index_range(window);
  const auto readings = series.readings();
  const auto civil = series.civil();
  const std::size_t n = hi - lo;

  FocusMap map{window, series.interval(), plan != nullptr, {}};

  const auto accumulate = [&](FocusBucket& b, std::size_t i) {
    const double kwh = readings[i].kwh;
    ++b.count;
    if (plan == nullptr) {
      b.sum_kwh += kwh;
      return;
    }
    const Classification c = plan->classify(civil[i]);
    const double usd = kwh * c.rate.usd();
    if (c.label == PeakLabel::Peak) {
      b.peak_kwh += kwh;
      b.peak_usd += usd;
    } else {
      b.offpeak_kwh += kwh;
      b.offpeak_usd += usd;
    }
  };

  if (n <= max_points) {
    map.buckets.reserve(n);
    for (std::size_t i = lo; i < hi; ++i) {
      FocusBucket b;
      b.start = readings[i].timestamp;
      accumulate(b, i);
      map.buckets.push_back(b);
    }
  } else {
    const std::int64_t total = window.duration().count();
    const std::int64_t points = static_cast<std::int64_t>(max_points);
    const std::int64_t span = (total + points - 1) / points;
    const std::int64_t count = (total + span - 1) / span;
    map.bucket_span = Seconds{span};
    map.buckets.resize(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k) {
      map.buckets[static_cast<std::size_t>(k)].start = window.start() + Seconds{k * span};
    }
    for (std::size_t i = lo; i < hi; ++i) {
      const std::int64_t offset = (readings[i].timestamp - window.start()).count();
      accumulate(map.buckets[static_cast<std::size_t>(offset / span)], i);
    }
  }

  if (plan != nullptr) {
    for (FocusBucket& b : map.buckets) {
      b.sum_kwh = b.peak_kwh + b.offpeak_kwh;
      b.sum_usd = b.peak_usd + b.offpeak_usd;
    }
  }
  return map;
}

double coverage(const MeterSeries& series, const TimeWindow& window) {
  const auto [lo, hi] = series.index_range(window);
  const double present = static_cast<double>(hi - lo) * static_cast<double>(series.interval().count());
  const double fraction = present / static_cast<double>(window.duration().count());
  return std::clamp(fraction, 0.0, 1.0);
}

std::vector<Gap> find_gaps(const MeterSeries& series) {
  std::vector<Gap> gaps;
  const auto readings = series.readings();
  for (std::size_t i = 1; i < readings.size(); ++i) {
    const Seconds step = readings[i].timestamp - readings[i - 1].timestamp;
    if (step > series.interval()) {
      gaps.push_back({readings[i - 1].timestamp + series.interval(), readings[i].timestamp,
                      static_cast<std::size_t>(step / series.interval()) - 1});
    }
  }
  return gaps;
}

SeriesHandle SeriesStore::current() const {
  std::lock_guard lock(mutex_);
  return series_;
}

void SeriesStore::install(SeriesHandle series) {
  std::lock_guard lock(mutex_);
  series_ = std::move(series);
}

}  // namespace escout
