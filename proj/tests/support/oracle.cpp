#include "oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <map>
#include <set>
#include <stdexcept>

namespace oracle {

namespace {

void use_zone(const std::string& tz) {
  static std::string current;
  if (tz == current) return;
  const std::string value = ":" + tz;
  ::setenv("TZ", value.c_str(), 1);
  ::tzset();
  current = tz;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

// Weekday of Jan 1, Mon = 0.
int jan1_weekday(int y) {
  return static_cast<int>(((days_from_civil(y, 1, 1) + 3) % 7 + 7) % 7);
}

int iso_weeks_in(int y) {
  const int w = jan1_weekday(y);
  return (w == 3 || (w == 2 && leap(y))) ? 53 : 52;
}

}  // namespace

long days_from_civil(int y, int m, int d) {
  // Days-from-civil on the proleptic Gregorian calendar.
  y -= m <= 2 ? 1 : 0;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const long yoe = y - era * 400;
  const long doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

Civil civil(std::int64_t unix_seconds, const std::string& tz) {
  use_zone(tz);
  const std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  if (::localtime_r(&t, &tm) == nullptr) throw std::runtime_error("localtime_r failed");
  Civil c;
  c.year = tm.tm_year + 1900;
  c.month = tm.tm_mon + 1;
  c.day = tm.tm_mday;
  c.hour = tm.tm_hour;
  c.minute = tm.tm_min;
  c.second = tm.tm_sec;
  c.weekday = (tm.tm_wday + 6) % 7;
  c.day_number = days_from_civil(c.year, c.month, c.day);
  c.second_of_day = c.hour * 3600 + c.minute * 60 + c.second;
  const int ordinal = tm.tm_yday + 1;
  int week = (ordinal - (c.weekday + 1) + 10) / 7;
  int year = c.year;
  if (week < 1) {
    year -= 1;
    week = iso_weeks_in(year);
  } else if (week > iso_weeks_in(year)) {
    year += 1;
    week = 1;
  }
  c.iso_year = year;
  c.iso_week = week;
  return c;
}

std::int64_t from_civil(const std::string& tz, int year, int month, int day, int hour, int minute,
                        int second) {
  use_zone(tz);
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = month - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = minute;
  tm.tm_sec = second;
  tm.tm_isdst = -1;
  return static_cast<std::int64_t>(::mktime(&tm));
}

double window_total(const std::vector<Row>& rows, std::int64_t start, std::int64_t end) {
  double total = 0.0;
  for (const Row& r : rows) {
    if (r.t >= start && r.t < end) total += r.kwh;
  }
  return total;
}

std::int64_t Plan::rate(const Civil& c, bool* peak) const {
  for (const Period& p : periods) {
    if ((p.days >> c.weekday & 1u) && c.second_of_day >= p.start && c.second_of_day < p.end) {
      if (peak) *peak = true;
      return p.micro_rate;
    }
  }
  if (peak) *peak = false;
  return micro_offpeak;
}

CostSplit cost(const Plan& plan, const std::vector<Row>& rows, std::int64_t start,
               std::int64_t end, const std::string& tz) {
  CostSplit s;
  for (const Row& r : rows) {
    if (r.t < start || r.t >= end) continue;
    bool peak = false;
    const double usd = r.kwh * (static_cast<double>(plan.rate(civil(r.t, tz), &peak)) / 1e6);
    (peak ? s.peak_kwh : s.offpeak_kwh) += r.kwh;
    (peak ? s.peak_usd : s.offpeak_usd) += usd;
    s.total_kwh += r.kwh;
    s.total_usd += usd;
  }
  return s;
}

int cells(Scheme s) {
  switch (s) {
    case Scheme::Hour24: return 24;
    case Scheme::Hour12: return 12;
    case Scheme::Dow7: return 7;
    case Scheme::Dow14: return 14;
    case Scheme::Month12: return 12;
    case Scheme::Week52: return 52;
    case Scheme::Segment4: return 4;
  }
  return 0;
}

namespace {
int segment(int hour) {
  if (hour < 6) return 3;
  if (hour < 12) return 0;
  if (hour < 18) return 1;
  return 2;
}

int season(int month) {
  if (month == 12 || month <= 2) return 0;
  if (month <= 5) return 1;
  if (month <= 8) return 2;
  return 3;
}

// The period instance a civil stamp belongs to for scheme `s`.
std::int64_t instance(Scheme s, const Civil& c) {
  switch (s) {
    case Scheme::Month12: return std::int64_t{c.year} * 100 + c.month;
    case Scheme::Week52: return std::int64_t{c.iso_year} * 100 + c.iso_week;
    default: return c.day_number;
  }
}
}  // namespace

int bin_of(Scheme s, const Civil& c) {
  switch (s) {
    case Scheme::Hour24: return c.hour;
    case Scheme::Hour12: return c.hour / 2;
    case Scheme::Dow7: return c.weekday;
    case Scheme::Dow14: return c.weekday * 2 + (c.hour >= 12 ? 1 : 0);
    case Scheme::Month12: return c.month - 1;
    case Scheme::Week52: return std::min(c.iso_week, 52) - 1;
    case Scheme::Segment4: return segment(c.hour);
  }
  return 0;
}

bool accepts(const Filter& f, const Civil& c) {
  const bool weekend = c.weekday >= 5;
  if (f.day_kind == 1 && weekend) return false;
  if (f.day_kind == 2 && !weekend) return false;
  if (f.season >= 0 && season(c.month) != f.season) return false;
  if (f.segment >= 0 && segment(c.hour) != f.segment) return false;
  return true;
}

std::vector<Bin> regroup(const std::vector<Row>& rows, std::int64_t interval, std::int64_t anchor,
                         std::int64_t start, std::int64_t end, const std::string& tz, Scheme s,
                         const Filter& f, const Plan* plan) {
  std::vector<Bin> bins(static_cast<std::size_t>(cells(s)));
  std::vector<std::set<std::int64_t>> seen(bins.size());
  std::set<std::int64_t> present;
  for (const Row& r : rows) {
    if (r.t < start || r.t >= end) continue;
    present.insert(r.t);
    const Civil c = civil(r.t, tz);
    if (!accepts(f, c)) continue;
    const auto b = static_cast<std::size_t>(bin_of(s, c));
    bool peak = false;
    if (plan) plan->rate(c, &peak);
    (peak ? bins[b].peak : bins[b].offpeak) += r.kwh;
    ++bins[b].samples;
    seen[b].insert(instance(s, c));
  }
  for (std::size_t b = 0; b < bins.size(); ++b) bins[b].instances = seen[b].size();
  if (!rows.empty()) {
    // Every grid slot in the window, present or not.
    std::int64_t t = anchor + ((start - anchor) / interval) * interval;
    while (t < start) t += interval;
    while (t - interval >= start) t -= interval;
    for (; t < end; t += interval) {
      const Civil c = civil(t, tz);
      if (accepts(f, c)) ++bins[static_cast<std::size_t>(bin_of(s, c))].expected;
    }
  }
  return bins;
}

bool active(const Device& d, const Civil& c) {
  if (d.klass == 0) return true;
  const int prev = (c.weekday + 6) % 7;
  for (const Event& e : d.events) {
    if (e.start < e.end) {
      if ((e.days >> c.weekday & 1u) && c.second_of_day >= e.start && c.second_of_day < e.end) {
        return true;
      }
    } else {
      if ((e.days >> c.weekday & 1u) && c.second_of_day >= e.start) return true;
      if ((e.days >> prev & 1u) && c.second_of_day < e.end) return true;
    }
  }
  return false;
}

ExactTotals simulate(const std::vector<Device>& devices, std::int64_t start, std::int64_t end,
                     const std::string& tz, const Plan& plan, std::int64_t resolution,
                     std::int64_t price_step) {
  ExactTotals out;
  std::map<std::int64_t, std::int64_t> rate_cache;
  for (std::int64_t t = start; t < end; t += resolution) {
    const std::int64_t dt = std::min(resolution, end - t);
    const Civil c = civil(t, tz);
    const std::int64_t slot = t >= 0 ? t / price_step * price_step
                                     : -((-t + price_step - 1) / price_step) * price_step;
    auto it = rate_cache.find(slot);
    if (it == rate_cache.end()) it = rate_cache.emplace(slot, plan.rate(civil(slot, tz))).first;
    for (const Device& d : devices) {
      std::int64_t watts = 0;
      if (active(d, c)) {
        watts = d.rated_w;
      } else if (d.klass == 1) {
        watts = d.standby_w;
      }
      const __int128 ws = static_cast<__int128>(watts) * dt;
      out.watt_seconds += ws;
      out.money += ws * it->second;
    }
  }
  return out;
}

std::vector<Cell> weather_cells(const std::vector<Sample>& samples,
                                const std::vector<std::int64_t>& boundaries) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    Cell c;
    c.start = boundaries[i];
    c.end = boundaries[i + 1];
    double t = 0.0;
    double h = 0.0;
    std::map<int, int> votes;
    for (const Sample& s : samples) {
      if (s.t < c.start || s.t >= c.end) continue;
      ++c.count;
      t += s.temp;
      h += s.humidity;
      ++votes[s.condition];
    }
    if (c.count > 0) {
      c.mean_temp = t / static_cast<double>(c.count);
      c.mean_humidity = h / static_cast<double>(c.count);
      int best = -1;
      for (const auto& [cond, n] : votes) {
        if (best < 0 || n > votes[best]) best = cond;
      }
      c.mode = best;
    }
    cells.push_back(c);
  }
  return cells;
}

}  // namespace oracle
