#include "fixtures.hpp"

#include <atomic>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace fixtures {

using namespace escout;

Synthetic make_series(const SeriesSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<oracle::Row> rows;
  rows.reserve(spec.slots);
  for (std::size_t i = 0; i < spec.slots; ++i) {
    const std::int64_t t = spec.start + static_cast<std::int64_t>(i) * spec.interval;
    // Keep the first slot so the grid anchor is spec.start.
    if (i > 0 && spec.gap_probability > 0.0 && u(rng) < spec.gap_probability) continue;
    double kwh = 0.0;
    if (spec.dyadic) {
      kwh = static_cast<double>(std::uniform_int_distribution<int>(0, 2048)(rng)) / 1024.0;
    } else {
      kwh = 0.05 + 1.5 * u(rng) * u(rng);
    }
    rows.push_back({t, kwh});
  }
  MeterSeries series = to_series(rows, spec.interval, spec.tz);
  return {std::move(rows), std::move(series)};
}

MeterSeries to_series(const std::vector<oracle::Row>& rows, std::int64_t interval,
                      const std::string& tz, const std::string& household) {
  std::vector<Reading> readings;
  readings.reserve(rows.size());
  for (const auto& r : rows) readings.push_back({from_unix(r.t), r.kwh});
  return MeterSeries(household, Seconds{interval}, Zone::load(tz), std::move(readings));
}

oracle::Plan random_plan(std::mt19937_64& rng, bool dyadic) {
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const auto rate = [&]() -> std::int64_t {
    if (dyadic) return static_cast<std::int64_t>(pick(1, 40)) * 15625;  // k/64 $
    return static_cast<std::int64_t>(pick(10'000, 600'000));
  };
  oracle::Plan p;
  p.micro_offpeak = rate();
  // Up to three periods that never overlap: each owns a slice of the day.
  const int n = pick(0, 3);
  const int slice = 86400 / 3;
  for (int k = 0; k < n; ++k) {
    const int lo = k * slice;
    const int a = lo + pick(0, slice / 60 - 2) * 60;
    const int b = std::min(lo + slice, a + pick(1, slice / 60) * 60);
    if (a >= b) continue;
    oracle::Period per;
    per.days = static_cast<unsigned>(pick(1, 127));
    per.start = a;
    per.end = b;
    per.micro_rate = rate();
    p.periods.push_back(per);
  }
  return p;
}

TariffPlan to_engine(const oracle::Plan& plan, const std::string& id) {
  std::vector<PeakPeriod> periods;
  for (const auto& p : plan.periods) {
    PeakPeriod e;
    for (int d = 0; d < 7; ++d) {
      if (p.days >> d & 1u) e.days.insert(static_cast<Weekday>(d));
    }
    e.start = TimeOfDay::from_seconds(p.start);
    e.end = TimeOfDay::from_seconds(p.end);
    e.rate = Rate::micro(p.micro_rate);
    periods.push_back(e);
  }
  return TariffPlan(id, id, Rate::micro(plan.micro_offpeak), std::move(periods));
}

oracle::Plan weekday_afternoon_plan() {
  oracle::Plan p;
  p.micro_offpeak = 100'000;
  p.periods.push_back({0x1f, 14 * 3600, 20 * 3600, 300'000});
  return p;
}

DeviceProfile to_engine(const oracle::Device& d, const std::string& id) {
  DeviceProfile out;
  out.device_id = id;
  out.name = id;
  out.category = d.klass == 1 ? "vampire" : "appliance";
  out.usage_class = d.klass == 0   ? UsageClass::AlwaysOn
                    : d.klass == 1 ? UsageClass::AlwaysPlugged
                                   : UsageClass::Habitual;
  out.rated_power = Power::milliwatts(d.rated_w * 1000);
  out.standby_power = Power::milliwatts(d.standby_w * 1000);
  int n = 0;
  for (const auto& e : d.events) {
    UsageEvent ue;
    ue.event_id = "e" + std::to_string(++n);
    ue.start = TimeOfDay::from_seconds(e.start);
    ue.end = TimeOfDay::from_seconds(e.end);
    for (int k = 0; k < 7; ++k) {
      if (e.days >> k & 1u) ue.days.insert(static_cast<Weekday>(k));
    }
    out.events.push_back(ue);
  }
  return out;
}

void write_csv(const std::filesystem::path& file, const std::vector<oracle::Row>& rows,
               const std::string& /*tz*/) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "timestamp,kwh\n";
  char buf[64];
  out.precision(17);
  for (const auto& r : rows) {
    const std::time_t t = static_cast<std::time_t>(r.t);
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    out << buf << ',' << r.kwh << '\n';
  }
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("escout-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::int64_t utc(int year, int month, int day, int hour, int minute) {
  return oracle::days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60;
}

}  // namespace fixtures
