#include "escout/household_model.hpp"

#include <absl/time/time.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <set>

#include "escout/error.hpp"
#include "escout/tariff.hpp"
#include "text.hpp"

namespace escout {

Power Power::kw(double kilowatts) {
  if (!std::isfinite(kilowatts) || kilowatts < 0.0) {
    throw Error(Errc::InvariantViolation, "power must be a finite non-negative kW value");
  }
  return Power{std::llround(kilowatts * 1e6)};
}

std::string_view to_string(UsageClass c) noexcept {
  switch (c) {
    case UsageClass::AlwaysOn: return "always_on";
    case UsageClass::AlwaysPlugged: return "always_plugged";
    case UsageClass::Habitual: return "habitual";
  }
  return "";
}

std::optional<UsageClass> parse_usage_class(std::string_view s) {
  std::string k;
  for (char c : s) {
    if (c == '_' || c == '-' || c == ' ') continue;
    k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (k == "alwayson") return UsageClass::AlwaysOn;
  if (k == "alwaysplugged") return UsageClass::AlwaysPlugged;
  if (k == "habitual") return UsageClass::Habitual;
  return std::nullopt;
}

std::string_view to_string(ProfileLabel l) noexcept {
  return l == ProfileLabel::Base ? "base" : "whatif";
}

const DeviceProfile* HouseholdProfile::find(std::string_view device_id) const {
  const auto it = std::find_if(devices.begin(), devices.end(),
                               [&](const DeviceProfile& d) { return d.device_id == device_id; });
  return it == devices.end() ? nullptr : &*it;
}

void validate(const UsageEvent& event) {
  const std::string who = "event '" + event.event_id + "'";
  if (event.days.empty()) throw Error(Errc::InvariantViolation, who + " has no days");
  if (event.start == event.end) {
    throw Error(Errc::InvariantViolation, who + " starts and ends at the same time");
  }
  if (event.start.seconds() >= kSecondsPerDay) {
    throw Error(Errc::InvariantViolation, who + " cannot start at 24:00");
  }
}

void validate(const DeviceProfile& device) {
  const std::string who = "device '" + device.device_id + "'";
  if (device.device_id.empty()) throw Error(Errc::InvariantViolation, "device id is empty");
  if (device.standby_power > device.rated_power) {
    throw Error(Errc::InvariantViolation, who + " standby power exceeds rated power");
  }
  if (device.usage_class != UsageClass::AlwaysPlugged &&
      device.standby_power.milliwatts() != 0) {
    throw Error(Errc::InvariantViolation, who + " has standby power but is not always plugged");
  }
  std::set<std::string> ids;
  for (const UsageEvent& e : device.events) {
    validate(e);
    if (!ids.insert(e.event_id).second) {
      throw Error(Errc::InvariantViolation, who + " repeats event id '" + e.event_id + "'");
    }
  }
}

void validate(const HouseholdProfile& profile) {
  std::set<std::string> ids;
  for (const DeviceProfile& d : profile.devices) {
    validate(d);
    if (!ids.insert(d.device_id).second) {
      throw Error(Errc::InvariantViolation, "device id '" + d.device_id + "' is not unique");
    }
  }
}

namespace {

Weekday weekday_of(std::int32_t day_index) {
  return static_cast<Weekday>(((day_index + 3) % 7 + 7) % 7);
}

// Offsets stay within this bound in every tzdb zone.
constexpr std::int64_t kMaxOffset = 15 * kSecondsPerHour;

// Instants inside `window` whose local wall clock, in local seconds since
// the epoch, lies in [lo, hi). Split at offset changes, so a skipped wall
// time contributes nothing and a repeated one contributes both passes.
void wall_clock_spans(const Zone& zone, std::int64_t lo, std::int64_t hi, const TimeWindow& window,
                      std::vector<std::pair<Instant, Instant>>& out) {
  std::int64_t t = std::max(lo - kMaxOffset, to_unix(window.start()));
  const std::int64_t stop = std::min(hi + kMaxOffset, to_unix(window.end()));
  while (t < stop) {
    std::int64_t next = stop;
    absl::TimeZone::CivilTransition tr;
    if (zone.impl().NextTransition(absl::FromUnixSeconds(t), &tr)) {
      const std::int64_t at = absl::ToUnixSeconds(zone.impl().At(tr.to).trans);
      if (at > t) next = std::min(next, at);
    }
    const std::int64_t offset = zone.utc_offset(from_unix(t)).count();
    const std::int64_t a = std::max(t, lo - offset);
    const std::int64_t b = std::min(next, hi - offset);
    if (a < b) out.emplace_back(from_unix(a), from_unix(b));
    t = next;
  }
}

std::vector<TimeWindow> merge(std::vector<std::pair<Instant, Instant>> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<TimeWindow> out;
  for (const auto& [s, e] : spans) {
    if (!out.empty() && s <= out.back().end()) {
      if (e > out.back().end()) out.back() = TimeWindow(out.back().start(), e);
    } else {
      out.emplace_back(s, e);
    }
  }
  return out;
}

std::int64_t seconds_in(const std::vector<TimeWindow>& spans) {
  std::int64_t total = 0;
  for (const TimeWindow& w : spans) total += w.duration().count();
  return total;
}

// Piecewise-constant power over the window.
struct PowerSegment {
  Instant start;
  Instant end;
  Power power;
};

std::vector<PowerSegment> power_segments(const DeviceProfile& device, const TimeWindow& window,
                                         const Zone& zone) {
  std::vector<PowerSegment> segs;
  const auto active = active_intervals(device, window, zone);
  for (const TimeWindow& w : active) segs.push_back({w.start(), w.end(), device.rated_power});
  if (device.usage_class == UsageClass::AlwaysPlugged && device.standby_power.milliwatts() > 0) {
    Instant cursor = window.start();
    for (const TimeWindow& w : active) {
      if (cursor < w.start()) segs.push_back({cursor, w.start(), device.standby_power});
      cursor = w.end();
    }
    if (cursor < window.end()) segs.push_back({cursor, window.end(), device.standby_power});
  }
  return segs;
}

}  // namespace

std::vector<TimeWindow> active_intervals(const DeviceProfile& device, const TimeWindow& window,
                                         const Zone& zone) {
  if (device.usage_class == UsageClass::AlwaysOn) return {window};
  std::vector<std::pair<Instant, Instant>> spans;
  // Overnight spans that began the day before the window still count.
  const std::int32_t first = zone.civil(window.start()).day_index - 1;
  const std::int32_t last = zone.civil(window.end() - Seconds{1}).day_index;
  for (std::int32_t day = first; day <= last; ++day) {
    const Weekday wd = weekday_of(day);
    for (const UsageEvent& e : device.events) {
      if (!e.days.contains(wd)) continue;
      const std::int64_t midnight = std::int64_t{day} * kSecondsPerDay;
      const std::int64_t end = e.start < e.end ? e.end.seconds() : kSecondsPerDay + e.end.seconds();
      wall_clock_spans(zone, midnight + e.start.seconds(), midnight + end, window, spans);
    }
  }
  return merge(std::move(spans));
}

Energy device_energy_exact(const DeviceProfile& device, const TimeWindow& window,
                           const Zone& zone) {
  const std::int64_t window_s = window.duration().count();
  const std::int64_t rated = device.rated_power.milliwatts();
  switch (device.usage_class) {
    case UsageClass::AlwaysOn: return Energy::milliwatt_seconds(rated * window_s);
    case UsageClass::Habitual:
      return Energy::milliwatt_seconds(rated * seconds_in(active_intervals(device, window, zone)));
    case UsageClass::AlwaysPlugged: {
      const std::int64_t on = seconds_in(active_intervals(device, window, zone));
      return Energy::milliwatt_seconds(device.standby_power.milliwatts() * (window_s - on) +
                                       rated * on);
    }
  }
  return {};
}

Money device_cost_exact(const DeviceProfile& device, const TimeWindow& window,
                        const TariffPlan& plan, const Zone& zone, Seconds step) {
  if (step <= Seconds{0}) throw Error(Errc::InvalidArgument, "cost step must be positive");
  const std::int64_t dt = step.count();
  absl::int128 total = 0;
  for (const PowerSegment& seg : power_segments(device, window, zone)) {
    const std::int64_t a = to_unix(seg.start);
    const std::int64_t b = to_unix(seg.end);
    std::int64_t slot = a >= 0 ? a / dt * dt : -((-a + dt - 1) / dt) * dt;
    for (; slot < b; slot += dt) {
      const std::int64_t lo = std::max(a, slot);
      const std::int64_t hi = std::min(b, slot + dt);
      const std::int64_t mws = seg.power.milliwatts() * (hi - lo);
      const Rate rate = plan.classify(from_unix(slot), zone).rate;
      total += absl::int128(mws) * rate.micro_usd();
    }
  }
  return Money::raw(total);
}

ProfileEnergy profile_energy(const HouseholdProfile& profile, const TimeWindow& window,
                             const TariffPlan& plan, const Zone& zone,
                             const EvaluationOptions& options) {
  if (!(options.area_per_kwh > 0.0) || !std::isfinite(options.area_per_kwh)) {
    throw Error(Errc::InvalidArgument, "area_per_kwh must be positive");
  }
  ProfileEnergy out;
  std::map<std::string, Energy> by_category;
  for (const DeviceProfile& d : profile.devices) {
    const Energy e = device_energy_exact(d, window, zone);
    const Money m = device_cost_exact(d, window, plan, zone, options.step);
    out.energy += e;
    out.money += m;
    by_category[d.category] += e;
    ScaleWeight w;
    w.device_id = d.device_id;
    w.name = d.name;
    w.category = d.category;
    w.energy_kwh = e.kwh();
    w.cost_usd = m.usd();
    w.area = options.area_per_kwh * w.energy_kwh;
    w.radius = std::sqrt(w.area / std::numbers::pi);
    out.per_device.push_back(std::move(w));
  }
  for (const auto& [category, e] : by_category) out.per_category_kwh[category] = e.kwh();
  out.kwh = out.energy.kwh();
  out.usd = out.money.usd();
  return out;
}

BalanceState balance(double modeled_kwh, double measured_kwh, double tolerance) {
  if (!std::isfinite(measured_kwh) || measured_kwh < 0.0) {
    throw Error(Errc::InvalidArgument, "measured energy must be non-negative");
  }
  BalanceState s;
  s.measured_kwh = measured_kwh;
  s.modeled_kwh = modeled_kwh;
  s.residual_kwh = measured_kwh - modeled_kwh;
  s.imbalance_ratio = std::abs(s.residual_kwh) / std::max(measured_kwh, kBalanceEpsilon);
  s.tolerance = tolerance;
  s.balanced = s.imbalance_ratio <= tolerance;
  return s;
}

HouseholdProfile clone_profile(const HouseholdProfile& base, std::string new_id) {
  static std::atomic<std::uint64_t> counter{0};
  HouseholdProfile copy = base;
  copy.label = ProfileLabel::WhatIf;
  copy.profile_id = new_id.empty() ? base.profile_id + "-whatif-" + std::to_string(++counter)
                                   : std::move(new_id);
  return copy;
}

ScenarioDelta compare_profiles(const HouseholdProfile& base, const TariffPlan& base_plan,
                               const HouseholdProfile& whatif, const TariffPlan& whatif_plan,
                               const TimeWindow& window, const Zone& zone,
                               const EvaluationOptions& options) {
  const ProfileEnergy b = profile_energy(base, window, base_plan, zone, options);
  const ProfileEnergy w = profile_energy(whatif, window, whatif_plan, zone, options);
  ScenarioDelta d;
  d.base = {b.kwh, b.usd};
  d.whatif = {w.kwh, w.usd};
  d.delta_kwh = (w.energy - b.energy).kwh();
  d.delta_usd = (w.money - b.money).usd();
  return d;
}

}  // namespace escout
