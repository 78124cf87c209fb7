#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "escout/error.hpp"
#include "escout/household_model.hpp"
#include "escout/tariff.hpp"
#include "fixtures.hpp"

using namespace escout;

namespace {

const std::string kTz = "America/New_York";
const Zone kNy = Zone::load(kTz);

// 2024-05-06 (local) is a Monday.
Instant ny(int y, int m, int d, int h = 0) { return from_unix(oracle::from_civil(kTz, y, m, d, h)); }

const TimeWindow kFourWeeks(ny(2024, 5, 6), ny(2024, 6, 3));

constexpr unsigned kFri = 1u << 4;
constexpr unsigned kSat = 1u << 5;
constexpr unsigned kEveryDay = 0x7f;

oracle::Device washer(unsigned days, int start_hour = 14, int end_hour = 16) {
  return {2, 500, 0, {{start_hour * 3600, end_hour * 3600, days}}};
}

oracle::ExactTotals simulate(const std::vector<oracle::Device>& d, const TimeWindow& w, const oracle::Plan& p) {
  return oracle::simulate(d, to_unix(w.start()), to_unix(w.end()), kTz, p);
}

double engine_kwh(const oracle::Device& d, const TimeWindow& w) {
  return device_energy(fixtures::to_engine(d, "d"), w, kNy);
}

HouseholdProfile profile_of(const std::vector<oracle::Device>& devices) {
  HouseholdProfile p;
  p.profile_id = "home";
  for (std::size_t i = 0; i < devices.size(); ++i) {
    p.devices.push_back(fixtures::to_engine(devices[i], "dev" + std::to_string(i)));
  }
  return p;
}

oracle::Device random_device(std::mt19937_64& rng) {
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  oracle::Device d;
  d.klass = pick(0, 2);
  d.rated_w = pick(1, 3000);
  d.standby_w = d.klass == 1 ? pick(0, static_cast<int>(d.rated_w)) : 0;
  const int events = pick(0, 3);
  for (int k = 0; k < events; ++k) {
    int a = pick(0, 1439) * 60, b = pick(0, 1439) * 60;
    if (a == b) b = (a + 60) % 86400;
    d.events.push_back({a, b, static_cast<unsigned>(pick(1, 127))});
  }
  return d;
}

}  // namespace

TEST(DeviceEnergy, WasherFourWeeks) {
  EXPECT_DOUBLE_EQ(engine_kwh(washer(kFri), kFourWeeks), 4.0);
}

TEST(DeviceEnergy, FridgeOneDay) {
  const oracle::Device fridge{0, 150, 0, {}};
  EXPECT_DOUBLE_EQ(engine_kwh(fridge, TimeWindow(ny(2024, 5, 6), ny(2024, 5, 7))), 3.6);
}

TEST(DeviceEnergy, TvSimulatedHourByHour) {
  const oracle::Device tv{1, 100, 5, {{19 * 3600, 21 * 3600, kEveryDay}}};
  const TimeWindow day(ny(2024, 5, 6), ny(2024, 5, 7));
  const auto sim = simulate({tv}, day, fixtures::weekday_afternoon_plan());
  EXPECT_DOUBLE_EQ(sim.kwh(), 0.31);
  EXPECT_DOUBLE_EQ(engine_kwh(tv, day), sim.kwh());
}

TEST(DeviceEnergy, HabitualWithoutEventsIsZero) {
  EXPECT_EQ(engine_kwh({2, 1000, 0, {}}, kFourWeeks), 0.0);
}

TEST(DeviceEnergy, OvernightEventCountsOnStartDay) {
  // Friday 22:00 to Saturday 02:00, in a window holding only Saturday.
  const oracle::Device d{2, 1000, 0, {{22 * 3600, 2 * 3600, kFri}}};
  EXPECT_DOUBLE_EQ(engine_kwh(d, TimeWindow(ny(2024, 5, 11), ny(2024, 5, 12))), 2.0);
  EXPECT_DOUBLE_EQ(engine_kwh(d, TimeWindow(ny(2024, 5, 10), ny(2024, 5, 12))), 4.0);
}

TEST(DeviceEnergy, DstDaysFollowWallClock) {
  // An always-on device over the 23-hour spring-forward day.
  const oracle::Device d{0, 1000, 0, {}};
  EXPECT_DOUBLE_EQ(engine_kwh(d, TimeWindow(ny(2024, 3, 10), ny(2024, 3, 11))), 23.0);
  // A daily 01:00-04:00 event loses its skipped hour that day.
  const oracle::Device e{2, 1000, 0, {{3600, 4 * 3600, kEveryDay}}};
  const TimeWindow w(ny(2024, 3, 10), ny(2024, 3, 11));
  EXPECT_DOUBLE_EQ(engine_kwh(e, w), simulate({e}, w, {}).kwh());
}

TEST(DeviceEnergy, SkippedAndRepeatedWallTimes) {
  // 2024-03-10 skips 02:00-03:00; an event ending at 02:30 stops at the jump.
  const oracle::Device spring{2, 1000, 0, {{3600, 2 * 3600 + 1800, 1u << 6}}};
  EXPECT_DOUBLE_EQ(engine_kwh(spring, TimeWindow(ny(2024, 3, 10), ny(2024, 3, 11))), 1.0);
  // 2024-11-03 repeats 01:00-02:00; 01:30-03:00 on the wall clock covers
  // both passes of 01:30-02:00 plus 02:00-03:00.
  const oracle::Device fall{2, 1000, 0, {{5400, 3 * 3600, 1u << 6}}};
  const TimeWindow nov(ny(2024, 11, 3), ny(2024, 11, 4));
  EXPECT_DOUBLE_EQ(engine_kwh(fall, nov), 2.0);
  EXPECT_DOUBLE_EQ(engine_kwh(fall, nov), simulate({fall}, nov, {}).kwh());
}

TEST(DeviceEnergy, RandomDevicesMatchSimulation) {
  std::mt19937_64 rng(89);
  const TimeWindow w(ny(2024, 3, 4), ny(2024, 3, 18));
  oracle::Plan plan = fixtures::random_plan(rng, false);
  const TariffPlan engine_plan = fixtures::to_engine(plan);
  for (int k = 0; k < 40; ++k) {
    const oracle::Device d = random_device(rng);
    const auto sim = simulate({d}, w, plan);
    const DeviceProfile dev = fixtures::to_engine(d, "d");
    const Energy e = device_energy_exact(dev, w, kNy);
    std::string desc = std::to_string(d.klass) + " " + std::to_string(d.rated_w) + " " + std::to_string(d.standby_w);
    for (auto& ev : d.events) desc += " [" + std::to_string(ev.start) + "," + std::to_string(ev.end) + "," + std::to_string(ev.days) + "]";
    ASSERT_EQ(static_cast<__int128>(e.milliwatt_seconds()), sim.watt_seconds * 1000) << k << " " << desc;
    const Money m = device_cost_exact(dev, w, engine_plan, kNy);
    ASSERT_TRUE(m.raw() == static_cast<absl::int128>(sim.money * 1000)) << k;
  }
}

TEST(DeviceCost, OffPeakAndPeakExamples) {
  const oracle::Plan plan = fixtures::weekday_afternoon_plan();
  const TariffPlan tou = fixtures::to_engine(plan);
  // Saturday 14-16 is off-peak, Friday 14-16 is peak; 4 kWh either way.
  EXPECT_DOUBLE_EQ(device_cost(fixtures::to_engine(washer(kSat), "w"), kFourWeeks, tou, kNy), 0.4);
  EXPECT_DOUBLE_EQ(device_cost(fixtures::to_engine(washer(kFri), "w"), kFourWeeks, tou, kNy), 1.2);
}

TEST(DeviceCost, StraddlingEventMatchesStepOracle) {
  const oracle::Plan plan = fixtures::weekday_afternoon_plan();
  const TariffPlan tou = fixtures::to_engine(plan);
  const oracle::Device d{2, 1234, 0, {{13 * 3600 + 20 * 60, 14 * 3600 + 50 * 60, kFri}}};
  const auto sim = simulate({d}, kFourWeeks, plan);
  const DeviceProfile dev = fixtures::to_engine(d, "d");
  const Money m = device_cost_exact(dev, kFourWeeks, tou, kNy);
  EXPECT_TRUE(m.raw() == static_cast<absl::int128>(sim.money * 1000));
  EXPECT_EQ(m.usd(), sim.usd());
}

TEST(DeviceCost, MovingPeakHoursOffPeakNeverCostsMore) {
  const oracle::Plan plan = fixtures::weekday_afternoon_plan();
  const TariffPlan tou = fixtures::to_engine(plan);
  for (int hour = 10; hour <= 19; ++hour) {
    const double weekday = device_cost(fixtures::to_engine(washer(kFri, hour, hour + 1), "w"), kFourWeeks, tou, kNy);
    const double weekend = device_cost(fixtures::to_engine(washer(kSat, hour, hour + 1), "w"), kFourWeeks, tou, kNy);
    EXPECT_LE(weekend, weekday);
  }
}

TEST(ProfileEnergy, EmptyAndAdditive) {
  const TariffPlan tou = fixtures::to_engine(fixtures::weekday_afternoon_plan());
  const ProfileEnergy empty = profile_energy(HouseholdProfile{}, kFourWeeks, tou, kNy);
  EXPECT_EQ(empty.kwh, 0.0);
  EXPECT_EQ(empty.usd, 0.0);

  std::mt19937_64 rng(97);
  std::vector<oracle::Device> devices;
  for (int i = 0; i < 10; ++i) devices.push_back(random_device(rng));
  const HouseholdProfile p = profile_of(devices);
  const ProfileEnergy all = profile_energy(p, kFourWeeks, tou, kNy);
  Energy e;
  Money m;
  for (const auto& d : p.devices) {
    e += device_energy_exact(d, kFourWeeks, kNy);
    m += device_cost_exact(d, kFourWeeks, tou, kNy);
  }
  EXPECT_EQ(all.energy, e);
  EXPECT_TRUE(all.money == m);
  const auto sim = simulate(devices, kFourWeeks, fixtures::weekday_afternoon_plan());
  EXPECT_EQ(all.kwh, sim.kwh());
  EXPECT_EQ(all.usd, sim.usd());
  ASSERT_EQ(all.per_device.size(), 10u);

  double by_category = 0.0;
  for (const auto& [cat, kwh] : all.per_category_kwh) by_category += kwh;
  EXPECT_NEAR(by_category, all.kwh, 1e-9);
}

TEST(ProfileEnergy, GeometryIsProportional) {
  const TariffPlan flat = TariffPlan::flat("flat", Rate::micro(100'000));
  const HouseholdProfile p = profile_of({washer(kFri), {0, 150, 0, {}}, {1, 100, 5, {{0, 3600, kEveryDay}}}});
  const ProfileEnergy pe = profile_energy(p, kFourWeeks, flat, kNy, {Seconds{900}, 2.5});
  for (const ScaleWeight& w : pe.per_device) {
    EXPECT_DOUBLE_EQ(w.area, 2.5 * w.energy_kwh);
    EXPECT_DOUBLE_EQ(w.radius, std::sqrt(w.area / std::numbers::pi));
  }
}

TEST(DeviceEnergy, TimeShiftAndWindowAdditivity) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::int64_t> pick(to_unix(kFourWeeks.start()), to_unix(kFourWeeks.end()));
  for (int k = 0; k < 30; ++k) {
    const oracle::Device d = random_device(rng);
    std::int64_t b = pick(rng);
    const TimeWindow left(kFourWeeks.start(), from_unix(b));
    const TimeWindow right(from_unix(b), kFourWeeks.end());
    const DeviceProfile dev = fixtures::to_engine(d, "d");
    if (left.start() < left.end() && right.start() < right.end()) {
      EXPECT_EQ(device_energy_exact(dev, left, kNy) + device_energy_exact(dev, right, kNy),
                device_energy_exact(dev, kFourWeeks, kNy));
    }
  }
  // Same duration on a different day and hour: same energy.
  const TimeWindow weeks(ny(2024, 5, 6), ny(2024, 6, 3));
  EXPECT_EQ(engine_kwh(washer(kFri, 14, 16), weeks), engine_kwh(washer(kSat, 6, 8), weeks));
}

TEST(Balance, Examples) {
  const BalanceState same = balance(100, 100);
  EXPECT_EQ(same.residual_kwh, 0.0);
  EXPECT_TRUE(same.balanced);
  const BalanceState edge = balance(95, 100, 0.05);
  EXPECT_DOUBLE_EQ(edge.imbalance_ratio, 0.05);
  EXPECT_TRUE(edge.balanced);
  const BalanceState off = balance(80, 100);
  EXPECT_DOUBLE_EQ(off.imbalance_ratio, 0.2);
  EXPECT_FALSE(off.balanced);
  EXPECT_DOUBLE_EQ(off.residual_kwh, 20.0);
  EXPECT_FALSE(balance(95, 100, 0.05 - 1e-12).balanced);
  EXPECT_THROW((void)balance(1, -1), Error);
  // Zero measured energy uses the epsilon floor.
  EXPECT_FALSE(balance(1, 0).balanced);
  EXPECT_TRUE(balance(0, 0).balanced);
}

TEST(Clone, IdentityAndIsolation) {
  const TariffPlan tou = fixtures::to_engine(fixtures::weekday_afternoon_plan());
  const HouseholdProfile base = profile_of({washer(kFri), {0, 150, 0, {}}});
  HouseholdProfile copy = clone_profile(base);
  EXPECT_EQ(copy.label, ProfileLabel::WhatIf);
  EXPECT_NE(copy.profile_id, base.profile_id);
  EXPECT_EQ(copy.devices, base.devices);
  const ScenarioDelta zero = compare_profiles(base, tou, copy, tou, kFourWeeks, kNy);
  EXPECT_EQ(zero.delta_kwh, 0.0);
  EXPECT_EQ(zero.delta_usd, 0.0);

  const double before = profile_energy(base, kFourWeeks, tou, kNy).kwh;
  apply_edit(copy, UpdateDevice{"dev0", {.rated_power = Power::kw(2.0)}});
  copy.devices[1].events.push_back({"x", TimeOfDay::parse("01:00"), TimeOfDay::parse("02:00"), DaySet::weekend()});
  EXPECT_EQ(profile_energy(base, kFourWeeks, tou, kNy).kwh, before);
  EXPECT_TRUE(base.devices[1].events.empty());
  EXPECT_EQ(clone_profile(HouseholdProfile{}, "w").devices.size(), 0u);
}

TEST(Compare, LaundryShiftSavesThePeakPremium) {
  const oracle::Plan plan = fixtures::weekday_afternoon_plan();
  const TariffPlan tou = fixtures::to_engine(plan);
  const HouseholdProfile base = profile_of({washer(kFri)});
  HouseholdProfile moved = clone_profile(base);
  apply_edit(moved, UpdateDevice{"dev0", {.events = std::vector<UsageEvent>{
                                              {"e1", TimeOfDay::parse("14:00"), TimeOfDay::parse("16:00"),
                                               DaySet::of({Weekday::Sat})}}}});
  const ScenarioDelta d = compare_profiles(base, tou, moved, tou, kFourWeeks, kNy);
  EXPECT_EQ(d.delta_kwh, 0.0);
  EXPECT_LT(d.delta_usd, 0.0);
  const auto a = simulate({washer(kFri)}, kFourWeeks, plan);
  const auto b = simulate({washer(kSat)}, kFourWeeks, plan);
  EXPECT_EQ(d.delta_usd, static_cast<double>(b.money - a.money) / 3.6e12);
  EXPECT_DOUBLE_EQ(d.delta_usd, -(0.3 - 0.1) * 4.0);
}

TEST(Compare, CflSwap) {
  const TariffPlan flat = TariffPlan::flat("flat", Rate::micro(100'000));
  const TimeWindow month(ny(2024, 6, 1), ny(2024, 7, 1));
  std::vector<oracle::Device> bulbs, cfls;
  for (int i = 0; i < 10; ++i) {
    bulbs.push_back({2, 60, 0, {{18 * 3600, 22 * 3600, kEveryDay}}});
    cfls.push_back({2, 14, 0, {{18 * 3600, 22 * 3600, kEveryDay}}});
  }
  const ScenarioDelta d = compare_profiles(profile_of(bulbs), flat, profile_of(cfls), flat, month, kNy);
  EXPECT_DOUBLE_EQ(d.delta_kwh, -55.2);
  EXPECT_EQ(d.delta_kwh, static_cast<double>(-46 * 10 * 4 * 30 * 3600) / 3.6e6);
}

TEST(Edits, RoundTripAndErrors) {
  HouseholdProfile p = profile_of({washer(kFri)});
  const HouseholdProfile original = p;
  DeviceProfile lamp;
  lamp.device_id = "lamp";
  lamp.name = "Lamp";
  lamp.category = "lighting";
  lamp.rated_power = Power::kw(0.06);
  apply_edit(p, AddDevice{lamp});
  EXPECT_NE(p.find("lamp"), nullptr);
  apply_edit(p, RemoveDevice{"lamp"});
  EXPECT_EQ(p, original);

  const auto code = [&](const ProfileEdit& e) {
    try {
      apply_edit(p, e);
    } catch (const Error& err) {
      return err.code();
    }
    return Errc::Io;
  };
  EXPECT_EQ(code(RemoveDevice{"nope"}), Errc::UnknownDevice);
  EXPECT_EQ(code(RemoveEvent{"dev0", "nope"}), Errc::UnknownEvent);
  EXPECT_EQ(code(AddEvent{"dev0", {"", TimeOfDay::parse("10:00"), TimeOfDay::parse("11:00"), DaySet()}}),
            Errc::InvariantViolation);
  EXPECT_EQ(code(AddEvent{"dev0", {"", TimeOfDay::parse("10:00"), TimeOfDay::parse("10:00"), DaySet::weekend()}}),
            Errc::InvariantViolation);
  EXPECT_EQ(code(AddDevice{p.devices[0]}), Errc::InvariantViolation);

  DeviceProfile tv;
  tv.device_id = "tv";
  tv.name = "TV";
  tv.usage_class = UsageClass::AlwaysPlugged;
  tv.rated_power = Power::kw(0.1);
  tv.standby_power = Power::kw(0.005);
  apply_edit(p, AddDevice{tv});
  EXPECT_EQ(code(UpdateDevice{"tv", {.rated_power = Power::kw(0.001)}}), Errc::InvariantViolation);
  EXPECT_EQ(p.find("tv")->rated_power, Power::kw(0.1));

  // A failing batch leaves the profile untouched.
  const HouseholdProfile snapshot = p;
  const std::vector<ProfileEdit> batch = {RemoveDevice{"tv"}, RemoveDevice{"ghost"}};
  EXPECT_THROW(apply_edits(p, batch), Error);
  EXPECT_EQ(p, snapshot);

  apply_edit(p, AddEvent{"tv", {"", TimeOfDay::parse("19:00"), TimeOfDay::parse("21:00"), DaySet::weekdays()}});
  const auto& events = p.find("tv")->events;
  ASSERT_EQ(events.size(), 1u);
  EXPECT_FALSE(events[0].event_id.empty());
  apply_edit(p, RemoveEvent{"tv", events[0].event_id});
  EXPECT_TRUE(p.find("tv")->events.empty());
}

TEST(Power, Validation) {
  EXPECT_EQ(Power::kw(0.5).milliwatts(), 500'000);
  EXPECT_THROW((void)Power::kw(-1.0), Error);
  EXPECT_EQ(parse_usage_class("always_on"), UsageClass::AlwaysOn);
  EXPECT_FALSE(parse_usage_class("sometimes").has_value());
}
