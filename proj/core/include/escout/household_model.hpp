#pragma once

#include <absl/numeric/int128.h>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "escout/time.hpp"

namespace escout {

class TariffPlan;

/// Electrical power at milliwatt resolution.
class Power {
 public:
  constexpr Power() = default;
  /// Rounds to the nearest milliwatt; throws Error(InvariantViolation) for
  /// negative or non-finite input.
  static Power kw(double kilowatts);
  static constexpr Power milliwatts(std::int64_t mw) { return Power{mw}; }

  [[nodiscard]] constexpr std::int64_t milliwatts() const noexcept { return mw_; }
  [[nodiscard]] constexpr double kw() const noexcept { return static_cast<double>(mw_) / 1e6; }

  friend constexpr auto operator<=>(Power, Power) = default;

 private:
  constexpr explicit Power(std::int64_t mw) : mw_(mw) {}
  std::int64_t mw_ = 0;
};

/// Energy in milliwatt-seconds. Sums and differences are exact.
class Energy {
 public:
  constexpr Energy() = default;
  static constexpr Energy milliwatt_seconds(std::int64_t v) { return Energy{v}; }

  [[nodiscard]] constexpr std::int64_t milliwatt_seconds() const noexcept { return mws_; }
  [[nodiscard]] constexpr double kwh() const noexcept {
    return static_cast<double>(mws_) / 3.6e9;
  }

  constexpr Energy& operator+=(Energy o) noexcept { mws_ += o.mws_; return *this; }
  friend constexpr Energy operator+(Energy a, Energy b) noexcept { return Energy{a.mws_ + b.mws_}; }
  friend constexpr Energy operator-(Energy a, Energy b) noexcept { return Energy{a.mws_ - b.mws_}; }
  friend constexpr auto operator<=>(Energy, Energy) = default;

 private:
  constexpr explicit Energy(std::int64_t v) : mws_(v) {}
  std::int64_t mws_ = 0;
};

/// Cost in units of (milliwatt-second x micro-dollar per kWh). Exact.
class Money {
 public:
  Money() = default;
  static Money raw(absl::int128 v) { return Money{v}; }

  [[nodiscard]] absl::int128 raw() const noexcept { return v_; }
  [[nodiscard]] double usd() const noexcept { return static_cast<double>(v_) / 3.6e15; }

  Money& operator+=(Money o) noexcept { v_ += o.v_; return *this; }
  friend Money operator+(Money a, Money b) noexcept { return Money{a.v_ + b.v_}; }
  friend Money operator-(Money a, Money b) noexcept { return Money{a.v_ - b.v_}; }
  friend bool operator==(Money a, Money b) noexcept { return a.v_ == b.v_; }
  friend bool operator<(Money a, Money b) noexcept { return a.v_ < b.v_; }
  friend bool operator<=(Money a, Money b) noexcept { return a.v_ <= b.v_; }

 private:
  explicit Money(absl::int128 v) : v_(v) {}
  absl::int128 v_ = 0;
};

enum class UsageClass : std::uint8_t { AlwaysOn, AlwaysPlugged, Habitual };

[[nodiscard]] std::string_view to_string(UsageClass c) noexcept;
[[nodiscard]] std::optional<UsageClass> parse_usage_class(std::string_view s);

/// Weekly recurring usage span. When start > end the span wraps past
/// midnight and belongs to the day it starts on.
struct UsageEvent {
  std::string event_id;
  TimeOfDay start;
  TimeOfDay end;
  DaySet days;

  friend bool operator==(const UsageEvent&, const UsageEvent&) = default;
};

struct DeviceProfile {
  std::string device_id;
  std::string name;
  std::string category;  // appliance, vampire, lighting, ...
  UsageClass usage_class = UsageClass::Habitual;
  Power rated_power;
  Power standby_power;  // AlwaysPlugged only
  std::vector<UsageEvent> events;

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

enum class ProfileLabel : std::uint8_t { Base, WhatIf };

[[nodiscard]] std::string_view to_string(ProfileLabel l) noexcept;

struct HouseholdProfile {
  std::string profile_id;
  ProfileLabel label = ProfileLabel::Base;
  std::vector<DeviceProfile> devices;
  std::string plan_ref;

  [[nodiscard]] const DeviceProfile* find(std::string_view device_id) const;

  friend bool operator==(const HouseholdProfile&, const HouseholdProfile&) = default;
};

/// Throw Error(InvariantViolation) describing the first broken invariant.
void validate(const UsageEvent& event);
void validate(const DeviceProfile& device);
void validate(const HouseholdProfile& profile);

/// Half-open absolute intervals during which the device runs at rated
/// power inside `window`, merged and ordered. AlwaysOn yields the window.
[[nodiscard]] std::vector<TimeWindow> active_intervals(const DeviceProfile& device,
                                                       const TimeWindow& window, const Zone& zone);

[[nodiscard]] Energy device_energy_exact(const DeviceProfile& device, const TimeWindow& window,
                                         const Zone& zone);
[[nodiscard]] inline double device_energy(const DeviceProfile& device, const TimeWindow& window,
                                          const Zone& zone) {
  return device_energy_exact(device, window, zone).kwh();
}

/// Integrates power x rate on a grid of `step`-second slots aligned to the
/// Unix epoch; the energy inside each slot is priced at the slot start.
[[nodiscard]] Money device_cost_exact(const DeviceProfile& device, const TimeWindow& window,
                                      const TariffPlan& plan, const Zone& zone,
                                      Seconds step = Seconds{900});
[[nodiscard]] inline double device_cost(const DeviceProfile& device, const TimeWindow& window,
                                        const TariffPlan& plan, const Zone& zone,
                                        Seconds step = Seconds{900}) {
  return device_cost_exact(device, window, plan, zone, step).usd();
}

/// One weight on the scale: area = area_per_kwh x energy_kwh.
struct ScaleWeight {
  std::string device_id;
  std::string name;
  std::string category;
  double energy_kwh = 0.0;
  double cost_usd = 0.0;
  double area = 0.0;
  double radius = 0.0;
};

struct EvaluationOptions {
  Seconds step{900};
  double area_per_kwh = 1.0;
};

struct ProfileEnergy {
  Energy energy;
  Money money;
  double kwh = 0.0;
  double usd = 0.0;
  std::vector<ScaleWeight> per_device;
  std::map<std::string, double> per_category_kwh;
};

[[nodiscard]] ProfileEnergy profile_energy(const HouseholdProfile& profile,
                                           const TimeWindow& window, const TariffPlan& plan,
                                           const Zone& zone, const EvaluationOptions& options = {});

inline constexpr double kDefaultBalanceTolerance = 0.05;
inline constexpr double kBalanceEpsilon = 1e-9;

struct BalanceState {
  double measured_kwh = 0.0;
  double modeled_kwh = 0.0;
  double residual_kwh = 0.0;  // measured - modeled
  double imbalance_ratio = 0.0;
  double tolerance = kDefaultBalanceTolerance;
  bool balanced = false;
};

/// Throws Error(InvalidArgument) for negative or non-finite measured_kwh.
[[nodiscard]] BalanceState balance(double modeled_kwh, double measured_kwh,
                                   double tolerance = kDefaultBalanceTolerance);

/// Deep copy labeled WhatIf. An empty `new_id` derives one from the base id.
[[nodiscard]] HouseholdProfile clone_profile(const HouseholdProfile& base,
                                             std::string new_id = {});

struct ScenarioTotals {
  double kwh = 0.0;
  double usd = 0.0;
};

struct ScenarioDelta {
  ScenarioTotals base;
  ScenarioTotals whatif;
  double delta_kwh = 0.0;
  double delta_usd = 0.0;
};

/// Evaluates each profile under its own plan over the same window. Deltas
/// come from the exact integer totals, so equal profiles give exact zeros.
[[nodiscard]] ScenarioDelta compare_profiles(const HouseholdProfile& base,
                                             const TariffPlan& base_plan,
                                             const HouseholdProfile& whatif,
                                             const TariffPlan& whatif_plan,
                                             const TimeWindow& window, const Zone& zone,
                                             const EvaluationOptions& options = {});

// ---- editing ---------------------------------------------------------------

struct DevicePatch {
  std::optional<std::string> name;
  std::optional<std::string> category;
  std::optional<UsageClass> usage_class;
  std::optional<Power> rated_power;
  std::optional<Power> standby_power;
  std::optional<std::vector<UsageEvent>> events;
};

struct AddDevice {
  DeviceProfile device;
};
struct RemoveDevice {
  std::string device_id;
};
struct UpdateDevice {
  std::string device_id;
  DevicePatch patch;
};
struct AddEvent {
  std::string device_id;
  UsageEvent event;  // empty event_id gets a fresh one
};
struct RemoveEvent {
  std::string device_id;
  std::string event_id;
};

using ProfileEdit = std::variant<AddDevice, RemoveDevice, UpdateDevice, AddEvent, RemoveEvent>;

/// Applies edits all-or-nothing. Throws Error(UnknownDevice | UnknownEvent |
/// InvariantViolation); `profile` is untouched on failure.
void apply_edits(HouseholdProfile& profile, std::span<const ProfileEdit> edits);
inline void apply_edit(HouseholdProfile& profile, const ProfileEdit& edit) {
  apply_edits(profile, std::span<const ProfileEdit>(&edit, 1));
}

struct CatalogEntry {
  std::string name;
  std::string category;
  UsageClass usage_class = UsageClass::Habitual;
  Power rated_power;
  Power standby_power;
};

}  // namespace escout
