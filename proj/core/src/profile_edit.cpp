#include <algorithm>

#include "escout/error.hpp"
#include "escout/household_model.hpp"

namespace escout {

namespace {

DeviceProfile& device_or_throw(HouseholdProfile& profile, const std::string& id) {
  const auto it = std::find_if(profile.devices.begin(), profile.devices.end(),
                               [&](const DeviceProfile& d) { return d.device_id == id; });
  if (it == profile.devices.end()) {
    throw Error(Errc::UnknownDevice, "no device '" + id + "' in profile '" + profile.profile_id + "'");
  }
  return *it;
}

std::string fresh_event_id(const DeviceProfile& device) {
  for (std::size_t n = device.events.size() + 1;; ++n) {
    std::string id = "e" + std::to_string(n);
    const bool taken = std::any_of(device.events.begin(), device.events.end(),
                                   [&](const UsageEvent& e) { return e.event_id == id; });
    if (!taken) return id;
  }
}

struct Applier {
  HouseholdProfile& profile;

  void operator()(const AddDevice& op) const {
    if (profile.find(op.device.device_id) != nullptr) {
      throw Error(Errc::InvariantViolation, "device '" + op.device.device_id + "' already exists");
    }
    DeviceProfile d = op.device;
    for (UsageEvent& e : d.events) {
      if (e.event_id.empty()) e.event_id = fresh_event_id(d);
    }
    validate(d);
    profile.devices.push_back(std::move(d));
  }

  void operator()(const RemoveDevice& op) const {
    device_or_throw(profile, op.device_id);
    std::erase_if(profile.devices, [&](const DeviceProfile& d) { return d.device_id == op.device_id; });
  }

  void operator()(const UpdateDevice& op) const {
    DeviceProfile& d = device_or_throw(profile, op.device_id);
    DeviceProfile next = d;
    const DevicePatch& p = op.patch;
    if (p.name) next.name = *p.name;
    if (p.category) next.category = *p.category;
    if (p.usage_class) next.usage_class = *p.usage_class;
    if (p.rated_power) next.rated_power = *p.rated_power;
    if (p.standby_power) next.standby_power = *p.standby_power;
    if (p.events) {
      next.events = *p.events;
      for (UsageEvent& e : next.events) {
        if (e.event_id.empty()) e.event_id = fresh_event_id(next);
      }
    }
    validate(next);
    d = std::move(next);
  }

  void operator()(const AddEvent& op) const {
    DeviceProfile& d = device_or_throw(profile, op.device_id);
    UsageEvent e = op.event;
    if (e.event_id.empty()) e.event_id = fresh_event_id(d);
    validate(e);
    const bool taken = std::any_of(d.events.begin(), d.events.end(),
                                   [&](const UsageEvent& x) { return x.event_id == e.event_id; });
    if (taken) {
      throw Error(Errc::InvariantViolation,
                  "device '" + d.device_id + "' already has event '" + e.event_id + "'");
    }
    d.events.push_back(std::move(e));
  }

  void operator()(const RemoveEvent& op) const {
    DeviceProfile& d = device_or_throw(profile, op.device_id);
    const auto before = d.events.size();
    std::erase_if(d.events, [&](const UsageEvent& e) { return e.event_id == op.event_id; });
    if (d.events.size() == before) {
      throw Error(Errc::UnknownEvent,
                  "device '" + d.device_id + "' has no event '" + op.event_id + "'");
    }
  }
};

}  // namespace

void apply_edits(HouseholdProfile& profile, std::span<const ProfileEdit> edits) {
  HouseholdProfile working = profile;
  for (const ProfileEdit& edit : edits) std::visit(Applier{working}, edit);
  validate(working);
  profile = std::move(working);
}

}  // namespace escout
