#pragma once

// JSON encodings of the domain types. The service and the CLI both build
// their bodies through these functions, so their outputs agree.

#include <nlohmann/json.hpp>

#include <istream>
#include <string_view>
#include <vector>

#include "escout/aggregation.hpp"
#include "escout/context.hpp"
#include "escout/household_model.hpp"
#include "escout/meter_store.hpp"
#include "escout/tariff.hpp"

namespace escout {

using Json = nlohmann::json;

/// Parses a whole JSON document; throws Error(MalformedDocument).
[[nodiscard]] Json parse_json(std::istream& in, std::string_view what);
[[nodiscard]] Json parse_json(std::string_view text, std::string_view what);

// tariff
[[nodiscard]] TariffPlan tariff_from_json(const Json& j);
[[nodiscard]] Json to_json(const TariffPlan& plan);

// household model
[[nodiscard]] UsageEvent usage_event_from_json(const Json& j);
[[nodiscard]] DeviceProfile device_from_json(const Json& j);
[[nodiscard]] HouseholdProfile profile_from_json(const Json& j);
[[nodiscard]] std::vector<ProfileEdit> edits_from_json(const Json& j);
[[nodiscard]] std::vector<CatalogEntry> catalog_from_json(const Json& j);
[[nodiscard]] Json to_json(const UsageEvent& e);
[[nodiscard]] Json to_json(const DeviceProfile& d);
[[nodiscard]] Json to_json(const HouseholdProfile& p);
[[nodiscard]] Json to_json(const CatalogEntry& c);
[[nodiscard]] Json to_json(const ProfileEnergy& e);
[[nodiscard]] Json to_json(const BalanceState& b);
[[nodiscard]] Json to_json(const ScenarioDelta& d);

// context
[[nodiscard]] Json to_json(const CalendarEvent& e, const Zone& zone);
[[nodiscard]] Json to_json(const Annotation& a, const Zone& zone);
[[nodiscard]] Json to_json(const ContextOverlay& o, const Zone& zone);

// series views
enum class CostUnits { Kwh, Usd };
[[nodiscard]] std::optional<CostUnits> parse_cost_units(std::string_view s);

struct WindowView {
  const FocusMap* map = nullptr;
  const TariffPlan* plan = nullptr;
  CostUnits units = CostUnits::Kwh;
  double coverage = 0.0;
  std::size_t requested_points = 0;
  std::size_t max_points = 0;
  bool clamped = false;
};
[[nodiscard]] Json to_json(const WindowView& view, const Zone& zone);

[[nodiscard]] Json to_json(const AggregateSpec& spec, const AggregateResult& result,
                           const Zone& zone);
[[nodiscard]] Json to_json(const AggregateSpec& main, const AggregateSpec& baseline,
                           const Comparison& cmp, const Zone& zone);
[[nodiscard]] Json to_json(const SpiralGrid& grid, const Zone& zone);

}  // namespace escout
