#include "escout/codec.hpp"

#include <iterator>

#include "escout/error.hpp"

namespace escout {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::MalformedDocument, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string string_or(const Json& j, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  return string_field(j, key);
}

double number_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return number_field(j, key);
}

DaySet days_from_json(const Json& j) {
  if (!j.is_array()) bad("'days' must be an array of day names");
  DaySet days;
  for (const Json& d : j) {
    if (!d.is_string()) bad("day names must be strings");
    const auto wd = parse_weekday(d.get<std::string>());
    if (!wd) bad("unknown day '" + d.get<std::string>() + "'");
    days.insert(*wd);
  }
  return days;
}

Json days_to_json(DaySet days) {
  Json out = Json::array();
  for (int i = 0; i < 7; ++i) {
    const auto wd = static_cast<Weekday>(i);
    if (days.contains(wd)) out.push_back(std::string(to_string(wd)));
  }
  return out;
}

Json window_json(const TimeWindow& w, const Zone& zone) {
  return {{"start", format_rfc3339(w.start(), zone)}, {"end", format_rfc3339(w.end(), zone)}};
}

UsageClass usage_class_field(const Json& j, const char* key) {
  const std::string s = string_field(j, key);
  const auto c = parse_usage_class(s);
  if (!c) bad("unknown usage_class '" + s + "'");
  return *c;
}

template <typename F>
auto wrap_json_errors(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    bad(e.what());
  }
}

}  // namespace

Json parse_json(std::istream& in, std::string_view what) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_json(std::string_view(text), what);
}

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    bad(std::string(what) + ": " + e.what());
  }
}

// ---- tariff ----------------------------------------------------------------

TariffPlan tariff_from_json(const Json& j) {
  return wrap_json_errors([&] {
    std::vector<PeakPeriod> periods;
    if (j.contains("periods")) {
      const Json& ps = field(j, "periods");
      if (!ps.is_array()) bad("'periods' must be an array");
      for (const Json& p : ps) {
        PeakPeriod period;
        period.days = days_from_json(field(p, "days"));
        period.start = TimeOfDay::parse(string_field(p, "start"));
        period.end = TimeOfDay::parse(string_field(p, "end"));
        period.rate = Rate::usd_per_kwh(number_field(p, "rate"));
        periods.push_back(period);
      }
    }
    const std::string id = string_field(j, "plan_id");
    return TariffPlan(id, string_or(j, "name", id),
                      Rate::usd_per_kwh(number_field(j, "offpeak_rate")), std::move(periods));
  });
}

Json to_json(const TariffPlan& plan) {
  Json periods = Json::array();
  for (const PeakPeriod& p : plan.periods()) {
    periods.push_back({{"days", days_to_json(p.days)},
                       {"start", p.start.to_string()},
                       {"end", p.end.to_string()},
                       {"rate", p.rate.usd()}});
  }
  return {{"plan_id", plan.plan_id()},
          {"name", plan.name()},
          {"offpeak_rate", plan.offpeak_rate().usd()},
          {"periods", periods}};
}

// ---- household model ---------------------------------------------------------

UsageEvent usage_event_from_json(const Json& j) {
  return wrap_json_errors([&] {
    UsageEvent e;
    e.event_id = string_or(j, "event_id", "");
    e.start = TimeOfDay::parse(string_field(j, "start"));
    e.end = TimeOfDay::parse(string_field(j, "end"));
    e.days = days_from_json(field(j, "days"));
    return e;
  });
}

namespace {
std::vector<UsageEvent> events_from_json(const Json& j) {
  if (!j.is_array()) bad("'events' must be an array");
  std::vector<UsageEvent> out;
  for (const Json& e : j) out.push_back(usage_event_from_json(e));
  return out;
}
}  // namespace

DeviceProfile device_from_json(const Json& j) {
  return wrap_json_errors([&] {
    DeviceProfile d;
    d.device_id = string_field(j, "device_id");
    d.name = string_or(j, "name", d.device_id);
    d.category = string_or(j, "category", "appliance");
    d.usage_class = usage_class_field(j, "usage_class");
    d.rated_power = Power::kw(number_field(j, "rated_power"));
    d.standby_power = Power::kw(number_or(j, "standby_power", 0.0));
    if (j.contains("events")) d.events = events_from_json(j["events"]);
    return d;
  });
}

HouseholdProfile profile_from_json(const Json& j) {
  return wrap_json_errors([&] {
    HouseholdProfile p;
    p.profile_id = string_field(j, "profile_id");
    const std::string label = string_or(j, "label", "base");
    if (label == "base" || label == "Base") {
      p.label = ProfileLabel::Base;
    } else if (label == "whatif" || label == "WhatIf") {
      p.label = ProfileLabel::WhatIf;
    } else {
      bad("unknown profile label '" + label + "'");
    }
    p.plan_ref = string_or(j, "plan_ref", "");
    if (j.contains("devices")) {
      const Json& ds = j["devices"];
      if (!ds.is_array()) bad("'devices' must be an array");
      for (const Json& d : ds) p.devices.push_back(device_from_json(d));
    }
    validate(p);
    return p;
  });
}

std::vector<ProfileEdit> edits_from_json(const Json& j) {
  return wrap_json_errors([&] {
    const Json list = j.is_array() ? j : Json::array({j});
    std::vector<ProfileEdit> edits;
    for (const Json& e : list) {
      const std::string op = string_field(e, "op");
      if (op == "add_device") {
        edits.emplace_back(AddDevice{device_from_json(field(e, "device"))});
      } else if (op == "remove_device") {
        edits.emplace_back(RemoveDevice{string_field(e, "device_id")});
      } else if (op == "update_device") {
        const Json& set = field(e, "set");
        if (!set.is_object()) bad("'set' must be an object");
        DevicePatch patch;
        for (const auto& [key, value] : set.items()) {
          if (key == "name") patch.name = string_field(set, "name");
          else if (key == "category") patch.category = string_field(set, "category");
          else if (key == "usage_class") patch.usage_class = usage_class_field(set, "usage_class");
          else if (key == "rated_power") patch.rated_power = Power::kw(number_field(set, "rated_power"));
          else if (key == "standby_power") patch.standby_power = Power::kw(number_field(set, "standby_power"));
          else if (key == "events") patch.events = events_from_json(value);
          else bad("update_device cannot set '" + key + "'");
        }
        edits.emplace_back(UpdateDevice{string_field(e, "device_id"), std::move(patch)});
      } else if (op == "add_event") {
        edits.emplace_back(AddEvent{string_field(e, "device_id"),
                                    usage_event_from_json(field(e, "event"))});
      } else if (op == "remove_event") {
        edits.emplace_back(RemoveEvent{string_field(e, "device_id"), string_field(e, "event_id")});
      } else {
        bad("unknown edit op '" + op + "'");
      }
    }
    return edits;
  });
}

std::vector<CatalogEntry> catalog_from_json(const Json& j) {
  return wrap_json_errors([&] {
    if (!j.is_array()) bad("device catalog must be a JSON list");
    std::vector<CatalogEntry> out;
    for (const Json& e : j) {
      CatalogEntry c;
      c.name = string_field(e, "name");
      c.category = string_or(e, "category", "appliance");
      c.usage_class = e.contains("usage_class") ? usage_class_field(e, "usage_class")
                                                : UsageClass::Habitual;
      c.rated_power = Power::kw(number_field(e, "rated_power"));
      c.standby_power = Power::kw(number_or(e, "standby_power", 0.0));
      out.push_back(std::move(c));
    }
    return out;
  });
}

Json to_json(const UsageEvent& e) {
  return {{"event_id", e.event_id},
          {"start", e.start.to_string()},
          {"end", e.end.to_string()},
          {"days", days_to_json(e.days)}};
}

Json to_json(const DeviceProfile& d) {
  Json events = Json::array();
  for (const UsageEvent& e : d.events) events.push_back(to_json(e));
  return {{"device_id", d.device_id},
          {"name", d.name},
          {"category", d.category},
          {"usage_class", std::string(to_string(d.usage_class))},
          {"rated_power", d.rated_power.kw()},
          {"standby_power", d.standby_power.kw()},
          {"events", events}};
}

Json to_json(const HouseholdProfile& p) {
  Json devices = Json::array();
  for (const DeviceProfile& d : p.devices) devices.push_back(to_json(d));
  return {{"profile_id", p.profile_id},
          {"label", std::string(to_string(p.label))},
          {"plan_ref", p.plan_ref},
          {"devices", devices}};
}

Json to_json(const CatalogEntry& c) {
  return {{"name", c.name},
          {"category", c.category},
          {"usage_class", std::string(to_string(c.usage_class))},
          {"rated_power", c.rated_power.kw()},
          {"standby_power", c.standby_power.kw()}};
}

Json to_json(const ProfileEnergy& e) {
  Json devices = Json::array();
  for (const ScaleWeight& w : e.per_device) {
    devices.push_back({{"device_id", w.device_id},
                       {"name", w.name},
                       {"category", w.category},
                       {"energy_kwh", w.energy_kwh},
                       {"cost_usd", w.cost_usd},
                       {"area", w.area},
                       {"radius", w.radius}});
  }
  Json categories = Json::object();
  for (const auto& [k, v] : e.per_category_kwh) categories[k] = v;
  return {{"kwh", e.kwh}, {"usd", e.usd}, {"per_device", devices}, {"per_category_kwh", categories}};
}

Json to_json(const BalanceState& b) {
  return {{"measured_kwh", b.measured_kwh}, {"modeled_kwh", b.modeled_kwh},
          {"residual_kwh", b.residual_kwh}, {"imbalance_ratio", b.imbalance_ratio},
          {"tolerance", b.tolerance},       {"balanced", b.balanced}};
}

Json to_json(const ScenarioDelta& d) {
  return {{"base", {{"kwh", d.base.kwh}, {"usd", d.base.usd}}},
          {"whatif", {{"kwh", d.whatif.kwh}, {"usd", d.whatif.usd}}},
          {"delta_kwh", d.delta_kwh},
          {"delta_usd", d.delta_usd}};
}

// ---- context -----------------------------------------------------------------

Json to_json(const CalendarEvent& e, const Zone& zone) {
  return {{"event_id", e.event_id},
          {"title", e.title},
          {"start", format_rfc3339(e.start, zone)},
          {"end", format_rfc3339(e.end, zone)},
          {"source", e.source == EventSource::Imported ? "imported" : "annotation"},
          {"all_day", e.all_day}};
}

Json to_json(const Annotation& a, const Zone& zone) {
  return {{"id", a.annotation_id},
          {"at", format_rfc3339(a.at, zone)},
          {"text", a.text},
          {"created", format_rfc3339(a.created, zone)}};
}

Json to_json(const ContextOverlay& o, const Zone& zone) {
  Json cells = Json::array();
  for (const WeatherCell& c : o.weather_cells) {
    Json cell = {{"cell_start", format_rfc3339(c.start, zone)},
                 {"cell_end", format_rfc3339(c.end, zone)},
                 {"sample_count", c.sample_count},
                 {"mean_temp", nullptr},
                 {"mean_humidity", nullptr},
                 {"dominant_condition", nullptr}};
    if (c.mean_temp_c) cell["mean_temp"] = *c.mean_temp_c;
    if (c.mean_humidity_pct) cell["mean_humidity"] = *c.mean_humidity_pct;
    if (c.dominant_condition) cell["dominant_condition"] = std::string(to_string(*c.dominant_condition));
    cells.push_back(std::move(cell));
  }
  Json events = Json::array();
  for (const CalendarEvent& e : o.events) events.push_back(to_json(e, zone));
  Json notes = Json::array();
  for (const Annotation& a : o.annotations) notes.push_back(to_json(a, zone));
  return {{"window", window_json(o.window, zone)},
          {"granularity", std::string(to_string(o.granularity))},
          {"weather_cells", cells},
          {"events", events},
          {"annotations", notes}};
}

// ---- series views ------------------------------------------------------------

std::optional<CostUnits> parse_cost_units(std::string_view s) {
  if (s.empty() || s == "kwh") return CostUnits::Kwh;
  if (s == "usd" || s == "$") return CostUnits::Usd;
  return std::nullopt;
}

Json to_json(const WindowView& view, const Zone& zone) {
  const FocusMap& map = *view.map;
  const bool usd = view.units == CostUnits::Usd;
  Json buckets = Json::array();
  for (const FocusBucket& b : map.buckets) {
    Json jb = {{"bucket_start", format_rfc3339(b.start, zone)},
               {"count", b.count},
               {"sum", usd ? b.sum_usd : b.sum_kwh}};
    if (map.labeled) {
      jb["peak"] = usd ? b.peak_usd : b.peak_kwh;
      jb["offpeak"] = usd ? b.offpeak_usd : b.offpeak_kwh;
    }
    buckets.push_back(std::move(jb));
  }
  return {{"window", window_json(map.window, zone)},
          {"bucket_span", map.bucket_span.count()},
          {"units", usd ? "usd" : "kwh"},
          {"labeled", map.labeled},
          {"plan", view.plan ? Json(view.plan->plan_id()) : Json(nullptr)},
          {"coverage", view.coverage},
          {"max_points", view.max_points},
          {"requested_points", view.requested_points},
          {"clamped", view.clamped},
          {"buckets", buckets}};
}

Json to_json(const AggregateSpec& spec, const AggregateResult& result, const Zone& zone) {
  Json bins = Json::array();
  for (const BinSummary& b : result.bins) {
    bins.push_back({{"bin_index", b.bin_index},
                    {"label", spec.scheme.label(b.bin_index)},
                    {"mean_kwh", b.mean_kwh},
                    {"peak_kwh", b.peak_kwh},
                    {"offpeak_kwh", b.offpeak_kwh},
                    {"sample_count", b.sample_count},
                    {"instance_count", b.instance_count},
                    {"coverage", b.coverage}});
  }
  return {{"scheme", std::string(spec.scheme.name())},
          {"cells", spec.scheme.cells()},
          {"filter", spec.filter.to_string()},
          {"window", window_json(spec.window, zone)},
          {"plan", spec.plan ? Json(spec.plan->plan_id()) : Json(nullptr)},
          {"bins", bins},
          {"warnings", result.warnings}};
}

Json to_json(const AggregateSpec& main, const AggregateSpec& baseline, const Comparison& cmp,
             const Zone& zone) {
  return {{"main", to_json(main, cmp.main, zone)},
          {"baseline", to_json(baseline, cmp.baseline, zone)}};
}

Json to_json(const SpiralGrid& grid, const Zone& zone) {
  Json rings = Json::array();
  for (const SpiralRing& r : grid.rings) {
    Json cells = Json::array();
    for (const auto& c : r.cells) cells.push_back(c ? Json(*c) : Json(nullptr));
    rings.push_back({{"start", format_rfc3339(r.start, zone)}, {"cells", cells}});
  }
  return {{"period", std::string(to_string(grid.period))},
          {"cells_per_period", grid.cells_per_period},
          {"rings", rings}};
}

}  // namespace escout
