#include <algorithm>

#include "escout/aggregation.hpp"
#include "escout/error.hpp"
#include "escout/service.hpp"
#include "../text.hpp"

namespace escout {

namespace {

std::optional<std::string> param(const Request& r, const std::string& key) {
  const auto it = r.query.find(key);
  if (it == r.query.end()) return std::nullopt;
  return it->second;
}

// Prefixed parameter, falling back to the unprefixed one.
std::optional<std::string> param(const Request& r, const std::string& prefix,
                                 const std::string& key) {
  if (!prefix.empty()) {
    if (auto v = param(r, prefix + key)) return v;
  }
  return param(r, key);
}

std::string require_param(const Request& r, const std::string& key) {
  auto v = param(r, key);
  if (!v || v->empty()) throw Error(Errc::InvalidArgument, "missing parameter '" + key + "'");
  return *v;
}

long long int_param(const std::string& key, const std::string& text) {
  const auto v = detail::parse_int(text);
  if (!v) throw Error(Errc::InvalidArgument, "parameter '" + key + "' must be an integer");
  return *v;
}

double double_param(const std::string& key, const std::string& text) {
  const auto v = detail::parse_double(text);
  if (!v) throw Error(Errc::InvalidArgument, "parameter '" + key + "' must be a number");
  return *v;
}

std::vector<std::string> segments(std::string_view path) {
  std::vector<std::string> out;
  for (std::string_view s : detail::split(path, '/')) {
    if (!s.empty()) out.emplace_back(s);
  }
  return out;
}

Json window_json(const TimeWindow& w, const Zone& zone) {
  return {{"start", format_rfc3339(w.start(), zone)}, {"end", format_rfc3339(w.end(), zone)}};
}

Response error_response(int status, std::string_view code, const std::string& message) {
  return {status, {{"error", std::string(code)}, {"message", message}}};
}

Response forbidden(std::string_view what) {
  return error_response(403, "Forbidden",
                        std::string(what) + " requires the advanced perspective");
}

Json body_json(const Request& r) {
  if (detail::trim(r.body).empty()) return Json::object();
  return parse_json(std::string_view(r.body), "request body");
}

}  // namespace

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownProfile:
    case Errc::UnknownPlan:
    case Errc::UnknownSeries:
      return 404;
    case Errc::InvariantViolation:
    case Errc::UnknownDevice:
    case Errc::UnknownEvent:
      return 422;
    case Errc::Io:
      return 500;
    default:
      return 400;
  }
}

Perspective perspective_of(const Request& r) {
  const auto is_advanced = [](std::string_view v) { return detail::iequals(detail::trim(v), "advanced"); };
  if (auto q = param(r, "perspective"); q && is_advanced(*q)) return Perspective::Advanced;
  if (const auto it = r.headers.find("x-perspective"); it != r.headers.end() && is_advanced(it->second)) {
    return Perspective::Advanced;
  }
  return Perspective::Basic;
}

Api::Api(ApiConfig config) : Api(config, load_data(config)) {}

Api::Api(ApiConfig config, DataSet data)
    : config_(std::move(config)),
      zone_(data.zone),
      plans_(std::move(data.plans)),
      weather_(std::move(data.weather)),
      events_(std::move(data.events)),
      catalog_(std::move(data.catalog)),
      profiles_(config_.profiles_dir),
      annotations_(config_.annotations_file, data.zone) {
  validate(config_);
  if (data.series) series_.install(std::move(data.series));
  if (!config_.default_plan.empty() && plan_by_id(config_.default_plan) == nullptr) {
    throw Error(Errc::UnknownPlan, "default plan '" + config_.default_plan + "' is not in the tariff file");
  }
}

Response Api::handle(const Request& request) {
  try {
    return dispatch(request);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const Json::exception& e) {
    return error_response(400, "MalformedDocument", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

Response Api::dispatch(const Request& r) {
  const auto seg = segments(r.path);
  const std::string& m = r.method;
  const auto not_allowed = [&] { return error_response(405, "MethodNotAllowed", m + " " + r.path); };
  if (seg.size() < 2 || seg[0] != "api") return error_response(404, "NotFound", r.path);
  const std::string& head = seg[1];

  if (head == "series" && seg.size() == 3) {
    if (m != "GET") return not_allowed();
    if (seg[2] == "window") return series_window(r);
    if (seg[2] == "info") return series_info(r);
  } else if (head == "aggregate") {
    if (m != "GET") return not_allowed();
    if (seg.size() == 2) return aggregate_one(r);
    if (seg.size() == 3 && seg[2] == "compare") return aggregate_compare(r);
  } else if (head == "spiral" && seg.size() == 2) {
    if (m != "GET") return not_allowed();
    return spiral_grid(r);
  } else if (head == "context" && seg.size() == 2) {
    if (m != "GET") return not_allowed();
    return context(r);
  } else if (head == "annotations") {
    if (seg.size() == 2 && m == "GET") return annotations_get(r);
    if (seg.size() == 2 && m == "POST") return annotations_post(r);
    if (seg.size() == 3 && m == "DELETE") return annotations_delete(seg[2]);
    return not_allowed();
  } else if (head == "profiles") {
    if (seg.size() == 2) {
      if (m == "GET") return profiles_list();
      if (m == "POST") return profiles_post(r);
      if (m == "PATCH") {
        const Json body = body_json(r);
        if (!body.is_object() || !body.contains("profile_id")) {
          throw Error(Errc::InvalidArgument, "PATCH /api/profiles needs a body with profile_id and edits");
        }
        return profiles_patch(body.at("profile_id").get<std::string>(), r);
      }
      return not_allowed();
    }
    if (seg.size() == 3) {
      if (m == "GET") return profile_get(seg[2]);
      if (m == "PATCH") return profiles_patch(seg[2], r);
      return not_allowed();
    }
    if (seg.size() == 4 && seg[3] == "clone") {
      if (m != "POST") return not_allowed();
      return profile_clone(seg[2], r);
    }
    if (seg.size() == 4 && seg[3] == "evaluate") {
      if (m != "GET") return not_allowed();
      return profile_evaluate(seg[2], r);
    }
  } else if (head == "whatif" && seg.size() == 3 && seg[2] == "compare") {
    if (m != "GET") return not_allowed();
    return whatif_compare(r);
  } else if (head == "balance" && seg.size() == 2) {
    if (m != "GET") return not_allowed();
    return balance_get(r);
  } else if (head == "catalog" && seg.size() == 2) {
    if (m != "GET") return not_allowed();
    return catalog_get();
  } else if (head == "tariffs" && seg.size() == 2) {
    if (m != "GET") return not_allowed();
    return tariffs_get();
  }
  return error_response(404, "NotFound", r.path);
}

// ---- helpers -----------------------------------------------------------------

SeriesHandle Api::require_series(const Request& r) const {
  SeriesHandle s = series_.current();
  if (!s) throw Error(Errc::UnknownSeries, "no meter series is loaded");
  if (auto id = param(r, "series"); id && *id != s->household_id()) {
    throw Error(Errc::UnknownSeries, "no series '" + *id + "'");
  }
  return s;
}

const TariffPlan* Api::plan_by_id(const std::string& id) const {
  const auto it = std::find_if(plans_.begin(), plans_.end(),
                               [&](const TariffPlan& p) { return p.plan_id() == id; });
  return it == plans_.end() ? nullptr : &*it;
}

const TariffPlan* Api::request_plan(const Request& r, const std::string& key) const {
  if (auto id = param(r, key); id && !id->empty()) {
    const TariffPlan* p = plan_by_id(*id);
    if (p == nullptr) throw Error(Errc::UnknownPlan, "no tariff plan '" + *id + "'");
    return p;
  }
  if (!config_.default_plan.empty()) return plan_by_id(config_.default_plan);
  return plans_.empty() ? nullptr : &plans_.front();
}

const TariffPlan& Api::profile_plan(const HouseholdProfile& p) const {
  if (!p.plan_ref.empty()) {
    const TariffPlan* plan = plan_by_id(p.plan_ref);
    if (plan == nullptr) {
      throw Error(Errc::UnknownPlan, "profile '" + p.profile_id + "' refers to unknown plan '" + p.plan_ref + "'");
    }
    return *plan;
  }
  const TariffPlan* plan = request_plan(Request{}, "plan");
  if (plan == nullptr) throw Error(Errc::UnknownPlan, "no tariff plan is configured");
  return *plan;
}

ProfileStore::Handle Api::require_profile(const std::string& id) const {
  auto p = profiles_.get(id);
  if (!p) throw Error(Errc::UnknownProfile, "no profile '" + id + "'");
  return p;
}

TimeWindow Api::request_window(const Request& r, const std::string& prefix) const {
  const auto instant = [&](const std::string& key) -> std::optional<Instant> {
    const auto text = param(r, prefix, key);
    if (!text) return std::nullopt;
    const auto t = parse_timestamp(*text, zone_);
    if (!t) throw Error(Errc::InvalidArgument, "parameter '" + key + "' is not an RFC 3339 instant");
    return t;
  };
  auto start = instant("start");
  auto end = instant("end");
  if (!start || !end) {
    const SeriesHandle s = series_.current();
    const auto extent = s ? s->extent() : std::nullopt;
    if (!extent) throw Error(Errc::InvalidArgument, "start and end are required");
    if (!start) start = extent->start();
    if (!end) end = extent->end();
  }
  return TimeWindow(*start, *end);
}

// ---- series --------------------------------------------------------------------

Response Api::series_window(const Request& r) {
  const SeriesHandle s = require_series(r);
  const TimeWindow window = request_window(r);
  std::size_t requested = config_.default_max_points;
  if (auto mp = param(r, "max_points")) {
    const long long v = int_param("max_points", *mp);
    if (v < 2) throw Error(Errc::InvalidMaxPoints, "max_points must be at least 2");
    requested = static_cast<std::size_t>(v);
  }
  const bool clamped = requested > config_.max_points_cap;
  const std::size_t max_points = clamped ? config_.max_points_cap : requested;
  const auto units = parse_cost_units(param(r, "cost_units").value_or(""));
  if (!units) throw Error(Errc::InvalidArgument, "cost_units must be kwh or usd");
  const TariffPlan* plan = request_plan(r, "plan");
  if (*units == CostUnits::Usd && plan == nullptr) {
    throw Error(Errc::InvalidArgument, "cost_units=usd needs a tariff plan");
  }
  const FocusMap map = downsample(*s, window, max_points, plan);
  WindowView view;
  view.map = &map;
  view.plan = plan;
  view.units = *units;
  view.coverage = coverage(*s, window);
  view.requested_points = requested;
  view.max_points = max_points;
  view.clamped = clamped;
  return {200, to_json(view, zone_)};
}

Response Api::series_info(const Request& r) {
  const SeriesHandle s = require_series(r);
  const auto extent = s->extent();
  Json gaps = Json::array();
  for (const Gap& g : find_gaps(*s)) {
    gaps.push_back({{"start", format_rfc3339(g.start, zone_)},
                    {"end", format_rfc3339(g.end, zone_)},
                    {"missing", g.missing}});
  }
  return {200,
          {{"household_id", s->household_id()},
           {"timezone", zone_.name()},
           {"interval_seconds", s->interval().count()},
           {"readings", s->size()},
           {"extent", extent ? window_json(*extent, zone_) : Json(nullptr)},
           {"coverage", extent ? coverage(*s, *extent) : 0.0},
           {"gaps", gaps}}};
}

// ---- aggregates ----------------------------------------------------------------

namespace {

AggregateSpec spec_from(const Request& r, const std::string& prefix, TimeWindow window,
                        const TariffPlan* plan) {
  const std::string scheme = param(r, prefix, "scheme").value_or("hour_of_day");
  int cells = 0;
  if (auto c = param(r, prefix, "cells"); c && !c->empty()) {
    cells = static_cast<int>(int_param(prefix + "cells", *c));
  }
  return AggregateSpec{window, BinScheme::parse(scheme, cells),
                       AggFilter::parse(param(r, prefix, "filter").value_or("")), plan};
}

}  // namespace

Response Api::aggregate_one(const Request& r) {
  const SeriesHandle s = require_series(r);
  const AggregateSpec spec = spec_from(r, "", request_window(r), request_plan(r, "plan"));
  return {200, to_json(spec, aggregate(*s, spec), zone_)};
}

Response Api::aggregate_compare(const Request& r) {
  const SeriesHandle s = require_series(r);
  const auto plan_for = [&](const std::string& prefix) {
    return param(r, prefix + "plan") ? request_plan(r, prefix + "plan") : request_plan(r, "plan");
  };
  const AggregateSpec main = spec_from(r, "main_", request_window(r, "main_"), plan_for("main_"));
  const AggregateSpec base =
      spec_from(r, "baseline_", request_window(r, "baseline_"), plan_for("baseline_"));
  const Comparison cmp = compare(main, base, *s);
  return {200, to_json(main, base, cmp, zone_)};
}

Response Api::spiral_grid(const Request& r) {
  if (perspective_of(r) != Perspective::Advanced) return forbidden("the spiral view");
  const SeriesHandle s = require_series(r);
  const std::string name = param(r, "period").value_or("day");
  const auto period = parse_spiral_period(name);
  if (!period) throw Error(Errc::UnsupportedPeriodCells, "unknown spiral period '" + name + "'");
  int cells = *period == SpiralPeriod::Day ? 24 : *period == SpiralPeriod::Week ? 7 : 12;
  if (auto c = param(r, "cells"); c && !c->empty()) cells = static_cast<int>(int_param("cells", *c));
  return {200, to_json(spiral(*s, request_window(r), *period, cells), zone_)};
}

// ---- context -------------------------------------------------------------------

Response Api::context(const Request& r) {
  const TimeWindow window = request_window(r);
  std::size_t zoom = 1;
  if (auto z = param(r, "zoom_hint")) {
    const long long v = int_param("zoom_hint", *z);
    if (v < 1) throw Error(Errc::InvalidArgument, "zoom_hint must be at least 1");
    zoom = static_cast<std::size_t>(v);
  }
  const auto notes = annotations_.list(window);
  return {200, to_json(window_context(window, weather_, events_, notes, zoom, zone_), zone_)};
}

Response Api::annotations_post(const Request& r) {
  const Json body = body_json(r);
  if (!body.is_object() || !body.contains("at") || !body.contains("text") ||
      !body["at"].is_string() || !body["text"].is_string()) {
    throw Error(Errc::InvalidArgument, "annotation body must be {at, text}");
  }
  const auto at = parse_timestamp(body["at"].get<std::string>(), zone_);
  if (!at) throw Error(Errc::InvalidArgument, "'at' is not an RFC 3339 instant");
  return {201, to_json(annotations_.add(*at, body["text"].get<std::string>()), zone_)};
}

Response Api::annotations_get(const Request& r) {
  const bool windowed = param(r, "start") || param(r, "end");
  const auto items = windowed ? annotations_.list(request_window(r)) : annotations_.all();
  Json out = Json::array();
  for (const Annotation& a : items) out.push_back(to_json(a, zone_));
  return {200, out};
}

Response Api::annotations_delete(const std::string& id) {
  if (!annotations_.remove(id)) return error_response(404, "UnknownAnnotation", "no annotation '" + id + "'");
  return {200, {{"deleted", id}}};
}

// ---- profiles --------------------------------------------------------------------

Response Api::profiles_list() {
  Json out = Json::array();
  for (const auto& p : profiles_.list()) out.push_back(to_json(*p));
  return {200, out};
}

Response Api::profile_get(const std::string& id) { return {200, to_json(*require_profile(id))}; }

Response Api::profiles_post(const Request& r) {
  HouseholdProfile p = profile_from_json(body_json(r));
  if (profiles_.get(p.profile_id)) {
    return error_response(409, "Conflict", "profile '" + p.profile_id + "' already exists");
  }
  return {201, to_json(*profiles_.create(std::move(p)))};
}

Response Api::profiles_patch(const std::string& id, const Request& r) {
  const Json body = body_json(r);
  const Json& list = body.is_object() && body.contains("edits") ? body["edits"] : body;
  const std::vector<ProfileEdit> edits = edits_from_json(list);
  const auto updated = profiles_.update(id, [&](HouseholdProfile& p) {
    apply_edits(p, edits);
    if (body.is_object() && body.contains("plan_ref")) p.plan_ref = body["plan_ref"].get<std::string>();
  });
  return {200, to_json(*updated)};
}

Response Api::profile_clone(const std::string& id, const Request& r) {
  const auto base = require_profile(id);
  const Json body = body_json(r);
  std::string new_id;
  if (body.is_object() && body.contains("profile_id")) new_id = body["profile_id"].get<std::string>();
  if (!new_id.empty() && profiles_.get(new_id)) {
    return error_response(409, "Conflict", "profile '" + new_id + "' already exists");
  }
  return {201, to_json(*profiles_.create(clone_profile(*base, new_id)))};
}

namespace {
EvaluationOptions evaluation_options(const Request& r) {
  EvaluationOptions o;
  if (auto a = param(r, "area_per_kwh")) o.area_per_kwh = double_param("area_per_kwh", *a);
  return o;
}
}  // namespace

Response Api::profile_evaluate(const std::string& id, const Request& r) {
  if (perspective_of(r) != Perspective::Advanced) return forbidden("profile evaluation");
  const auto p = require_profile(id);
  const TimeWindow window = request_window(r);
  const TariffPlan& plan = param(r, "plan") ? *request_plan(r, "plan") : profile_plan(*p);
  Json out = to_json(profile_energy(*p, window, plan, zone_, evaluation_options(r)));
  out["profile_id"] = p->profile_id;
  out["plan"] = plan.plan_id();
  out["window"] = window_json(window, zone_);
  return {200, out};
}

Response Api::whatif_compare(const Request& r) {
  if (perspective_of(r) != Perspective::Advanced) return forbidden("what-if comparison");
  const auto base = require_profile(require_param(r, "base"));
  const auto whatif = require_profile(require_param(r, "whatif"));
  const TimeWindow window = request_window(r);
  const TariffPlan& base_plan = param(r, "base_plan") ? *request_plan(r, "base_plan") : profile_plan(*base);
  const TariffPlan& whatif_plan =
      param(r, "whatif_plan") ? *request_plan(r, "whatif_plan") : profile_plan(*whatif);
  Json out = to_json(compare_profiles(*base, base_plan, *whatif, whatif_plan, window, zone_,
                                      evaluation_options(r)));
  out["base"]["profile_id"] = base->profile_id;
  out["base"]["plan"] = base_plan.plan_id();
  out["whatif"]["profile_id"] = whatif->profile_id;
  out["whatif"]["plan"] = whatif_plan.plan_id();
  out["window"] = window_json(window, zone_);
  return {200, out};
}

Response Api::balance_get(const Request& r) {
  if (perspective_of(r) != Perspective::Advanced) return forbidden("the balance view");
  const auto p = require_profile(require_param(r, "profile"));
  const SeriesHandle s = require_series(r);
  const TimeWindow window = request_window(r);
  double tolerance = config_.balance_tolerance;
  if (auto t = param(r, "tolerance")) tolerance = double_param("tolerance", *t);
  const ProfileEnergy modeled = profile_energy(*p, window, profile_plan(*p), zone_, evaluation_options(r));
  Json out = to_json(balance(modeled.kwh, window_total(*s, window), tolerance));
  out["profile_id"] = p->profile_id;
  out["window"] = window_json(window, zone_);
  return {200, out};
}

Response Api::catalog_get() {
  Json out = Json::array();
  for (const CatalogEntry& c : catalog_) out.push_back(to_json(c));
  return {200, out};
}

Response Api::tariffs_get() {
  Json out = Json::array();
  for (const TariffPlan& p : plans_) out.push_back(to_json(p));
  return {200, out};
}

}  // namespace escout
