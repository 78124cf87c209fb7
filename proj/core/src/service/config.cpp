#include <cstdlib>
#include <fstream>

#include "escout/error.hpp"
#include "escout/service.hpp"
#include "../text.hpp"

namespace escout {

namespace fs = std::filesystem;

namespace {

std::ifstream open_or_throw(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + p.string());
  return in;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::size_t positive_size(const Json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(Errc::InvalidArgument, std::string("config '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::size_t size_from_env(const std::string& s, const char* name) {
  const auto v = detail::parse_int(s);
  if (!v || *v < 0) throw Error(Errc::InvalidArgument, std::string(name) + " must be a non-negative integer");
  return static_cast<std::size_t>(*v);
}

}  // namespace

ApiConfig load_config(const fs::path& file) {
  std::ifstream in = open_or_throw(file);
  const Json j = parse_json(in, file.string());
  if (!j.is_object()) throw Error(Errc::MalformedDocument, "config must be a JSON object");
  const fs::path base = file.parent_path();
  ApiConfig c;
  try {
    if (j.contains("host")) c.host = j.at("host").get<std::string>();
    if (j.contains("port")) c.port = j.at("port").get<int>();
    if (j.contains("timezone")) c.timezone = j.at("timezone").get<std::string>();
    if (j.contains("interval_seconds")) c.interval = Seconds{positive_size(j.at("interval_seconds"), "interval_seconds")};
    if (j.contains("household_id")) c.household_id = j.at("household_id").get<std::string>();
    if (j.contains("default_plan")) c.default_plan = j.at("default_plan").get<std::string>();
    if (j.contains("max_points_cap")) c.max_points_cap = positive_size(j.at("max_points_cap"), "max_points_cap");
    if (j.contains("default_max_points")) c.default_max_points = positive_size(j.at("default_max_points"), "default_max_points");
    if (j.contains("balance_tolerance")) c.balance_tolerance = j.at("balance_tolerance").get<double>();
    if (j.contains("log_requests")) c.log_requests = j.at("log_requests").get<bool>();
    const Json data = j.value("data", Json::object());
    const auto path_of = [&](const char* key, std::optional<fs::path>& out) {
      if (data.contains(key)) out = resolve(base, data.at(key).get<std::string>());
    };
    path_of("meter", c.meter_csv);
    path_of("tariff", c.tariff_json);
    path_of("weather", c.weather_csv);
    path_of("calendar", c.calendar_ics);
    path_of("profiles_dir", c.profiles_dir);
    path_of("catalog", c.catalog_json);
    path_of("annotations", c.annotations_file);
    path_of("static_dir", c.static_dir);
  } catch (const Json::exception& e) {
    throw Error(Errc::MalformedDocument, std::string("config: ") + e.what());
  }
  return c;
}

void apply_env_overrides(ApiConfig& c, const EnvLookup& env) {
  const auto str = [&](const char* name, std::string& out) {
    if (auto v = env(name)) out = *v;
  };
  const auto path = [&](const char* name, std::optional<fs::path>& out) {
    if (auto v = env(name)) out = fs::path(*v);
  };
  str("ESCOUT_HOST", c.host);
  if (auto v = env("ESCOUT_PORT")) c.port = static_cast<int>(size_from_env(*v, "ESCOUT_PORT"));
  path("ESCOUT_METER", c.meter_csv);
  path("ESCOUT_TARIFF", c.tariff_json);
  path("ESCOUT_WEATHER", c.weather_csv);
  path("ESCOUT_CALENDAR", c.calendar_ics);
  path("ESCOUT_PROFILES_DIR", c.profiles_dir);
  path("ESCOUT_CATALOG", c.catalog_json);
  path("ESCOUT_ANNOTATIONS", c.annotations_file);
  path("ESCOUT_STATIC_DIR", c.static_dir);
  str("ESCOUT_TZ", c.timezone);
  str("ESCOUT_HOUSEHOLD", c.household_id);
  str("ESCOUT_DEFAULT_PLAN", c.default_plan);
  if (auto v = env("ESCOUT_INTERVAL")) c.interval = Seconds{size_from_env(*v, "ESCOUT_INTERVAL")};
  if (auto v = env("ESCOUT_MAX_POINTS_CAP")) c.max_points_cap = size_from_env(*v, "ESCOUT_MAX_POINTS_CAP");
  if (auto v = env("ESCOUT_BALANCE_TOLERANCE")) {
    const auto d = detail::parse_double(*v);
    if (!d) throw Error(Errc::InvalidArgument, "ESCOUT_BALANCE_TOLERANCE must be a number");
    c.balance_tolerance = *d;
  }
}

void apply_env_overrides(ApiConfig& c) {
  apply_env_overrides(c, [](const char* name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name)) return std::string(v);
    return std::nullopt;
  });
}

void validate(const ApiConfig& c) {
  if (c.max_points_cap < 2) throw Error(Errc::InvalidArgument, "max_points_cap must be at least 2");
  if (c.default_max_points < 2) throw Error(Errc::InvalidArgument, "default_max_points must be at least 2");
  if (c.port < 0 || c.port > 65535) throw Error(Errc::InvalidArgument, "port out of range");
  if (!(c.balance_tolerance >= 0.0)) throw Error(Errc::InvalidArgument, "balance_tolerance must be non-negative");
  if (c.interval < kMinInterval || c.interval > kMaxInterval) {
    throw Error(Errc::InvalidArgument, "interval must be between 60 and 3600 seconds");
  }
}

std::vector<TariffPlan> tariffs_from_json(const Json& j) {
  std::vector<TariffPlan> plans;
  const Json* list = &j;
  if (j.is_object() && j.contains("plans")) list = &j["plans"];
  if (list->is_array()) {
    for (const Json& p : *list) plans.push_back(tariff_from_json(p));
  } else {
    plans.push_back(tariff_from_json(*list));
  }
  for (std::size_t i = 0; i < plans.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (plans[i].plan_id() == plans[k].plan_id()) {
        throw Error(Errc::MalformedDocument, "plan id '" + plans[i].plan_id() + "' repeats");
      }
    }
  }
  return plans;
}

std::vector<TariffPlan> load_tariffs(const fs::path& file) {
  std::ifstream in = open_or_throw(file);
  return tariffs_from_json(parse_json(in, file.string()));
}

DataSet load_data(const ApiConfig& c) {
  DataSet d;
  d.zone = Zone::load(c.timezone);
  if (c.meter_csv) {
    std::ifstream in = open_or_throw(*c.meter_csv);
    d.series = std::make_shared<const MeterSeries>(ingest_csv(in, c.interval, d.zone, c.household_id));
  }
  if (c.tariff_json) d.plans = load_tariffs(*c.tariff_json);
  if (c.weather_csv) {
    std::ifstream in = open_or_throw(*c.weather_csv);
    d.weather = ingest_weather(in, d.zone);
  }
  if (c.calendar_ics) {
    std::ifstream in = open_or_throw(*c.calendar_ics);
    CalendarOptions opts;
    opts.zone = d.zone;
    d.events = ingest_calendar(in, opts);
  }
  if (c.catalog_json) {
    std::ifstream in = open_or_throw(*c.catalog_json);
    d.catalog = catalog_from_json(parse_json(in, c.catalog_json->string()));
  }
  return d;
}

}  // namespace escout
