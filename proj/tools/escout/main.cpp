#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "escout/aggregation.hpp"
#include "escout/codec.hpp"
#include "escout/context.hpp"
#include "escout/error.hpp"
#include "escout/service.hpp"
#include "report.hpp"

namespace {

using namespace escout;

constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return in;
}

Zone zone_or_usage(const std::string& tz) {
  try {
    return Zone::load(tz);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

MeterSeries load_meter(const std::string& path, long interval, const Zone& zone,
                       const std::string& household) {
  std::ifstream in = open(path);
  return ingest_csv(in, Seconds{interval}, zone, household);
}

const TariffPlan& pick_plan(const std::vector<TariffPlan>& plans, const std::string& id,
                            const std::string& file) {
  if (plans.empty()) throw Error(Errc::UnknownPlan, file + " holds no plans");
  if (id.empty()) return plans.front();
  for (const TariffPlan& p : plans) {
    if (p.plan_id() == id) return p;
  }
  throw Error(Errc::UnknownPlan, "no plan '" + id + "' in " + file);
}

struct MeterFlags {
  std::string meter;
  long interval = kDefaultInterval.count();
  std::string tz = "UTC";
  std::string household = "household";

  void add(CLI::App* cmd, bool meter_required) {
    auto* m = cmd->add_option("--meter", meter, "Meter CSV (timestamp,kwh)")->envname("ESCOUT_METER");
    if (meter_required) m->required();
    cmd->add_option("--interval", interval, "Reading interval in seconds")
        ->envname("ESCOUT_INTERVAL")
        ->check(CLI::Range(kMinInterval.count(), kMaxInterval.count()));
    cmd->add_option("--tz", tz, "IANA time zone of the household")->envname("ESCOUT_TZ");
    cmd->add_option("--household", household, "Household id")->envname("ESCOUT_HOUSEHOLD");
  }
};

// ---- ingest --------------------------------------------------------------------

struct IngestCmd {
  MeterFlags meter;
  std::string weather;
  std::string calendar;

  int run() const {
    const Zone zone = zone_or_usage(meter.tz);
    const MeterSeries series = load_meter(meter.meter, meter.interval, zone, meter.household);
    cli::write_ingest_summary(std::cout, series);
    if (!weather.empty()) {
      std::ifstream in = open(weather);
      std::cout << ingest_weather(in, zone).size() << " weather samples\n";
    }
    if (!calendar.empty()) {
      std::ifstream in = open(calendar);
      CalendarOptions opts;
      opts.zone = zone;
      std::cout << ingest_calendar(in, opts).size() << " calendar events\n";
    }
    return 0;
  }
};

// ---- report --------------------------------------------------------------------

struct ReportCmd {
  MeterFlags meter;
  std::string window;
  std::string scheme = "hour_of_day";
  int cells = 0;
  std::string filter;
  std::string plan_file;
  std::string plan_id;
  std::string format = "table";
  std::string output;

  int run() const {
    const Zone zone = zone_or_usage(meter.tz);
    std::optional<TimeWindow> requested;
    BinScheme bin = BinScheme::hour_of_day();
    AggFilter agg_filter;
    try {
      bin = BinScheme::parse(scheme, cells);
      agg_filter = AggFilter::parse(filter);
      if (!window.empty()) requested = cli::parse_window(window, zone);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const MeterSeries series = load_meter(meter.meter, meter.interval, zone, meter.household);
    std::vector<TariffPlan> plans;
    const TariffPlan* plan = nullptr;
    if (!plan_file.empty()) {
      plans = load_tariffs(plan_file);
      plan = &pick_plan(plans, plan_id, plan_file);
    }
    if (!requested) {
      const auto extent = series.extent();
      if (!extent) throw Error(Errc::InvalidArgument, "the meter file is empty; pass --window");
      requested = *extent;
    }
    const AggregateSpec spec{*requested, bin, agg_filter, plan};
    const AggregateResult result = aggregate(series, spec);

    std::ofstream file;
    if (!output.empty()) {
      file.open(output, std::ios::binary | std::ios::trunc);
      if (!file) throw Error(Errc::Io, "cannot write " + output);
    }
    std::ostream& out = output.empty() ? std::cout : file;
    if (format == "json") {
      out << to_json(spec, result, zone).dump() << '\n';
    } else if (format == "csv") {
      cli::write_csv(out, spec, result);
    } else {
      cli::write_table(out, spec, result);
    }
    return 0;
  }
};

// ---- whatif --------------------------------------------------------------------

struct WhatIfCmd {
  std::string base;
  std::string scenario;
  std::string window;
  std::string tz = "UTC";
  std::string plan_a;
  std::string plan_b;
  std::string format = "table";

  int run() const {
    const Zone zone = zone_or_usage(tz);
    TimeWindow span = [&] {
      try {
        return cli::parse_window(window, zone);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }();
    std::ifstream base_in = open(base);
    const HouseholdProfile base_profile = profile_from_json(parse_json(base_in, base));
    std::vector<ProfileEdit> edits;
    if (!scenario.empty()) {
      std::ifstream in = open(scenario);
      edits = edits_from_json(parse_json(in, scenario));
    }
    HouseholdProfile variant = clone_profile(base_profile);
    apply_edits(variant, edits);

    const std::vector<TariffPlan> plans_a = load_tariffs(plan_a);
    const std::vector<TariffPlan> plans_b = plan_b.empty() ? plans_a : load_tariffs(plan_b);
    const TariffPlan& pa = pick_plan(plans_a, "", plan_a);
    const TariffPlan& pb = plan_b.empty() ? pa : pick_plan(plans_b, "", plan_b);

    const ScenarioDelta delta = compare_profiles(base_profile, pa, variant, pb, span, zone);
    if (format == "json") {
      Json out = to_json(delta);
      out["base"]["profile_id"] = base_profile.profile_id;
      out["base"]["plan"] = pa.plan_id();
      out["whatif"]["profile_id"] = variant.profile_id;
      out["whatif"]["plan"] = pb.plan_id();
      out["window"] = {{"start", format_rfc3339(span.start(), zone)},
                       {"end", format_rfc3339(span.end(), zone)}};
      std::cout << out.dump() << '\n';
    } else {
      cli::write_delta(std::cout, delta);
    }
    return 0;
  }
};

// ---- serve ---------------------------------------------------------------------

struct ServeCmd {
  std::string config;

  int run() const {
    ApiConfig c = config.empty() ? ApiConfig{} : load_config(config);
    apply_env_overrides(c);
    Api api(std::move(c));
    return serve(api);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"escout: smart-meter analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("escout 0.1.0"));

  IngestCmd ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate meter, weather and calendar files");
  ingest.meter.add(ingest_cmd, true);
  ingest_cmd->add_option("--weather", ingest.weather, "Weather CSV")->envname("ESCOUT_WEATHER");
  ingest_cmd->add_option("--calendar", ingest.calendar, "iCalendar file")->envname("ESCOUT_CALENDAR");

  ReportCmd report;
  auto* report_cmd = app.add_subcommand("report", "Aggregate report over a window");
  report.meter.add(report_cmd, true);
  report_cmd->add_option("--window", report.window, "START/END (default: whole series)")
      ->envname("ESCOUT_WINDOW");
  report_cmd->add_option("--scheme", report.scheme, "Bin scheme")->envname("ESCOUT_SCHEME");
  report_cmd->add_option("--cells", report.cells, "Cell count (0: scheme default)")
      ->envname("ESCOUT_CELLS");
  report_cmd->add_option("--filter", report.filter, "e.g. weekdays,winter,evening")
      ->envname("ESCOUT_FILTER");
  report_cmd->add_option("--plan", report.plan_file, "Tariff JSON")->envname("ESCOUT_PLAN");
  report_cmd->add_option("--plan-id", report.plan_id, "Plan id inside the tariff file")
      ->envname("ESCOUT_PLAN_ID");
  report_cmd->add_option("--format", report.format, "table, json or csv")
      ->envname("ESCOUT_FORMAT")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  report_cmd->add_option("-o,--output", report.output, "Write to a file")->envname("ESCOUT_OUTPUT");

  WhatIfCmd whatif;
  auto* whatif_cmd = app.add_subcommand("whatif", "Compare a profile with an edited copy");
  whatif_cmd->add_option("--base", whatif.base, "Base profile JSON")->envname("ESCOUT_BASE")->required();
  whatif_cmd->add_option("--scenario", whatif.scenario, "Edit list JSON")->envname("ESCOUT_SCENARIO");
  whatif_cmd->add_option("--window", whatif.window, "START/END")->envname("ESCOUT_WINDOW")->required();
  whatif_cmd->add_option("--tz", whatif.tz, "IANA time zone")->envname("ESCOUT_TZ");
  whatif_cmd->add_option("--plan-a", whatif.plan_a, "Tariff JSON for the base profile")
      ->envname("ESCOUT_PLAN_A")
      ->required();
  whatif_cmd->add_option("--plan-b", whatif.plan_b, "Tariff JSON for the scenario (default: plan-a)")
      ->envname("ESCOUT_PLAN_B");
  whatif_cmd->add_option("--format", whatif.format, "table or json")
      ->envname("ESCOUT_FORMAT")
      ->check(CLI::IsMember({"table", "json"}));

  ServeCmd serve_cmd;
  auto* serve_sub = app.add_subcommand("serve", "Run the HTTP service");
  serve_sub->add_option("--config", serve_cmd.config, "Service config JSON")->envname("ESCOUT_CONFIG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*ingest_cmd) return ingest.run();
    if (*report_cmd) return report.run();
    if (*whatif_cmd) return whatif.run();
    if (*serve_sub) return serve_cmd.run();
  } catch (const UsageError& e) {
    std::cerr << "escout: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "escout: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "escout: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
