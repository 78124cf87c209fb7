#pragma once

// HTTP/JSON veneer over the engine. `Api` is transport-free so it can be
// driven directly in tests; `serve` binds it to a socket.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "escout/codec.hpp"
#include "escout/context.hpp"
#include "escout/error.hpp"
#include "escout/household_model.hpp"
#include "escout/meter_store.hpp"
#include "escout/tariff.hpp"

namespace escout {

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;

  std::optional<std::filesystem::path> meter_csv;
  std::optional<std::filesystem::path> tariff_json;
  std::optional<std::filesystem::path> weather_csv;
  std::optional<std::filesystem::path> calendar_ics;
  std::optional<std::filesystem::path> profiles_dir;
  std::optional<std::filesystem::path> catalog_json;
  std::optional<std::filesystem::path> annotations_file;
  std::optional<std::filesystem::path> static_dir;

  std::string timezone = "UTC";
  Seconds interval = kDefaultInterval;
  std::string household_id = "household";
  std::string default_plan;  // empty: first plan in the tariff file

  std::size_t max_points_cap = 4000;
  std::size_t default_max_points = 1000;
  double balance_tolerance = kDefaultBalanceTolerance;
  bool log_requests = true;
};

/// Reads a JSON config file. Relative data paths resolve against the file's
/// directory. Throws Error(MalformedDocument | Io | InvalidArgument).
[[nodiscard]] ApiConfig load_config(const std::filesystem::path& file);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

/// Applies ESCOUT_* overrides (ESCOUT_HOST, ESCOUT_PORT, ESCOUT_METER, ...).
void apply_env_overrides(ApiConfig& config, const EnvLookup& env);
void apply_env_overrides(ApiConfig& config);

/// Throws Error(InvalidArgument) when a field is out of range.
void validate(const ApiConfig& config);

/// A tariff file holds one plan object, a list of plans, or {"plans": [...]}.
[[nodiscard]] std::vector<TariffPlan> tariffs_from_json(const Json& j);
[[nodiscard]] std::vector<TariffPlan> load_tariffs(const std::filesystem::path& file);

/// Everything the service reads at start-up.
struct DataSet {
  Zone zone = Zone::utc();
  SeriesHandle series;
  std::vector<TariffPlan> plans;
  std::vector<WeatherSample> weather;
  std::vector<CalendarEvent> events;
  std::vector<CatalogEntry> catalog;
};

/// Loads every configured data file. Throws Error from the failing parser.
[[nodiscard]] DataSet load_data(const ApiConfig& config);

/// Profiles keyed by id, optionally mirrored to `<dir>/<id>.json`. Reads
/// get immutable snapshots; mutations of one profile are serialized.
class ProfileStore {
 public:
  using Handle = std::shared_ptr<const HouseholdProfile>;

  explicit ProfileStore(std::optional<std::filesystem::path> dir = std::nullopt);

  [[nodiscard]] Handle get(const std::string& id) const;  // null when absent
  [[nodiscard]] std::vector<Handle> list() const;

  /// Throws Error(InvariantViolation) when the id is taken.
  Handle create(HouseholdProfile profile);
  /// Throws Error(UnknownProfile) or whatever `mutate` throws; the stored
  /// profile is untouched on failure.
  Handle update(const std::string& id, const std::function<void(HouseholdProfile&)>& mutate);

 private:
  void persist(const HouseholdProfile& p) const;
  std::mutex& lock_for(const std::string& id);

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Handle> profiles_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

enum class Perspective : std::uint8_t { Basic, Advanced };

struct Request {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  Json body;
};

class Api {
 public:
  /// Loads the configured data files.
  explicit Api(ApiConfig config);
  Api(ApiConfig config, DataSet data);

  [[nodiscard]] Response handle(const Request& request);

  [[nodiscard]] const ApiConfig& config() const noexcept { return config_; }
  [[nodiscard]] const Zone& zone() const noexcept { return zone_; }
  [[nodiscard]] SeriesStore& series() noexcept { return series_; }
  [[nodiscard]] ProfileStore& profiles() noexcept { return profiles_; }
  [[nodiscard]] AnnotationStore& annotations() noexcept { return annotations_; }

 private:
  Response dispatch(const Request& r);

  Response series_window(const Request& r);
  Response series_info(const Request& r);
  Response aggregate_one(const Request& r);
  Response aggregate_compare(const Request& r);
  Response spiral_grid(const Request& r);
  Response context(const Request& r);
  Response annotations_post(const Request& r);
  Response annotations_get(const Request& r);
  Response annotations_delete(const std::string& id);
  Response profiles_list();
  Response profile_get(const std::string& id);
  Response profiles_post(const Request& r);
  Response profiles_patch(const std::string& id, const Request& r);
  Response profile_clone(const std::string& id, const Request& r);
  Response profile_evaluate(const std::string& id, const Request& r);
  Response whatif_compare(const Request& r);
  Response balance_get(const Request& r);
  Response catalog_get();
  Response tariffs_get();

  [[nodiscard]] SeriesHandle require_series(const Request& r) const;
  [[nodiscard]] const TariffPlan* plan_by_id(const std::string& id) const;
  [[nodiscard]] const TariffPlan* request_plan(const Request& r, const std::string& key) const;
  [[nodiscard]] const TariffPlan& profile_plan(const HouseholdProfile& p) const;
  [[nodiscard]] ProfileStore::Handle require_profile(const std::string& id) const;
  [[nodiscard]] TimeWindow request_window(const Request& r, const std::string& prefix = {}) const;

  ApiConfig config_;
  Zone zone_;
  SeriesStore series_;
  std::vector<TariffPlan> plans_;
  std::vector<WeatherSample> weather_;
  std::vector<CalendarEvent> events_;
  std::vector<CatalogEntry> catalog_;
  ProfileStore profiles_;
  AnnotationStore annotations_;
};

/// HTTP status for an engine error code.
[[nodiscard]] int http_status(Errc code) noexcept;

/// Matches the request perspective: `perspective=advanced` in the query or
/// an `X-Perspective: advanced` header.
[[nodiscard]] Perspective perspective_of(const Request& r);

/// Serves `api` over HTTP until SIGINT/SIGTERM. Returns the process exit code.
int serve(Api& api);

}  // namespace escout
