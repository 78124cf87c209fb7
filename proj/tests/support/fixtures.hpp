#pragma once

// Synthetic inputs shared by unit and acceptance tests.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "escout/household_model.hpp"
#include "escout/meter_store.hpp"
#include "escout/tariff.hpp"
#include "oracle.hpp"

namespace fixtures {

struct SeriesSpec {
  std::string tz = "UTC";
  std::int64_t start = 0;  // unix seconds
  std::size_t slots = 96;
  std::int64_t interval = 900;
  double gap_probability = 0.0;
  /// Multiples of 1/1024 kWh: every partial sum is exact in binary.
  bool dyadic = false;
  std::uint64_t seed = 1;
};

struct Synthetic {
  std::vector<oracle::Row> rows;
  escout::MeterSeries series;
};

Synthetic make_series(const SeriesSpec& spec);

/// Builds a series from explicit rows.
escout::MeterSeries to_series(const std::vector<oracle::Row>& rows, std::int64_t interval,
                              const std::string& tz, const std::string& household = "household");

/// A random time-of-use plan with whole-minute boundaries. Rates are
/// multiples of 1/64 $ when `dyadic`.
oracle::Plan random_plan(std::mt19937_64& rng, bool dyadic);
escout::TariffPlan to_engine(const oracle::Plan& plan, const std::string& id = "plan");

/// Weekday-afternoon peak (Mon-Fri 14:00-20:00 @ 0.30), off-peak 0.10.
oracle::Plan weekday_afternoon_plan();

escout::DeviceProfile to_engine(const oracle::Device& d, const std::string& id);

void write_csv(const std::filesystem::path& file, const std::vector<oracle::Row>& rows,
               const std::string& tz);

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Unix seconds of a UTC civil time.
std::int64_t utc(int year, int month, int day, int hour = 0, int minute = 0);

}  // namespace fixtures
