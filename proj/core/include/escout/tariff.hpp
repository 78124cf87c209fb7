#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "escout/time.hpp"

namespace escout {

class MeterSeries;
struct Reading;

enum class PeakLabel : std::uint8_t { Peak, OffPeak };

[[nodiscard]] std::string_view to_string(PeakLabel label) noexcept;

/// Price in dollars per kWh, held at micro-dollar resolution so model costs
/// can be integrated exactly.
class Rate {
 public:
  constexpr Rate() = default;
  /// Rounds to the nearest micro-dollar. Throws Error(InvalidArgument)
  /// for negative or non-finite input.
  static Rate usd_per_kwh(double usd);
  static constexpr Rate micro(std::int64_t micro_usd) { return Rate{micro_usd}; }

  [[nodiscard]] constexpr std::int64_t micro_usd() const noexcept { return micro_; }
  [[nodiscard]] constexpr double usd() const noexcept { return static_cast<double>(micro_) / 1e6; }

  friend constexpr auto operator<=>(Rate, Rate) = default;

 private:
  constexpr explicit Rate(std::int64_t m) : micro_(m) {}
  std::int64_t micro_ = 0;
};

/// Half-open civil span [start, end) on the listed days billed at `rate`.
struct PeakPeriod {
  DaySet days;
  TimeOfDay start;
  TimeOfDay end;
  Rate rate;
};

struct Classification {
  PeakLabel label = PeakLabel::OffPeak;
  Rate rate;
};

/// Time-of-use plan. Time outside every period is off-peak. A plan with no
/// periods is a flat rate. Overnight peaks are written as two periods.
class TariffPlan {
 public:
  /// Throws Error(InvariantViolation) when a period is empty or inverted, or
  /// two periods overlap on the same day.
  TariffPlan(std::string plan_id, std::string name, Rate offpeak_rate,
             std::vector<PeakPeriod> periods);

  static TariffPlan flat(std::string plan_id, Rate rate) {
    std::string name = plan_id;
    return TariffPlan(std::move(plan_id), std::move(name), rate, {});
  }

  [[nodiscard]] const std::string& plan_id() const noexcept { return plan_id_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] Rate offpeak_rate() const noexcept { return offpeak_rate_; }
  [[nodiscard]] const std::vector<PeakPeriod>& periods() const noexcept { return periods_; }

  [[nodiscard]] Classification classify(const CivilStamp& civil) const noexcept;
  [[nodiscard]] Classification classify(Instant t, const Zone& zone) const {
    return classify(zone.civil(t));
  }

 private:
  std::string plan_id_;
  std::string name_;
  Rate offpeak_rate_;
  std::vector<PeakPeriod> periods_;
};

struct CostBreakdown {
  double total_usd = 0.0;
  double peak_usd = 0.0;
  double offpeak_usd = 0.0;
  double total_kwh = 0.0;
  double peak_kwh = 0.0;
  double offpeak_kwh = 0.0;
};

/// Prices every reading in `window` at its classified rate. Totals are the
/// sum of the peak and off-peak parts.
[[nodiscard]] CostBreakdown cost(const TariffPlan& plan, const MeterSeries& series,
                                 const TimeWindow& window);

struct LabeledReading {
  Instant timestamp;
  double kwh = 0.0;
  PeakLabel label = PeakLabel::OffPeak;
  Rate rate;
};

[[nodiscard]] std::vector<LabeledReading> label_slice(const TariffPlan& plan,
                                                      std::span<const Reading> readings,
                                                      const Zone& zone);

}  // namespace escout
