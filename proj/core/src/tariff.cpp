#include "escout/tariff.hpp"

#include <cmath>

#include "escout/error.hpp"
#include "escout/meter_store.hpp"

namespace escout {

std::string_view to_string(PeakLabel label) noexcept {
  return label == PeakLabel::Peak ? "peak" : "offpeak";
}

Rate Rate::usd_per_kwh(double usd) {
  if (!std::isfinite(usd) || usd < 0.0) {
    throw Error(Errc::InvalidArgument, "rate must be a finite non-negative $/kWh value");
  }
  return Rate{std::llround(usd * 1e6)};
}

TariffPlan::TariffPlan(std::string plan_id, std::string name, Rate offpeak_rate,
                       std::vector<PeakPeriod> periods)
    : plan_id_(std::move(plan_id)),
      name_(std::move(name)),
      offpeak_rate_(offpeak_rate),
      periods_(std::move(periods)) {
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    const PeakPeriod& p = periods_[i];
    if (p.days.empty()) {
      throw Error(Errc::InvariantViolation, "period " + std::to_string(i) + " has no days");
    }
    if (!(p.start < p.end)) {
      throw Error(Errc::InvariantViolation,
                  "period " + std::to_string(i) + " must start before it ends; split overnight "
                  "periods at midnight");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const PeakPeriod& q = periods_[j];
      const bool share_day = (p.days.bits() & q.days.bits()) != 0;
      if (share_day && p.start < q.end && q.start < p.end) {
        throw Error(Errc::InvariantViolation,
                    "periods " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
}

Classification TariffPlan::classify(const CivilStamp& civil) const noexcept {
  const TimeOfDay tod = TimeOfDay::from_seconds(civil.second_of_day);
  for (const PeakPeriod& p : periods_) {
    if (p.days.contains(civil.weekday) && p.start <= tod && tod < p.end) {
      return {PeakLabel::Peak, p.rate};
    }
  }
  return {PeakLabel::OffPeak, offpeak_rate_};
}

CostBreakdown cost(const TariffPlan& plan, const MeterSeries& series, const TimeWindow& window) {
  const auto [lo, hi] = series.index_range(window);
  const auto readings = series.readings();
  const auto civil = series.civil();
  CostBreakdown out;
  for (std::size_t i = lo; i < hi; ++i) {
    const Classification c = plan.classify(civil[i]);
    const double usd = readings[i].kwh * c.rate.usd();
    if (c.label == PeakLabel::Peak) {
      out.peak_kwh += readings[i].kwh;
      out.peak_usd += usd;
    } else {
      out.offpeak_kwh += readings[i].kwh;
      out.offpeak_usd += usd;
    }
  }
  out.total_kwh = out.peak_kwh + out.offpeak_kwh;
  out.total_usd = out.peak_usd + out.offpeak_usd;
  return out;
}

std::vector<LabeledReading> label_slice(const TariffPlan& plan, std::span<const Reading> readings,
                                        const Zone& zone) {
  std::vector<LabeledReading> out;
  out.reserve(readings.size());
  for (const Reading& r : readings) {
    const Classification c = plan.classify(r.timestamp, zone);
    out.push_back({r.timestamp, r.kwh, c.label, c.rate});
  }
  return out;
}

}  // namespace escout
