#include <benchmark/benchmark.h>

#include <random>

#include "escout/aggregation.hpp"
#include "escout/meter_store.hpp"
#include "escout/service.hpp"
#include "escout/tariff.hpp"

namespace {

using namespace escout;

constexpr std::int64_t kStart = 1'704'067'200;  // 2024-01-01T00:00:00Z
constexpr std::size_t kFiveYears = 175'296;

std::shared_ptr<const MeterSeries> make_series(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Reading> readings;
  readings.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    readings.push_back({from_unix(kStart + static_cast<std::int64_t>(i) * 900), 0.05 + u(rng)});
  }
  return std::make_shared<const MeterSeries>("bench", Seconds{900}, Zone::load("America/New_York"),
                                             std::move(readings));
}

const MeterSeries& series() {
  static const auto s = make_series(kFiveYears);
  return *s;
}

TariffPlan plan() {
  PeakPeriod p{DaySet::weekdays(), TimeOfDay::parse("14:00"), TimeOfDay::parse("20:00"),
               Rate::micro(300'000)};
  return TariffPlan("tou", "tou", Rate::micro(100'000), {p});
}

void BM_Downsample(benchmark::State& state) {
  const MeterSeries& s = series();
  const auto points = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(downsample(s, *s.extent(), points));
}
BENCHMARK(BM_Downsample)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_DownsampleLabeled(benchmark::State& state) {
  const MeterSeries& s = series();
  const TariffPlan p = plan();
  for (auto _ : state) benchmark::DoNotOptimize(downsample(s, *s.extent(), 2000, &p));
}
BENCHMARK(BM_DownsampleLabeled)->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  const MeterSeries& s = series();
  const TariffPlan p = plan();
  const AggregateSpec spec{*s.extent(), BinScheme::hour_of_day(), AggFilter::parse("weekdays"), &p};
  for (auto _ : state) benchmark::DoNotOptimize(aggregate(s, spec));
}
BENCHMARK(BM_Aggregate)->Unit(benchmark::kMillisecond);

void BM_Spiral(benchmark::State& state) {
  const MeterSeries& s = series();
  for (auto _ : state) benchmark::DoNotOptimize(spiral(s, *s.extent(), SpiralPeriod::Day, 24));
}
BENCHMARK(BM_Spiral)->Unit(benchmark::kMillisecond);

void BM_ApiWindow(benchmark::State& state) {
  ApiConfig config;
  config.timezone = "America/New_York";
  DataSet data;
  data.zone = Zone::load(config.timezone);
  data.series = make_series(kFiveYears);
  Api api(config, std::move(data));
  Request req;
  req.method = "GET";
  req.path = "/api/series/window";
  req.query = {{"max_points", "2000"}};
  for (auto _ : state) benchmark::DoNotOptimize(api.handle(req));
}
BENCHMARK(BM_ApiWindow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
