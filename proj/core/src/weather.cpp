#include <algorithm>
#include <array>

#include "escout/context.hpp"
#include "escout/error.hpp"
#include "text.hpp"

namespace escout {

namespace {
constexpr std::array<std::string_view, 7> kConditions = {"Sunny", "Cloudy", "Rain", "Snow",
                                                         "Storm", "Fog",    "Other"};
}  // namespace

std::string_view to_string(WeatherCondition c) noexcept {
  return kConditions[static_cast<std::size_t>(c)];
}

WeatherCondition parse_condition(std::string_view s) noexcept {
  s = detail::trim(s);
  for (std::size_t i = 0; i < kConditions.size(); ++i) {
    if (detail::iequals(s, kConditions[i])) return static_cast<WeatherCondition>(i);
  }
  return WeatherCondition::Other;
}

std::vector<WeatherSample> ingest_weather(std::istream& source, const Zone& zone) {
  std::vector<WeatherSample> samples;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(source, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = detail::trim(view);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = detail::split(view, ',');
    if (fields.size() != 4) {
      throw Error(Errc::MalformedRow, "expected 4 fields, got " + std::to_string(fields.size()),
                  line_no);
    }
    if (!have_header) {
      if (!detail::iequals(detail::trim(fields[0]), "timestamp") ||
          !detail::iequals(detail::trim(fields[1]), "temp_c") ||
          !detail::iequals(detail::trim(fields[2]), "humidity_pct") ||
          !detail::iequals(detail::trim(fields[3]), "condition")) {
        throw Error(Errc::MalformedRow,
                    "header must be 'timestamp,temp_c,humidity_pct,condition'", line_no);
      }
      have_header = true;
      continue;
    }
    const auto ts = parse_timestamp(detail::trim(fields[0]), zone);
    const auto temp = detail::parse_double(fields[1]);
    const auto humidity = detail::parse_double(fields[2]);
    if (!ts) throw Error(Errc::MalformedRow, "bad timestamp", line_no);
    if (!temp) throw Error(Errc::MalformedRow, "bad temperature", line_no);
    if (!humidity) throw Error(Errc::MalformedRow, "bad humidity", line_no);
    if (*humidity < 0.0 || *humidity > 100.0) {
      throw Error(Errc::HumidityOutOfRange,
                  "humidity " + std::string(detail::trim(fields[2])) + " outside [0, 100]",
                  line_no);
    }
    samples.push_back({*ts, *temp, *humidity, parse_condition(fields[3])});
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const WeatherSample& a, const WeatherSample& b) {
                     return a.timestamp < b.timestamp;
                   });
  return samples;
}

}  // namespace escout
