#pragma once

#include <ostream>
#include <string_view>

#include "escout/aggregation.hpp"
#include "escout/household_model.hpp"
#include "escout/meter_store.hpp"

namespace escout::cli {

/// "start/end", each side RFC 3339 or local time in `zone`. Throws
/// Error(InvalidArgument).
[[nodiscard]] TimeWindow parse_window(std::string_view text, const Zone& zone);

void write_table(std::ostream& out, const AggregateSpec& spec, const AggregateResult& result);
void write_csv(std::ostream& out, const AggregateSpec& spec, const AggregateResult& result);
void write_delta(std::ostream& out, const ScenarioDelta& delta);
void write_ingest_summary(std::ostream& out, const MeterSeries& series);

}  // namespace escout::cli
