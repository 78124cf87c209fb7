#include "report.hpp"

#include <cstdio>
#include <string>

#include "escout/error.hpp"

namespace escout::cli {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

TimeWindow parse_window(std::string_view text, const Zone& zone) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw Error(Errc::InvalidArgument, "window must be START/END");
  }
  const auto start = parse_timestamp(text.substr(0, slash), zone);
  const auto end = parse_timestamp(text.substr(slash + 1), zone);
  if (!start || !end) throw Error(Errc::InvalidArgument, "window bounds must be RFC 3339 instants");
  return TimeWindow(*start, *end);
}

void write_table(std::ostream& out, const AggregateSpec& spec, const AggregateResult& result) {
  out << spec.scheme.name() << " x " << spec.scheme.cells() << ", filter " << spec.filter.to_string()
      << '\n';
  out << pad("bin", 4) << "  " << pad("label", 10) << pad("mean_kwh", 12) << pad("peak_kwh", 12)
      << pad("offpeak_kwh", 13) << pad("samples", 9) << pad("instances", 11) << pad("coverage", 10)
      << '\n';
  for (const BinSummary& b : result.bins) {
    out << pad(std::to_string(b.bin_index), 4) << "  " << pad(spec.scheme.label(b.bin_index), 10)
        << pad(fixed(b.mean_kwh, 4), 12) << pad(fixed(b.peak_kwh, 4), 12)
        << pad(fixed(b.offpeak_kwh, 4), 13) << pad(std::to_string(b.sample_count), 9)
        << pad(std::to_string(b.instance_count), 11) << pad(fixed(b.coverage, 3), 10) << '\n';
  }
  for (const std::string& w : result.warnings) out << "warning: " << w << '\n';
}

void write_csv(std::ostream& out, const AggregateSpec& spec, const AggregateResult& result) {
  out << "bin_index,label,mean_kwh,peak_kwh,offpeak_kwh,sample_count,instance_count,coverage\n";
  for (const BinSummary& b : result.bins) {
    out << b.bin_index << ',' << spec.scheme.label(b.bin_index) << ',' << fixed(b.mean_kwh, 9) << ','
        << fixed(b.peak_kwh, 9) << ',' << fixed(b.offpeak_kwh, 9) << ',' << b.sample_count << ','
        << b.instance_count << ',' << fixed(b.coverage, 6) << '\n';
  }
}

void write_delta(std::ostream& out, const ScenarioDelta& d) {
  out << pad("", 8) << pad("kwh", 14) << pad("usd", 14) << '\n';
  out << pad("base", 8) << pad(fixed(d.base.kwh, 4), 14) << pad(fixed(d.base.usd, 4), 14) << '\n';
  out << pad("whatif", 8) << pad(fixed(d.whatif.kwh, 4), 14) << pad(fixed(d.whatif.usd, 4), 14)
      << '\n';
  out << pad("delta", 8) << pad(fixed(d.delta_kwh, 4), 14) << pad(fixed(d.delta_usd, 4), 14) << '\n';
}

void write_ingest_summary(std::ostream& out, const MeterSeries& series) {
  const auto extent = series.extent();
  const double cov = extent ? coverage(series, *extent) : 0.0;
  out << series.size() << " readings, coverage " << fixed(cov, 2) << '\n';
  if (extent) {
    out << "extent " << format_rfc3339(extent->start(), series.zone()) << " / "
        << format_rfc3339(extent->end(), series.zone()) << '\n';
  }
  const auto gaps = find_gaps(series);
  out << gaps.size() << (gaps.size() == 1 ? " gap" : " gaps") << '\n';
  for (const Gap& g : gaps) {
    out << "  gap " << format_rfc3339(g.start, series.zone()) << " .. "
        << format_rfc3339(g.end, series.zone()) << " (" << g.missing << " missing)\n";
  }
}

}  // namespace escout::cli
