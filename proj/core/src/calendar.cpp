#include <algorithm>
#include <map>
#include <sstream>

#include "escout/context.hpp"
#include "escout/error.hpp"
#include "text.hpp"

namespace escout {

namespace {

[[noreturn]] void malformed(const std::string& why, std::size_t line) {
  throw Error(Errc::MalformedCalendar, why, line);
}

struct ContentLine {
  std::string name;  // upper-cased
  std::map<std::string, std::string> params;
  std::string value;
  std::size_t line = 0;
};

// Reads physical lines and joins folded continuations (leading space/tab).
std::vector<std::pair<std::string, std::size_t>> unfold(std::istream& in) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (n == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && (line.front() == ' ' || line.front() == '\t') && !out.empty()) {
      out.back().first += line.substr(1);
      continue;
    }
    if (detail::trim(line).empty()) continue;
    out.emplace_back(line, n);
  }
  return out;
}

ContentLine parse_line(const std::string& raw, std::size_t line) {
  bool quoted = false;
  std::size_t colon = std::string::npos;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '"') quoted = !quoted;
    if (raw[i] == ':' && !quoted) {
      colon = i;
      break;
    }
  }
  if (colon == std::string::npos) malformed("content line without ':'", line);
  ContentLine cl;
  cl.line = line;
  cl.value = raw.substr(colon + 1);
  const auto head = detail::split(std::string_view(raw).substr(0, colon), ';');
  cl.name = detail::upper(detail::trim(head[0]));
  if (cl.name.empty()) malformed("content line without a name", line);
  for (std::size_t i = 1; i < head.size(); ++i) {
    const auto eq = head[i].find('=');
    if (eq == std::string_view::npos) malformed("parameter without '='", line);
    std::string v(head[i].substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    cl.params[detail::upper(head[i].substr(0, eq))] = v;
  }
  return cl;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char c = s[++i];
      out += (c == 'n' || c == 'N') ? '\n' : c;
    } else {
      out += s[i];
    }
  }
  return out;
}

struct IcsTime {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  bool date_only = false;
  bool utc = false;
  Zone zone = Zone::utc();
};

bool fixed_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

IcsTime parse_time(const ContentLine& cl, const Zone& default_zone) {
  const std::string_view v = detail::trim(cl.value);
  IcsTime t;
  t.zone = default_zone;
  if (!fixed_digits(v, 0, 4, t.year) || !fixed_digits(v, 4, 2, t.month) ||
      !fixed_digits(v, 6, 2, t.day)) {
    malformed(cl.name + " value '" + std::string(v) + "' is not a DATE or DATE-TIME", cl.line);
  }
  if (v.size() == 8) {
    t.date_only = true;
  } else if ((v.size() == 15 || v.size() == 16) && v[8] == 'T' &&
             fixed_digits(v, 9, 2, t.hour) && fixed_digits(v, 11, 2, t.minute) &&
             fixed_digits(v, 13, 2, t.second)) {
    if (v.size() == 16) {
      if (v[15] != 'Z') malformed(cl.name + " has a trailing character other than 'Z'", cl.line);
      t.utc = true;
      t.zone = Zone::utc();
    }
  } else {
    malformed(cl.name + " value '" + std::string(v) + "' is not a DATE or DATE-TIME", cl.line);
  }
  if (auto it = cl.params.find("VALUE"); it != cl.params.end()) {
    const std::string kind = detail::upper(it->second);
    if ((kind == "DATE") != t.date_only || (kind != "DATE" && kind != "DATE-TIME")) {
      malformed(cl.name + " VALUE=" + it->second + " does not match its value", cl.line);
    }
  }
  if (auto it = cl.params.find("TZID"); it != cl.params.end()) {
    if (t.utc) malformed(cl.name + " combines TZID with a UTC time", cl.line);
    try {
      t.zone = Zone::load(it->second);
    } catch (const Error&) {
      malformed("unknown TZID '" + it->second + "'", cl.line);
    }
  }
  if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 || t.hour > 23 || t.minute > 59 ||
      t.second > 60) {
    malformed(cl.name + " value out of range", cl.line);
  }
  return t;
}

Instant resolve(const IcsTime& t, std::int64_t day_shift) {
  const CivilDate d = civil_date(static_cast<std::int32_t>(day_index_of(t.year, t.month, t.day) + day_shift));
  return t.zone.from_civil(d.year, d.month, d.day, t.hour, t.minute, t.second);
}

enum class Freq { Daily, Weekly };

struct Rule {
  Freq freq = Freq::Daily;
  std::optional<std::size_t> count;
  std::optional<Instant> until;  // inclusive bound on occurrence start
};

Rule parse_rrule(const ContentLine& cl, const Zone& zone) {
  Rule rule;
  bool have_freq = false;
  for (const auto part : detail::split(detail::trim(cl.value), ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) malformed("RRULE part without '='", cl.line);
    const std::string key = detail::upper(part.substr(0, eq));
    const std::string value = detail::upper(part.substr(eq + 1));
    if (key == "FREQ") {
      if (value == "DAILY") {
        rule.freq = Freq::Daily;
      } else if (value == "WEEKLY") {
        rule.freq = Freq::Weekly;
      } else {
        malformed("RRULE FREQ=" + value + " is not supported (DAILY or WEEKLY only)", cl.line);
      }
      have_freq = true;
    } else if (key == "COUNT") {
      const auto n = detail::parse_int(value);
      if (!n || *n < 1) malformed("RRULE COUNT must be a positive integer", cl.line);
      rule.count = static_cast<std::size_t>(*n);
    } else if (key == "UNTIL") {
      ContentLine u{"UNTIL", {}, value, cl.line};
      const IcsTime t = parse_time(u, zone);
      // A DATE bound admits every occurrence starting on that day.
      rule.until = t.date_only ? resolve(t, 1) - Seconds{1} : resolve(t, 0);
    } else {
      malformed("RRULE part " + key + " is not supported (FREQ, COUNT, UNTIL only)", cl.line);
    }
  }
  if (!have_freq) malformed("RRULE without FREQ", cl.line);
  if (rule.count && rule.until) malformed("RRULE has both COUNT and UNTIL", cl.line);
  return rule;
}

struct PendingEvent {
  std::optional<ContentLine> dtstart;
  std::optional<ContentLine> dtend;
  std::optional<ContentLine> rrule;
  std::string summary;
  std::string uid;
  std::size_t line = 0;
};

void expand(const PendingEvent& pe, const CalendarOptions& options, std::size_t ordinal,
            std::vector<CalendarEvent>& out) {
  if (!pe.dtstart) malformed("VEVENT without DTSTART", pe.line);
  const IcsTime start = parse_time(*pe.dtstart, options.zone);
  IcsTime end = start;
  std::int64_t end_shift = 0;
  if (pe.dtend) {
    end = parse_time(*pe.dtend, options.zone);
    if (end.date_only != start.date_only) {
      malformed("DTSTART and DTEND mix DATE and DATE-TIME", pe.dtend->line);
    }
  } else if (start.date_only) {
    end_shift = 1;
  }
  const Instant first_start = resolve(start, 0);
  if (resolve(end, end_shift) < first_start) malformed("DTEND precedes DTSTART", pe.line);

  const std::string uid = pe.uid.empty() ? "event-" + std::to_string(ordinal) : pe.uid;
  const auto occurrence = [&](std::int64_t shift, std::string id) {
    out.push_back({std::move(id), pe.summary, resolve(start, shift), resolve(end, end_shift + shift),
                   EventSource::Imported, start.date_only});
  };
  if (!pe.rrule) {
    occurrence(0, uid);
    return;
  }
  const Rule rule = parse_rrule(*pe.rrule, start.zone);
  const std::int64_t step = rule.freq == Freq::Daily ? 1 : 7;
  for (std::size_t k = 0; k < options.max_occurrences; ++k) {
    if (rule.count && k >= *rule.count) break;
    const std::int64_t shift = static_cast<std::int64_t>(k) * step;
    const Instant s = resolve(start, shift);
    if (rule.until && s > *rule.until) break;
    // The horizon is measured on the wall clock so DST never adds or drops one.
    if (shift * kSecondsPerDay >= options.horizon.count()) break;
    occurrence(shift, uid + "#" + std::to_string(k));
  }
}

}  // namespace

std::vector<CalendarEvent> ingest_calendar(std::istream& source, const CalendarOptions& options) {
  std::vector<CalendarEvent> events;
  std::vector<std::string> stack;
  std::optional<PendingEvent> pending;
  std::size_t skip_depth = 0;  // inside VTIMEZONE / VALARM
  std::size_t ordinal = 0;
  std::size_t last_line = 0;

  for (const auto& [raw, line] : unfold(source)) {
    last_line = line;
    const ContentLine cl = parse_line(raw, line);
    const std::string value = detail::upper(detail::trim(cl.value));

    if (cl.name == "BEGIN") {
      if (skip_depth > 0) {
        ++skip_depth;
        continue;
      }
      if (stack.empty() && value != "VCALENDAR") malformed("expected BEGIN:VCALENDAR", line);
      if (value == "VTIMEZONE" || value == "VALARM") {
        skip_depth = 1;
      } else if (value == "VEVENT") {
        if (stack.back() != "VCALENDAR") malformed("VEVENT nested in " + stack.back(), line);
        pending = PendingEvent{};
        pending->line = line;
      } else if (value != "VCALENDAR" || !stack.empty()) {
        malformed("unsupported component " + value, line);
      }
      if (skip_depth == 0) stack.push_back(value);
      continue;
    }
    if (cl.name == "END") {
      if (skip_depth > 0) {
        --skip_depth;
        continue;
      }
      if (stack.empty() || stack.back() != value) malformed("unbalanced END:" + value, line);
      stack.pop_back();
      if (value == "VEVENT") {
        expand(*pending, options, ++ordinal, events);
        pending.reset();
      }
      continue;
    }
    if (skip_depth > 0) continue;
    if (stack.empty()) malformed("content outside VCALENDAR", line);
    if (!pending) continue;  // VCALENDAR-level properties (VERSION, PRODID, ...)

    if (cl.name == "DTSTART") {
      pending->dtstart = cl;
    } else if (cl.name == "DTEND") {
      pending->dtend = cl;
    } else if (cl.name == "RRULE") {
      if (pending->rrule) malformed("VEVENT with more than one RRULE", line);
      pending->rrule = cl;
    } else if (cl.name == "SUMMARY") {
      pending->summary = unescape(cl.value);
    } else if (cl.name == "UID") {
      pending->uid = std::string(detail::trim(cl.value));
    } else if (cl.name == "DURATION" || cl.name == "RDATE" || cl.name == "EXDATE" ||
               cl.name == "EXRULE" || cl.name == "RECURRENCE-ID") {
      malformed(cl.name + " is not supported", line);
    }
  }
  if (!stack.empty() || skip_depth > 0) malformed("calendar ends inside a component", last_line);

  std::stable_sort(events.begin(), events.end(),
                   [](const CalendarEvent& a, const CalendarEvent& b) { return a.start < b.start; });
  return events;
}

}  // namespace escout
