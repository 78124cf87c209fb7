#include <fstream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "escout/context.hpp"
#include "escout/error.hpp"
#include "text.hpp"

namespace escout {

namespace {

Instant system_now() {
  return std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
}

std::uint64_t id_number(const std::string& id) {
  if (!id.starts_with("ann-")) return 0;
  const auto n = detail::parse_int(std::string_view(id).substr(4));
  return n && *n > 0 ? static_cast<std::uint64_t>(*n) : 0;
}

}  // namespace

AnnotationStore::AnnotationStore(std::optional<std::filesystem::path> file, Zone zone, Clock clock)
    : file_(std::move(file)), zone_(std::move(zone)), clock_(clock ? std::move(clock) : system_now) {
  if (!file_ || !std::filesystem::exists(*file_)) return;
  std::ifstream in(*file_);
  if (!in) throw Error(Errc::Io, "cannot read " + file_->string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::MalformedDocument, std::string("annotation log: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw Error(Errc::MalformedDocument, "annotation record without id", line_no);
    }
    const std::string id = j["id"].get<std::string>();
    next_id_ = std::max(next_id_, id_number(id) + 1);
    if (j.value("deleted", false)) {
      std::erase_if(items_, [&](const Annotation& a) { return a.annotation_id == id; });
      continue;
    }
    const auto at = parse_rfc3339(j.value("at", ""));
    const auto created = parse_rfc3339(j.value("created", ""));
    if (!at || !created || !j.contains("text") || !j["text"].is_string()) {
      throw Error(Errc::MalformedDocument, "annotation record needs at, text, created", line_no);
    }
    items_.push_back({id, *at, j["text"].get<std::string>(), *created});
  }
}

void AnnotationStore::append_line(const std::string& line) {
  if (!file_) return;
  std::ofstream out(*file_, std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) throw Error(Errc::Io, "cannot append to " + file_->string());
}

Annotation AnnotationStore::add(Instant at, std::string text) {
  if (detail::trim(text).empty()) throw Error(Errc::EmptyText, "annotation text is empty");
  std::unique_lock lock(mutex_);
  Annotation a{"ann-" + std::to_string(next_id_), at, std::move(text), clock_()};
  const nlohmann::json record = {{"id", a.annotation_id},
                                 {"at", format_rfc3339(a.at, zone_)},
                                 {"text", a.text},
                                 {"created", format_rfc3339(a.created, zone_)}};
  append_line(record.dump());
  ++next_id_;
  items_.push_back(a);
  return a;
}

bool AnnotationStore::remove(const std::string& annotation_id) {
  std::unique_lock lock(mutex_);
  const auto it = std::find_if(items_.begin(), items_.end(), [&](const Annotation& a) {
    return a.annotation_id == annotation_id;
  });
  if (it == items_.end()) return false;
  append_line(nlohmann::json{{"id", annotation_id}, {"deleted", true}}.dump());
  items_.erase(it);
  return true;
}

std::vector<Annotation> AnnotationStore::list(const TimeWindow& window) const {
  std::shared_lock lock(mutex_);
  std::vector<Annotation> out;
  for (const Annotation& a : items_) {
    if (window.contains(a.at)) out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Annotation& x, const Annotation& y) { return x.at < y.at; });
  return out;
}

std::vector<Annotation> AnnotationStore::all() const {
  std::shared_lock lock(mutex_);
  return items_;
}

}  // namespace escout
