#include <fstream>

#include "escout/error.hpp"
#include "escout/service.hpp"

namespace escout {

namespace fs = std::filesystem;

ProfileStore::ProfileStore(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (!dir_) return;
  std::error_code ec;
  fs::create_directories(*dir_, ec);
  if (ec) throw Error(Errc::Io, "cannot create profiles dir " + dir_->string());
  for (const auto& entry : fs::directory_iterator(*dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + entry.path().string());
    HouseholdProfile p = profile_from_json(parse_json(in, entry.path().string()));
    const std::string id = p.profile_id;
    if (!profiles_.emplace(id, std::make_shared<const HouseholdProfile>(std::move(p))).second) {
      throw Error(Errc::InvariantViolation, "profile id '" + id + "' appears in two files");
    }
  }
}

ProfileStore::Handle ProfileStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = profiles_.find(id);
  return it == profiles_.end() ? nullptr : it->second;
}

std::vector<ProfileStore::Handle> ProfileStore::list() const {
  std::shared_lock lock(mutex_);
  std::vector<Handle> out;
  out.reserve(profiles_.size());
  for (const auto& [id, p] : profiles_) out.push_back(p);
  return out;
}

ProfileStore::Handle ProfileStore::create(HouseholdProfile profile) {
  if (profile.profile_id.empty()) throw Error(Errc::InvariantViolation, "profile id is empty");
  validate(profile);
  auto handle = std::make_shared<const HouseholdProfile>(std::move(profile));
  std::lock_guard guard(lock_for(handle->profile_id));
  {
    std::shared_lock lock(mutex_);
    if (profiles_.count(handle->profile_id) != 0) {
      throw Error(Errc::InvariantViolation, "profile '" + handle->profile_id + "' already exists");
    }
  }
  persist(*handle);
  std::unique_lock lock(mutex_);
  profiles_[handle->profile_id] = handle;
  return handle;
}

ProfileStore::Handle ProfileStore::update(const std::string& id,
                                          const std::function<void(HouseholdProfile&)>& mutate) {
  std::lock_guard guard(lock_for(id));
  const Handle current = get(id);
  if (!current) throw Error(Errc::UnknownProfile, "no profile '" + id + "'");
  HouseholdProfile next = *current;
  mutate(next);
  if (next.profile_id != id) throw Error(Errc::InvariantViolation, "profile id cannot change");
  validate(next);
  auto handle = std::make_shared<const HouseholdProfile>(std::move(next));
  persist(*handle);
  std::unique_lock lock(mutex_);
  profiles_[id] = handle;
  return handle;
}

std::mutex& ProfileStore::lock_for(const std::string& id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void ProfileStore::persist(const HouseholdProfile& p) const {
  if (!dir_) return;
  for (char c : p.profile_id) {
    if (c == '/' || c == '\\' || c == '\0') {
      throw Error(Errc::InvariantViolation, "profile id '" + p.profile_id + "' is not a valid file name");
    }
  }
  if (p.profile_id == "." || p.profile_id == "..") {
    throw Error(Errc::InvariantViolation, "profile id '" + p.profile_id + "' is not a valid file name");
  }
  const fs::path target = *dir_ / (p.profile_id + ".json");
  const fs::path tmp = *dir_ / ("." + p.profile_id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << to_json(p).dump(2) << '\n';
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(Errc::Io, "cannot replace " + target.string() + ": " + ec.message());
}

}  // namespace escout
