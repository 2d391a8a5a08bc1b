#include "jcave/profile_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace jcave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kKnownFields[] = {"id",           "name",     "age",        "exercise",  "arm",
                                    "repetitions_n", "progress", "created_at", "updated_at"};

std::string now_iso8601() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string generate_id() {
  std::random_device rd;
  std::uint64_t v = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  char buf[20];
  std::snprintf(buf, sizeof buf, "p%012llx", static_cast<unsigned long long>(v & 0xFFFFFFFFFFFFULL));
  return buf;
}

void check_fields(const std::string& name, int repetitions_n) {
  if (name.empty()) {
    throw std::invalid_argument("profile name must not be empty");
  }
  if (repetitions_n < 1) {
    throw std::invalid_argument("repetitions N must be at least 1");
  }
}

// Advisory whole-file lock held for the lifetime of the object.
class FileLock {
 public:
  FileLock(const fs::path& target, bool exclusive) {
    auto lock_path = target;
    lock_path += ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw std::ios_base::failure("cannot open lock file " + lock_path.string());
    }
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw std::ios_base::failure("cannot lock " + lock_path.string());
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  int fd_ = -1;
};

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Best-effort line of a record: where its id appears in the text, else 0.
std::size_t record_line(const std::string& text, const json& record) {
  if (!record.is_object() || !record.contains("id") || !record["id"].is_string()) {
    return 0;
  }
  auto needle = json(record["id"]).dump();
  for (auto pos = text.find("\"id\""); pos != std::string::npos; pos = text.find("\"id\"", pos + 1)) {
    auto colon = text.find_first_not_of(" \t\r\n", pos + 4);
    if (colon == std::string::npos || text[colon] != ':') continue;
    auto value = text.find_first_not_of(" \t\r\n", colon + 1);
    if (value != std::string::npos && text.compare(value, needle.size(), needle) == 0) {
      return line_of_offset(text, pos);
    }
  }
  return 0;
}

}  // namespace

StoreFormatError::StoreFormatError(const fs::path& path, std::size_t line, const std::string& message)
    : std::runtime_error(path.string() + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         message) {}

json profile_to_json(const Profile& p) {
  json j = p.extra.is_object() ? p.extra : json::object();
  j["id"] = p.id;
  j["name"] = p.name;
  j["age"] = p.age;
  j["exercise"] = std::string(to_string(p.exercise));
  j["arm"] = std::string(to_string(p.arm));
  j["repetitions_n"] = p.repetitions_n;
  j["progress"] = p.progress ? json(p.progress->to_string()) : json(nullptr);
  j["created_at"] = p.created_at;
  j["updated_at"] = p.updated_at;
  return j;
}

Profile profile_from_json(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("profile record must be an object");
  }
  Profile p;
  p.id = j.at("id").get<std::string>();
  p.name = j.at("name").get<std::string>();
  p.age = j.value("age", 0);
  p.exercise = parse_exercise(j.at("exercise").get<std::string>());
  p.arm = parse_arm(j.at("arm").get<std::string>());
  p.repetitions_n = j.at("repetitions_n").get<int>();
  if (auto it = j.find("progress"); it != j.end() && !it->is_null()) {
    p.progress = SubLevelId::parse(it->get<std::string>());
  }
  p.created_at = j.value("created_at", "");
  p.updated_at = j.value("updated_at", "");
  if (p.id.empty()) {
    throw std::invalid_argument("profile id must not be empty");
  }
  check_fields(p.name, p.repetitions_n);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(std::begin(kKnownFields), std::end(kKnownFields), it.key()) == std::end(kKnownFields)) {
      p.extra[it.key()] = it.value();
    }
  }
  return p;
}

SubLevelId resume_sublevel(const Profile& profile) {
  if (!profile.progress) {
    return SubLevelId{1, 1};
  }
  return profile.progress->next().value_or(*profile.progress);
}

ProfileStore::ProfileStore(fs::path path) : path_(std::move(path)) {}

ProfileStore::Document ProfileStore::load() const {
  Document doc;
  std::ifstream in(path_, std::ios::binary);
  if (!in) {
    if (fs::exists(path_)) {
      throw std::ios_base::failure("cannot read " + path_.string());
    }
    return doc;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StoreFormatError(path_, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
  }
  if (!root.is_object() || !root.contains("version") || !root.contains("profiles")) {
    throw StoreFormatError(path_, 1, "expected an object with version and profiles");
  }
  if (root["version"] != kFormatVersion) {
    throw StoreFormatError(path_, 1, "unsupported store version " + root["version"].dump());
  }
  const auto& list = root["profiles"];
  if (!list.is_array()) {
    throw StoreFormatError(path_, 1, "profiles must be an array");
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    try {
      doc.profiles.push_back(profile_from_json(list[i]));
    } catch (const std::exception& e) {
      throw StoreFormatError(path_, record_line(text, list[i]), "profile #" + std::to_string(i) + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i < doc.profiles.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (doc.profiles[k].id == doc.profiles[i].id) {
        throw StoreFormatError(path_, record_line(text, list[i]), "duplicate profile id '" + doc.profiles[i].id + "'");
      }
    }
  }
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (it.key() != "version" && it.key() != "profiles") {
      doc.extra[it.key()] = it.value();
    }
  }
  return doc;
}

void ProfileStore::save(const Document& doc) const {
  json root = doc.extra.is_object() ? doc.extra : json::object();
  root["version"] = kFormatVersion;
  root["profiles"] = json::array();
  for (const auto& p : doc.profiles) {
    root["profiles"].push_back(profile_to_json(p));
  }

  if (path_.has_parent_path()) {
    fs::create_directories(path_.parent_path());
  }
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << root.dump(2) << '\n';
    out.flush();
    if (!out) {
      throw std::ios_base::failure("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path_);
}

std::vector<Profile> ProfileStore::list() const {
  FileLock lock(path_, false);
  auto profiles = load().profiles;
  std::sort(profiles.begin(), profiles.end(), [](const Profile& a, const Profile& b) {
    return std::tie(a.name, a.id) < std::tie(b.name, b.id);
  });
  return profiles;
}

Profile ProfileStore::get(const std::string& id) const {
  FileLock lock(path_, false);
  for (auto& p : load().profiles) {
    if (p.id == id) {
      return p;
    }
  }
  throw UnknownProfile(id);
}

Profile ProfileStore::create(const ProfileFields& fields, std::optional<std::string> id) {
  check_fields(fields.name, fields.repetitions_n);
  FileLock lock(path_, true);
  auto doc = load();

  Profile p;
  p.id = id ? *id : generate_id();
  if (p.id.empty()) {
    throw std::invalid_argument("profile id must not be empty");
  }
  for (const auto& existing : doc.profiles) {
    if (existing.id == p.id) {
      throw std::invalid_argument("duplicate profile id '" + p.id + "'");
    }
  }
  p.name = fields.name;
  p.age = fields.age;
  p.exercise = fields.exercise;
  p.arm = fields.arm;
  p.repetitions_n = fields.repetitions_n;
  p.created_at = p.updated_at = now_iso8601();
  doc.profiles.push_back(p);
  save(doc);
  return p;
}

Profile ProfileStore::update(const std::string& id, const ProfilePatch& patch) {
  FileLock lock(path_, true);
  auto doc = load();
  auto it = std::find_if(doc.profiles.begin(), doc.profiles.end(), [&](const Profile& p) { return p.id == id; });
  if (it == doc.profiles.end()) {
    throw UnknownProfile(id);
  }
  Profile p = *it;
  if (patch.name) p.name = *patch.name;
  if (patch.age) p.age = *patch.age;
  if (patch.exercise) p.exercise = *patch.exercise;
  if (patch.arm) p.arm = *patch.arm;
  if (patch.repetitions_n) p.repetitions_n = *patch.repetitions_n;
  if (patch.progress) p.progress = *patch.progress;
  check_fields(p.name, p.repetitions_n);
  p.updated_at = now_iso8601();
  *it = p;
  save(doc);
  return p;
}

void ProfileStore::remove(const std::string& id) {
  FileLock lock(path_, true);
  auto doc = load();
  auto it = std::find_if(doc.profiles.begin(), doc.profiles.end(), [&](const Profile& p) { return p.id == id; });
  if (it == doc.profiles.end()) {
    throw UnknownProfile(id);
  }
  doc.profiles.erase(it);
  save(doc);
}

Profile ProfileStore::record_progress(const std::string& id, SubLevelId completed) {
  FileLock lock(path_, true);
  auto doc = load();
  auto it = std::find_if(doc.profiles.begin(), doc.profiles.end(), [&](const Profile& p) { return p.id == id; });
  if (it == doc.profiles.end()) {
    throw UnknownProfile(id);
  }
  if (!it->progress || completed > *it->progress) {
    it->progress = completed;
    it->updated_at = now_iso8601();
    save(doc);
  }
  return *it;
}

}  // namespace jcave
