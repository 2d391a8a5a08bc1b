#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jcave/game.hpp"
#include "jcave/rules.hpp"

namespace jcave {

struct Profile {
  std::string id;
  std::string name;
  int age = 0;  // advisory only
  ExerciseKind exercise = ExerciseKind::ElbowFlexExt;
  Arm arm = Arm::Right;
  int repetitions_n = 5;
  std::optional<SubLevelId> progress;  // highest completed sub-level
  std::string created_at;
  std::string updated_at;
  nlohmann::json extra = nlohmann::json::object();  // unknown fields, kept on rewrite

  friend bool operator==(const Profile&, const Profile&) = default;
};

struct ProfileFields {
  std::string name;
  int age = 0;
  ExerciseKind exercise = ExerciseKind::ElbowFlexExt;
  Arm arm = Arm::Right;
  int repetitions_n = 5;
};

struct ProfilePatch {
  std::optional<std::string> name;
  std::optional<int> age;
  std::optional<ExerciseKind> exercise;
  std::optional<Arm> arm;
  std::optional<int> repetitions_n;
  std::optional<SubLevelId> progress;
};

class UnknownProfile : public std::runtime_error {
 public:
  explicit UnknownProfile(const std::string& id) : std::runtime_error("unknown profile id '" + id + "'") {}
};

class StoreFormatError : public std::runtime_error {
 public:
  StoreFormatError(const std::filesystem::path& path, std::size_t line, const std::string& message);
};

nlohmann::json profile_to_json(const Profile& profile);
Profile profile_from_json(const nlohmann::json& j);

// The sub-level a profile plays next: the one after its progress, or 1-1.
SubLevelId resume_sublevel(const Profile& profile);

// A JSON document `{"version": 1, "profiles": [...]}` on disk.
//
// Each mutation takes an advisory lock on `<path>.lock`, re-reads the file, applies
// the change and replaces the file via write-to-temp-then-rename. A missing file
// reads as an empty store.
class ProfileStore {
 public:
  static constexpr int kFormatVersion = 1;

  explicit ProfileStore(std::filesystem::path path);

  const std::filesystem::path& path() const noexcept { return path_; }

  // Sorted by name, then id.
  std::vector<Profile> list() const;
  Profile get(const std::string& id) const;

  // Generates an id when none is given; throws on a duplicate id or invalid fields.
  Profile create(const ProfileFields& fields, std::optional<std::string> id = std::nullopt);
  Profile update(const std::string& id, const ProfilePatch& patch);
  void remove(const std::string& id);

  // Raises progress to `completed` if it is higher than the stored value.
  Profile record_progress(const std::string& id, SubLevelId completed);

 private:
  struct Document {
    std::vector<Profile> profiles;
    nlohmann::json extra = nlohmann::json::object();
  };

  Document load() const;
  void save(const Document& doc) const;

  std::filesystem::path path_;
};

}  // namespace jcave
