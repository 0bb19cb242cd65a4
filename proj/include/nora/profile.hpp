#pragma once

#include <set>

#include "nora/dialogue/activity.hpp"
#include "nora/nlu/types.hpp"
#include "nora/store/schema.hpp"

namespace nora {

struct Program {
  std::string name = "quarantine-14";
  int length_days = 14;
};

struct UserProfile {
  std::string id;
  std::string alias;
  Language language = Language::EN;
  Program program;
  std::set<std::string> interests;
  dialogue::ActivityPreferences activities;
  std::string credential_hash;
};

// User ids and aliases: 1-64 characters from [A-Za-z0-9_.-].
inline bool valid_handle(std::string_view s) {
  if (s.empty() || s.size() > 64) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

inline void to_json(nlohmann::json& j, const UserProfile& p) {
  j = nlohmann::json{{"id", p.id},
                     {"alias", p.alias},
                     {"language", to_string(p.language)},
                     {"program", {{"name", p.program.name}, {"length_days", p.program.length_days}}},
                     {"interests", p.interests},
                     {"activities", p.activities},
                     {"credential_hash", p.credential_hash}};
}

inline void from_json(const nlohmann::json& j, UserProfile& p) {
  p.id = j.at("id").get<std::string>();
  p.alias = j.at("alias").get<std::string>();
  p.language = parse_language(j.at("language").get<std::string>());
  p.program.name = j.at("program").at("name").get<std::string>();
  p.program.length_days = j.at("program").at("length_days").get<int>();
  p.interests = j.at("interests").get<std::set<std::string>>();
  p.activities = j.at("activities").get<dialogue::ActivityPreferences>();
  p.credential_hash = j.value("credential_hash", "");
}

inline void validate(const UserProfile& p) {
  if (!valid_handle(p.id)) fail(ErrorKind::InvalidInput, "invalid user id");
  if (!valid_handle(p.alias)) fail(ErrorKind::InvalidInput, "invalid alias");
  if (p.program.length_days < 1) fail(ErrorKind::InvalidInput, "program length must be >= 1");
}

inline std::optional<UserProfile> find_user(const store::DocumentStore& store, const std::string& id) {
  auto doc = store.get("users", id);
  if (!doc) return std::nullopt;
  return doc->body.get<UserProfile>();
}

inline UserProfile require_user(const store::DocumentStore& store, const std::string& id) {
  auto p = find_user(store, id);
  if (!p) fail(ErrorKind::NotFound, "unknown user: " + id);
  return *p;
}

inline std::optional<UserProfile> find_by_alias(const store::DocumentStore& store, const std::string& alias) {
  auto docs = store.query("users", {{{"alias", alias}}, std::nullopt});
  if (docs.empty()) return std::nullopt;
  return docs.front().body.get<UserProfile>();
}

// Creates a user. Aliases are unique platform-wide; ids are unique keys.
// The alias check is not atomic with the insert, so callers serialize
// registrations.
inline UserProfile create_user(store::DocumentStore& store, UserProfile p) {
  validate(p);
  if (find_by_alias(store, p.alias)) fail(ErrorKind::Conflict, "alias already taken");
  if (!store.compare_and_put("users", p.id, store::kAbsent, nlohmann::json(p))) {
    fail(ErrorKind::Conflict, "user already exists");
  }
  return p;
}

// Read-modify-write of a profile. `mutate` may throw to abort.
template <typename Fn>
UserProfile update_user(store::DocumentStore& store, const std::string& id, Fn&& mutate) {
  UserProfile result;
  store::update(store, "users", id, [&](nlohmann::json body) {
    if (body.is_null()) fail(ErrorKind::NotFound, "unknown user: " + id);
    auto p = body.get<UserProfile>();
    mutate(p);
    validate(p);
    result = p;
    return nlohmann::json(p);
  });
  return result;
}

}  // namespace nora
